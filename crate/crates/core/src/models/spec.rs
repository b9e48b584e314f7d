use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which block model a [`ModelSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Two clusters of sizes `K = ceil(rho n)` and `n - K`.
    BinaryAsym,
    /// `r` clusters of equal size `n / r`.
    MultiEqual,
    /// Clusters of sizes `K_1 >= ... >= K_r` plus `n - sum K_k` outliers.
    GeneralOutliers,
    /// Binary censored block model with label-flip probability `epsilon`.
    Censored,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::BinaryAsym => "BinaryAsym",
            Variant::MultiEqual => "MultiEqual",
            Variant::GeneralOutliers => "GeneralOutliers",
            Variant::Censored => "Censored",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "binaryasym" | "binary" => Ok(Variant::BinaryAsym),
            "multiequal" | "multi" => Ok(Variant::MultiEqual),
            "generaloutliers" | "general" => Ok(Variant::GeneralOutliers),
            "censored" => Ok(Variant::Censored),
            other => Err(Error::Parse(format!("unknown variant '{other}'"))),
        }
    }
}

/// Generative parameters of a block model.
///
/// Densities follow the logarithmic scaling `p = a log n / n`, `q = b log n / n`.
/// Fields that a variant does not use may be left as `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n: usize,
    pub variant: Variant,
    pub a: f64,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

// Probabilities this close above one are treated as exactly one.
const PROB_SLACK: f64 = 1e-12;

impl ModelSpec {
    pub fn binary(n: usize, a: f64, b: f64, rho: f64) -> Result<Self> {
        Self { n, variant: Variant::BinaryAsym, a, b: Some(b), rho: Some(rho), r: Some(2), sizes: None, epsilon: None }
            .validated()
    }

    pub fn multi(n: usize, r: usize, a: f64, b: f64) -> Result<Self> {
        Self { n, variant: Variant::MultiEqual, a, b: Some(b), rho: None, r: Some(r), sizes: None, epsilon: None }
            .validated()
    }

    pub fn general(n: usize, sizes: Vec<usize>, a: f64, b: f64) -> Result<Self> {
        Self {
            n,
            variant: Variant::GeneralOutliers,
            a,
            b: Some(b),
            rho: None,
            r: Some(sizes.len()),
            sizes: Some(sizes),
            epsilon: None,
        }
        .validated()
    }

    /// Censored model with balanced clusters.
    pub fn censored(n: usize, a: f64, epsilon: f64) -> Result<Self> {
        Self {
            n,
            variant: Variant::Censored,
            a,
            b: None,
            rho: Some(0.5),
            r: Some(2),
            sizes: None,
            epsilon: Some(epsilon),
        }
        .validated()
    }

    /// Check every invariant; returns `self` unchanged on success.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.a.is_finite() && self.a > 0.0) {
            return bad(format!("a must be positive, got {}", self.a));
        }
        if self.p_raw() > 1.0 + PROB_SLACK {
            return bad(format!("p = a log n / n = {} exceeds 1", self.p_raw()));
        }
        if self.variant != Variant::Censored {
            let Some(b) = self.b else {
                return bad("b is required for this variant".into());
            };
            if !(b > 0.0 && b < self.a) {
                return bad(format!("need a > b > 0, got a = {}, b = {b}", self.a));
            }
        }
        match self.variant {
            Variant::BinaryAsym | Variant::Censored => {
                let rho = self.rho_or_half();
                if !(0.0..=0.5).contains(&rho) {
                    return bad(format!("rho must lie in [0, 1/2], got {rho}"));
                }
                if let Some(r) = self.r {
                    if r != 2 {
                        return bad(format!("binary variants have r = 2, got {r}"));
                    }
                }
                if self.variant == Variant::Censored {
                    let eps = self.epsilon.unwrap_or(f64::NAN);
                    if !(0.0..=0.5).contains(&eps) {
                        return bad(format!("epsilon must lie in [0, 1/2], got {eps}"));
                    }
                }
            }
            Variant::MultiEqual => {
                let r = self.r.unwrap_or(0);
                if r == 0 {
                    return bad("r must be a positive integer".into());
                }
                if self.n % r != 0 {
                    return bad(format!("n = {} is not divisible by r = {r}", self.n));
                }
            }
            Variant::GeneralOutliers => {
                let sizes = match &self.sizes {
                    Some(s) if !s.is_empty() => s,
                    _ => return bad("sizes must be a nonempty list".into()),
                };
                if sizes.iter().any(|&k| k == 0) {
                    return bad("cluster sizes must be positive".into());
                }
                if sizes.windows(2).any(|w| w[0] < w[1]) {
                    return bad("cluster sizes must be sorted in nonincreasing order".into());
                }
                if sizes.iter().sum::<usize>() > self.n {
                    return bad("cluster sizes sum to more than n".into());
                }
                if let Some(r) = self.r {
                    if r != sizes.len() {
                        return bad(format!("r = {r} disagrees with {} sizes", sizes.len()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn log_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    fn p_raw(&self) -> f64 {
        self.a * self.log_n() / self.n as f64
    }

    /// In-cluster edge probability `a log n / n` (edge probability for the
    /// censored model).
    pub fn p(&self) -> f64 {
        self.p_raw().min(1.0)
    }

    /// Cross-cluster edge probability `b log n / n`; zero for the censored model.
    pub fn q(&self) -> f64 {
        match self.b {
            Some(b) if self.variant != Variant::Censored => (b * self.log_n() / self.n as f64).min(1.0),
            _ => 0.0,
        }
    }

    pub fn b_or_zero(&self) -> f64 {
        self.b.unwrap_or(0.0)
    }

    pub fn epsilon_or_zero(&self) -> f64 {
        self.epsilon.unwrap_or(0.0)
    }

    fn rho_or_half(&self) -> f64 {
        self.rho.unwrap_or(0.5)
    }

    /// Planted cluster sizes in label order (cluster 1 first). Outliers are not
    /// included.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        match self.variant {
            Variant::BinaryAsym | Variant::Censored => {
                let k = binary_cluster_size(self.n, self.rho_or_half());
                vec![k, self.n - k]
            }
            Variant::MultiEqual => {
                let r = self.r.unwrap_or(1);
                vec![self.n / r; r]
            }
            Variant::GeneralOutliers => self.sizes.clone().unwrap_or_default(),
        }
    }

    pub fn num_clusters(&self) -> usize {
        match self.variant {
            Variant::BinaryAsym | Variant::Censored => 2,
            Variant::MultiEqual => self.r.unwrap_or(1),
            Variant::GeneralOutliers => self.sizes.as_ref().map_or(0, Vec::len),
        }
    }

    pub fn outlier_count(&self) -> usize {
        self.n - self.cluster_sizes().iter().sum::<usize>()
    }

    /// Size of the first cluster for the binary variants.
    pub fn first_cluster_size(&self) -> usize {
        self.cluster_sizes()[0]
    }
}

/// `K = ceil(rho n)`, computed robustly against representation error in
/// `rho n` (e.g. `0.3 * 10 = 3.0000000000000004`).
pub fn binary_cluster_size(n: usize, rho: f64) -> usize {
    let x = rho * n as f64;
    let rounded = x.round();
    let k = if (x - rounded).abs() < 1e-9 { rounded } else { x.ceil() };
    (k as usize).min(n)
}
