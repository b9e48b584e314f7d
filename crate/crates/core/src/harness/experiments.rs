//! Spectral concentration and binomial tail-exponent experiments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::models::{expected_adjacency, generate, EdgeLaw, ModelSpec};
use crate::thresholds::chernoff_exponent_g;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecNormStats {
    pub n: usize,
    pub p: f64,
    /// `||A - E[A]|| / sqrt(n p)` for every trial, in trial order.
    pub values: Vec<f64>,
    pub max: f64,
    pub mean: f64,
    pub p95: f64,
}

/// Empirical distribution of the normalized spectral deviation
/// `||A - E[A]|| / sqrt(n p)`; `E[A]` has a zero diagonal.
pub fn spectral_norm_experiment(spec: &ModelSpec, trials: usize, seed_base: u64) -> Result<SpecNormStats> {
    if trials == 0 {
        return domain("trials must be positive");
    }
    spec.validate()?;
    let p = spec.p();
    if !(p > 0.0) {
        return domain("edge probability must be positive");
    }
    let scale = (spec.n as f64 * p).sqrt();
    let mut values = Vec::with_capacity(trials);
    for t in 0..trials {
        let (truth, graph) = generate(spec, seed_base + t as u64)?;
        let mut m = graph.to_matrix();
        m.axpy(-1.0, &expected_adjacency(&truth, EdgeLaw::of(spec)));
        values.push(m.spectral_norm_sym() / scale);
    }
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let rank = ((0.95 * trials as f64).ceil() as usize).clamp(1, trials);
    Ok(SpecNormStats {
        n: spec.n,
        p,
        max: sorted[trials - 1],
        mean: values.iter().sum::<f64>() / trials as f64,
        p95: sorted[rank - 1],
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentPoint {
    pub n: usize,
    /// Threshold `k = floor(alpha log n)`.
    pub k: i64,
    pub hits: u64,
    pub samples: u64,
    pub probability: f64,
    /// No sample hit the event; the point is left out of the regression.
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    /// Analytic exponent.
    pub g: f64,
    /// Least-squares slope of `-log P` against `log n`.
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<ExponentPoint>,
    /// Set when some point was censored.
    pub any_censored: bool,
}

/// Estimate `P{X - R <= alpha log n}` with `X ~ Binom(rho1 n, a log n / n)`,
/// `R ~ Binom(rho2 n, b log n / n)` at each `n`, and regress `-log P` on `log n`.
pub fn exponent_experiment(
    rho1: f64,
    rho2: f64,
    a: f64,
    b: f64,
    alpha: f64,
    ns: &[usize],
    samples: u64,
    seed: u64,
) -> Result<ExponentReport> {
    let g = chernoff_exponent_g(rho1, rho2, a, b, alpha)?;
    if samples == 0 {
        return domain("samples must be positive");
    }
    let mut points = Vec::with_capacity(ns.len());
    for (idx, &n) in ns.iter().enumerate() {
        if n < 2 {
            return domain(format!("need n >= 2, got {n}"));
        }
        let log_n = (n as f64).ln();
        let (p, q) = (a * log_n / n as f64, b * log_n / n as f64);
        if p > 1.0 || q > 1.0 {
            return domain(format!("edge probability exceeds one at n = {n}"));
        }
        let m1 = (rho1 * n as f64).round() as u64;
        let m2 = (rho2 * n as f64).round() as u64;
        let x = Binomial::new(m1, p).map_err(|e| crate::Error::Domain(e.to_string()))?;
        let r = Binomial::new(m2, q).map_err(|e| crate::Error::Domain(e.to_string()))?;
        let k = (alpha * log_n).floor() as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx as u64));
        let mut hits = 0u64;
        for _ in 0..samples {
            if x.sample(&mut rng) as i64 - r.sample(&mut rng) as i64 <= k {
                hits += 1;
            }
        }
        points.push(ExponentPoint {
            n,
            k,
            hits,
            samples,
            probability: hits as f64 / samples as f64,
            censored: hits == 0,
        });
    }
    let usable: Vec<(f64, f64)> =
        points.iter().filter(|pt| !pt.censored).map(|pt| ((pt.n as f64).ln(), -pt.probability.ln())).collect();
    let (slope, intercept) = least_squares(&usable);
    Ok(ExponentReport { g, slope, intercept, any_censored: points.iter().any(|p| p.censored), points })
}

/// Ordinary least squares `y = slope x + intercept`; `NaN` with fewer than two
/// distinct abscissae.
pub fn least_squares(xy: &[(f64, f64)]) -> (f64, f64) {
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if xy.len() < 2 || sxx == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
