//! Data-driven penalty for the size-free two-cluster SDP, computed from the
//! degree sequence alone.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::models::{Alphabet, Graph};

/// Smallest admissible `|1 - 2 rho_hat|` in the unbalanced formula.
pub const IMBALANCE_FLOOR: f64 = 1e-6;

/// How the side means `w_plus`, `w_minus` are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SideMean {
    /// Average over the vertices on that side of `w_hat`.
    #[default]
    Conditional,
    /// Sum over the vertices on that side, divided by `n`.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfile {
    /// `w_i = d_i / log n`.
    pub w: Vec<f64>,
    pub w_hat: f64,
    /// Fraction of vertices with `w_i <= w_hat`.
    pub rho_hat: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Set when a side was empty and took the other side's value.
    pub empty_side: bool,
    pub normalization: SideMean,
}

/// Degree profile with conditional side means.
pub fn degree_profile(a: &Graph) -> Result<DegreeProfile> {
    degree_profile_with(a, SideMean::Conditional)
}

pub fn degree_profile_with(a: &Graph, normalization: SideMean) -> Result<DegreeProfile> {
    a.require_alphabet(Alphabet::ZeroOne)?;
    let n = a.n();
    if n < 2 {
        return domain(format!("need n >= 2, got {n}"));
    }
    let log_n = (n as f64).ln();
    let d = a.degrees();
    let total: i64 = d.iter().sum();
    let nn = n as i64;
    let w: Vec<f64> = d.iter().map(|&di| di as f64 / log_n).collect();
    let w_hat = total as f64 / (n as f64 * log_n);
    // Compare d_i against the mean degree exactly in integers.
    let (mut below, mut n_plus, mut n_minus) = (0usize, 0usize, 0usize);
    let (mut sum_plus, mut sum_minus) = (0.0, 0.0);
    for (&di, &wi) in d.iter().zip(&w) {
        let scaled = di * nn;
        if scaled <= total {
            below += 1;
        }
        if scaled > total {
            n_plus += 1;
            sum_plus += wi;
        } else if scaled < total {
            n_minus += 1;
            sum_minus += wi;
        }
    }
    let side = |sum: f64, count: usize| match normalization {
        SideMean::Conditional => sum / count as f64,
        SideMean::Literal => sum / n as f64,
    };
    let (w_plus, w_minus, empty_side) = match (n_plus, n_minus) {
        (0, 0) => (w_hat, w_hat, true),
        (0, m) => (side(sum_minus, m), side(sum_minus, m), true),
        (p, 0) => (side(sum_plus, p), side(sum_plus, p), true),
        (p, m) => (side(sum_plus, p), side(sum_minus, m), false),
    };
    Ok(DegreeProfile { w, w_hat, rho_hat: below as f64 / n as f64, w_plus, w_minus, empty_side, normalization })
}

/// Half-width `log(n)^(-1/9)` of the band around `1/2` where `rho_hat` counts
/// as balanced.
pub fn balance_band(n: usize) -> f64 {
    (n as f64).ln().powf(-1.0 / 9.0)
}

/// Unbalanced-branch coefficient
/// `(w+ - w-) / (1 - 2 rho) / log(((w+ + w-)(1 - 2 rho) + (w+ - w-)) / ((w+ + w-)(1 - 2 rho) - (w+ - w-)))`,
/// which equals `tau(a, b)` at the population values.
pub fn unbalanced_coefficient(w_plus: f64, w_minus: f64, rho_hat: f64) -> Result<f64> {
    let skew = 1.0 - 2.0 * rho_hat;
    if skew.abs() < IMBALANCE_FLOOR {
        return domain(format!("|1 - 2 rho_hat| = {} is below the floor {IMBALANCE_FLOOR}", skew.abs()));
    }
    let (sum, diff) = (w_plus + w_minus, w_plus - w_minus);
    let num = sum * skew + diff;
    let den = sum * skew - diff;
    let ratio = num / den;
    if !(ratio > 0.0 && ratio.is_finite()) || ratio == 1.0 {
        return domain(format!("log argument {num} / {den} is not a positive number other than 1"));
    }
    Ok(diff / skew / ratio.ln())
}

/// The data-driven penalty `lambda_hat`.
pub fn lambda_hat(profile: &DegreeProfile, n: usize) -> Result<f64> {
    if n < 3 {
        return domain(format!("need n >= 3, got {n}"));
    }
    let scale = (n as f64).ln() / n as f64;
    if (profile.rho_hat - 0.5).abs() <= balance_band(n) {
        return Ok(profile.w_hat * scale);
    }
    Ok(unbalanced_coefficient(profile.w_plus, profile.w_minus, profile.rho_hat)? * scale)
}
