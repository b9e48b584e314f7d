//! Closed-form recovery thresholds and large-deviation exponents.
//!
//! All densities use the logarithmic scaling `p = a log n / n`,
//! `q = b log n / n`; the functions here depend only on the coefficients.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Below this `rho` (or above `1 - rho`) the explicit `rho -> 0` limit of
/// `eta` is used.
pub const RHO_LIMIT_CUTOFF: f64 = 1e-9;

/// A margin within this distance of zero is reported as critical.
pub const CRITICAL_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Recoverable,
    NotRecoverable,
    Critical,
}

impl Verdict {
    pub fn from_margin(margin: f64) -> Self {
        if margin.abs() < CRITICAL_BAND {
            Verdict::Critical
        } else if margin > 0.0 {
            Verdict::Recoverable
        } else {
            Verdict::NotRecoverable
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub tau: f64,
    pub gamma: f64,
    /// The exponent compared against one (or the variant's analogue).
    pub eta: f64,
    pub verdict: Verdict,
    pub margin: f64,
}

impl ThresholdReport {
    fn new(tau: f64, gamma: f64, eta: f64, margin: f64) -> Self {
        Self { tau, gamma, eta, verdict: Verdict::from_margin(margin), margin }
    }
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(b > 0.0 && a > b && a.is_finite()) {
        return domain(format!("need a > b > 0, got a = {a}, b = {b}"));
    }
    Ok(())
}

/// `tau = (a - b) / (log a - log b)`, the logarithmic mean of `a` and `b`.
pub fn tau(a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    Ok((a - b) / (a.ln() - b.ln()))
}

/// The two-cluster exponent `eta(rho, a, b)`.
///
/// Accepts `rho` in `[0, 1]`; the function is symmetric about `1/2`.
pub fn eta(rho: f64, a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    if !(0.0..=1.0).contains(&rho) {
        return domain(format!("rho must lie in [0, 1], got {rho}"));
    }
    let t = (a - b) / (a.ln() - b.ln());
    let rho = rho.min(1.0 - rho);
    if rho < RHO_LIMIT_CUTOFF {
        return Ok(eta_limit(a, b, t));
    }
    let rho_bar = 1.0 - rho;
    let skew = (rho_bar - rho) * t;
    let gamma = eta_gamma(rho, a, b, t);
    let ratio = (rho * (gamma + skew)) / (rho_bar * (gamma - skew));
    Ok((a + b) / 2.0 - gamma + 0.5 * skew * ratio.ln())
}

/// `gamma = sqrt((1 - 2 rho)^2 tau^2 + 4 rho (1 - rho) a b)`.
fn eta_gamma(rho: f64, a: f64, b: f64, t: f64) -> f64 {
    let rho_bar = 1.0 - rho;
    ((rho_bar - rho).powi(2) * t * t + 4.0 * rho * rho_bar * a * b).sqrt()
}

/// `eta(0, a, b) = (a + b) / 2 - tau log(e sqrt(ab) / tau)`.
fn eta_limit(a: f64, b: f64, t: f64) -> f64 {
    (a + b) / 2.0 - t * (E * (a * b).sqrt() / t).ln()
}

/// Exponent `g` of `P{X - R <= alpha log n} = n^{-g + o(1)}` for independent
/// `X ~ Binom(rho1 n, a log n / n)` and `R ~ Binom(rho2 n, b log n / n)`.
pub fn chernoff_exponent_g(rho1: f64, rho2: f64, a: f64, b: f64, alpha: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return domain(format!("need a, b > 0, got a = {a}, b = {b}"));
    }
    if rho1 < 0.0 || rho2 < 0.0 || (rho1 == 0.0 && rho2 == 0.0) {
        return domain(format!("need rho1, rho2 >= 0 not both zero, got ({rho1}, {rho2})"));
    }
    let mean = a * rho1 - b * rho2;
    if alpha > mean {
        return domain(format!("alpha = {alpha} exceeds the mean coefficient {mean}"));
    }
    if rho1 > 0.0 && rho2 > 0.0 {
        let gamma = (alpha * alpha + 4.0 * rho1 * rho2 * a * b).sqrt();
        let log_term = ((gamma - alpha) * a * rho1 / ((gamma + alpha) * b * rho2)).ln();
        Ok(a * rho1 + b * rho2 - gamma - 0.5 * alpha * log_term)
    } else if rho1 == 0.0 {
        // alpha <= -b rho2 < 0 here.
        Ok(rho2 * b + alpha * (-E * rho2 * b / alpha).ln())
    } else if alpha > 0.0 {
        Ok(rho1 * a - alpha * (E * rho1 * a / alpha).ln())
    } else if alpha == 0.0 {
        Ok(rho1 * a)
    } else {
        // X - R = X >= 0 can never fall below a negative level.
        Ok(f64::INFINITY)
    }
}

/// Poisson rate function `I(mu, d) = mu - d log(e mu / d)`, with `I(mu, 0) = mu`.
pub fn rate_i(mu: f64, d: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return domain(format!("need mu > 0, got {mu}"));
    }
    if !(d >= 0.0) {
        return domain(format!("need d >= 0, got {d}"));
    }
    if d == 0.0 {
        return Ok(mu);
    }
    Ok(mu - d * (E * mu / d).ln())
}

/// Optimal censored-model threshold `a*(eps) = 1 / (sqrt(1 - eps) - sqrt(eps))^2`;
/// infinite at `eps = 1/2`.
pub fn censored_threshold(epsilon: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&epsilon) {
        return domain(format!("epsilon must lie in [0, 1/2], got {epsilon}"));
    }
    if epsilon == 0.5 {
        return Ok(f64::INFINITY);
    }
    let gap = (1.0 - epsilon).sqrt() - epsilon.sqrt();
    Ok(1.0 / (gap * gap))
}

/// Bisection stops once the bracket is narrower than this.
pub const PSI_TOLERANCE: f64 = 1e-10;

/// Root of `I(a, b + 2 psi) = I(b, b + psi)` with `b < b + 2 psi < a`.
pub fn solve_psi(a: f64, b: f64) -> Result<f64> {
    let t = tau(a, b)?;
    let f = |psi: f64| rate_i(a, b + 2.0 * psi).unwrap() - rate_i(b, b + psi).unwrap();
    let mut lo = (0.5 * (t - b) * (1.0 - 1e-6)).max(0.0);
    let mut hi = 0.5 * (a - b);
    // f is strictly decreasing on the bracket: positive at lo, negative at hi.
    while hi - lo > PSI_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The explicit smaller solution `(tau - b) / 2` of `I(a, b + 2 psi) = I(b, b + 2 psi)`.
pub fn psi_explicit(a: f64, b: f64) -> Result<f64> {
    Ok(0.5 * (tau(a, b)? - b))
}

/// Margins `I(...) - 1/rho` of the four sufficient conditions for the general
/// cluster structure. Dropped conditions are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralCheck {
    pub con1: f64,
    pub con2: Option<f64>,
    pub con3: Option<f64>,
    pub con4: Option<f64>,
    pub recoverable: bool,
}

/// Evaluate the general-structure conditions for cluster fractions
/// `rho_1 >= ... >= rho_r`. Outliers are present when the fractions sum to
/// less than one; the fourth condition is evaluated only then, and the
/// second/third only when `r >= 2`.
pub fn general_recovery_check(a: f64, b: f64, fractions: &[f64], psi1: f64, psi2: f64) -> Result<GeneralCheck> {
    check_ab(a, b)?;
    if fractions.is_empty() || fractions.iter().any(|&r| !(r > 0.0)) {
        return domain("cluster fractions must be positive and nonempty");
    }
    if fractions.windows(2).any(|w| w[0] < w[1]) {
        return domain("cluster fractions must be sorted in nonincreasing order");
    }
    if !(psi1 > 0.0 && psi2 > 0.0) {
        return domain(format!("need psi1, psi2 > 0, got ({psi1}, {psi2})"));
    }
    let top = b + psi1 + psi2;
    if top >= a {
        return domain(format!("need b + psi1 + psi2 < a, got {top} >= {a}"));
    }
    let r = fractions.len();
    let rho_min = fractions[r - 1];
    let has_outliers = fractions.iter().sum::<f64>() < 1.0 - 1e-12;
    let con1 = rate_i(a, top)? - 1.0 / rho_min;
    let (con2, con3) = if r >= 2 {
        (Some(rate_i(b, b + psi1)? - 1.0 / rho_min), Some(rate_i(b, b + psi2)? - 1.0 / fractions[r - 2]))
    } else {
        (None, None)
    };
    let con4 = if has_outliers { Some(rate_i(b, top)? - 1.0 / rho_min) } else { None };
    let recoverable = con1 > 0.0 && [con2, con3, con4].iter().flatten().all(|&m| m > 0.0);
    Ok(GeneralCheck { con1, con2, con3, con4, recoverable })
}

/// Equal-size multi-cluster threshold: margin `sqrt(a) - sqrt(b) - sqrt(r)`.
pub fn multi_threshold(r: usize, a: f64, b: f64) -> Result<ThresholdReport> {
    if r < 2 {
        return domain(format!("need r >= 2, got {r}"));
    }
    let t = tau(a, b)?;
    let margin = a.sqrt() - b.sqrt() - (r as f64).sqrt();
    let exponent = (a.sqrt() - b.sqrt()).powi(2) / r as f64;
    Ok(ThresholdReport::new(t, (a * b).sqrt(), exponent, margin))
}

/// Two-cluster threshold with known sizes: margin `eta(rho, a, b) - 1`.
pub fn binary_threshold(rho: f64, a: f64, b: f64) -> Result<ThresholdReport> {
    let t = tau(a, b)?;
    let e = eta(rho, a, b)?;
    let r = rho.min(1.0 - rho);
    Ok(ThresholdReport::new(t, eta_gamma(r, a, b, t), e, e - 1.0))
}

/// Censored threshold: margin `a (sqrt(1 - eps) - sqrt(eps))^2 - 1`.
pub fn censored_report(a: f64, epsilon: f64) -> Result<ThresholdReport> {
    let a_star = censored_threshold(epsilon)?;
    if !(a > 0.0) {
        return domain(format!("need a > 0, got {a}"));
    }
    let exponent = a / a_star;
    Ok(ThresholdReport::new(f64::NAN, f64::NAN, exponent, exponent - 1.0))
}

/// General structure via the single-`psi` corollary: margin
/// `I(b, b + psi) - 1 / rho_min`.
pub fn general_report(a: f64, b: f64, rho_min: f64) -> Result<ThresholdReport> {
    let t = tau(a, b)?;
    if !(rho_min > 0.0 && rho_min <= 1.0) {
        return domain(format!("rho_min must lie in (0, 1], got {rho_min}"));
    }
    let psi = solve_psi(a, b)?;
    let exponent = rate_i(b, b + psi)? * rho_min;
    Ok(ThresholdReport::new(t, psi, exponent, rate_i(b, b + psi)? - 1.0 / rho_min))
}
