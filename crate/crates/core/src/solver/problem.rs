use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::matrix::Matrix;
use crate::models::{Alphabet, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagMode {
    /// `X_ii = 1`.
    FixedOne,
    /// `X_ii <= 1`.
    AtMostOne,
}

/// `maximize <C, X>` over symmetric PSD `X` subject to the listed constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub objective: Matrix,
    pub diag_mode: DiagMode,
    /// Entrywise `X_ij >= 0`.
    pub nonneg: bool,
    /// `<J, X> = value`.
    pub j_inner: Option<f64>,
    /// `X 1 = value * 1`.
    pub rowsum: Option<f64>,
    /// `<I, X> = value`.
    pub trace: Option<f64>,
}

impl SdpProblem {
    pub fn n(&self) -> usize {
        self.objective.n()
    }

    fn plain(objective: Matrix, diag_mode: DiagMode) -> Self {
        Self { objective, diag_mode, nonneg: false, j_inner: None, rowsum: None, trace: None }
    }
}

/// Two clusters of known sizes `K` and `n - K`: `diag(Y) = 1`, `<J, Y> = (2K - n)^2`.
pub fn build_sdp_binary(a: &Graph, k: usize) -> Result<SdpProblem> {
    let n = a.n();
    if k > n {
        return domain(format!("cluster size K = {k} exceeds n = {n}"));
    }
    let mut p = SdpProblem::plain(a.to_matrix(), DiagMode::FixedOne);
    let gap = 2.0 * k as f64 - n as f64;
    p.j_inner = Some(gap * gap);
    Ok(p)
}

/// Size-free penalized relaxation with objective `A - lambda J` and `diag(Y) = 1`.
pub fn build_sdp_penalized(a: &Graph, lambda: f64) -> Result<SdpProblem> {
    if !(lambda >= 0.0) {
        return domain(format!("lambda must be nonnegative, got {lambda}"));
    }
    let mut c = a.to_matrix();
    for v in c.as_mut_slice() {
        *v -= lambda;
    }
    Ok(SdpProblem::plain(c, DiagMode::FixedOne))
}

/// Equal clusters of size `K`: `diag(Z) = 1`, `Z >= 0`, `Z 1 = K 1`.
pub fn build_sdp_multi(a: &Graph, k: usize) -> Result<SdpProblem> {
    if k == 0 || k > a.n() {
        return domain(format!("cluster size must lie in 1..=n, got {k}"));
    }
    let mut p = SdpProblem::plain(a.to_matrix(), DiagMode::FixedOne);
    p.nonneg = true;
    p.rowsum = Some(k as f64);
    Ok(p)
}

/// Parameter-free relaxation for a signed graph: `diag(Y) = 1` only.
pub fn build_sdp_censored(a: &Graph) -> Result<SdpProblem> {
    a.require_alphabet(Alphabet::PlusMinusOne)?;
    Ok(SdpProblem::plain(a.to_matrix(), DiagMode::FixedOne))
}

/// Clusters of unequal sizes with outliers: `diag(Z) <= 1`, `Z >= 0`,
/// `<I, Z> = sum K_k`, `<J, Z> = sum K_k^2`.
pub fn build_sdp_general(a: &Graph, sum_k: usize, sum_k2: usize) -> Result<SdpProblem> {
    let n = a.n();
    if sum_k == 0 || sum_k > n {
        return domain(format!("need 0 < sum K <= n, got {sum_k}"));
    }
    if sum_k2 < sum_k || sum_k2 > sum_k * sum_k {
        return domain(format!("need sum K <= sum K^2 <= (sum K)^2, got {sum_k2}"));
    }
    let mut p = SdpProblem::plain(a.to_matrix(), DiagMode::AtMostOne);
    p.nonneg = true;
    p.trace = Some(sum_k as f64);
    p.j_inner = Some(sum_k2 as f64);
    Ok(p)
}

/// Penalized general relaxation with objective `A - lambda J - eta I`,
/// `diag(Z) <= 1`, `Z >= 0`.
pub fn build_sdp_general_penalized(a: &Graph, eta_star: f64, lambda_star: f64) -> Result<SdpProblem> {
    if !(eta_star >= 0.0 && lambda_star >= 0.0) {
        return domain(format!("need eta, lambda >= 0, got ({eta_star}, {lambda_star})"));
    }
    let n = a.n();
    let mut c = a.to_matrix();
    for v in c.as_mut_slice() {
        *v -= lambda_star;
    }
    c.add_diag(&vec![-eta_star; n]);
    let mut p = SdpProblem::plain(c, DiagMode::AtMostOne);
    p.nonneg = true;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_j_inner() {
        let g = Graph::empty(4, Alphabet::ZeroOne);
        assert_eq!(build_sdp_binary(&g, 2).unwrap().j_inner, Some(0.0));
        assert_eq!(build_sdp_binary(&g, 4).unwrap().j_inner, Some(16.0));
        let g = Graph::empty(10, Alphabet::ZeroOne);
        assert_eq!(build_sdp_binary(&g, 3).unwrap().j_inner, Some(16.0));
        assert!(build_sdp_binary(&g, 11).is_err());
    }

    #[test]
    fn penalized_objective() {
        let g = Graph::from_edges(3, Alphabet::ZeroOne, [(0, 1, 1)]).unwrap();
        let p = build_sdp_penalized(&g, 0.25).unwrap();
        assert_eq!(p.objective[(0, 1)], 0.75);
        assert_eq!(p.objective[(0, 2)], -0.25);
        assert_eq!(p.objective.asymmetry(), 0.0);
        assert!(p.j_inner.is_none());
        assert!(build_sdp_penalized(&g, -1.0).is_err());
    }

    #[test]
    fn general_builders() {
        let g = Graph::empty(10, Alphabet::ZeroOne);
        let p = build_sdp_general(&g, 8, 34).unwrap();
        assert_eq!((p.trace, p.j_inner, p.diag_mode), (Some(8.0), Some(34.0), DiagMode::AtMostOne));
        assert!(build_sdp_general(&g, 8, 7).is_err());
        assert!(build_sdp_general(&g, 11, 121).is_err());
        let p = build_sdp_general_penalized(&g, 2.0, 0.5).unwrap();
        assert_eq!(p.objective[(0, 0)], -2.5);
        assert_eq!(p.objective[(0, 1)], -0.5);
        assert!(p.nonneg && p.trace.is_none());
    }

    #[test]
    fn censored_rejects_plain_graph() {
        let g = Graph::empty(3, Alphabet::ZeroOne);
        assert!(build_sdp_censored(&g).is_err());
        let g = Graph::empty(3, Alphabet::PlusMinusOne);
        assert!(build_sdp_censored(&g).is_ok());
    }
}
