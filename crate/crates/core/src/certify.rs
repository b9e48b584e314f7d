//! Dual certificates proving that the planted cluster matrix is the unique
//! optimum of an SDP relaxation.
//!
//! Each builder assembles the dual objects `(D, B, lambda, eta)` from the
//! graph and the planted partition and forms the slack matrix `S`. The
//! planted matrix is the unique optimum when `S` annihilates the planted
//! indicator vectors, is positive definite on their orthogonal complement,
//! and the sign conditions on `D` and `B` hold.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::matrix::Matrix;
use crate::models::{Alphabet, Graph, Partition, OUTLIER};

/// Default strictness threshold for the restricted eigenvalue.
pub const DEFAULT_TOL_EIG: f64 = 1e-8;
/// Default null-residual tolerance per vertex.
pub const DEFAULT_TOL_NULL_PER_VERTEX: f64 = 1e-8;
/// Default constant `C` in the model-free choice `eta = C sqrt(log n)`.
pub const DEFAULT_ETA_CONSTANT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertVariant {
    Binary,
    Censored,
    Multi,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Lambda {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub variant: CertVariant,
    pub truth: Partition,
    pub d_star: Vec<f64>,
    /// Nonnegativity multipliers; `None` for variants without `Z >= 0`.
    pub b_star: Option<Matrix>,
    pub lambda: Lambda,
    pub eta_star: Option<f64>,
    pub s_star: Matrix,
    /// Vectors `S` must annihilate: the sign vector or the cluster indicators.
    pub null_basis: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub null_residual: f64,
    pub restricted_min_eig: f64,
    /// Minimum of `d_i` over inliers.
    pub min_d: f64,
    /// Minimum of `B_ij` over pairs in distinct clusters.
    pub min_offblock_b: Option<f64>,
    /// Minimum of `B_ij` over pairs involving an outlier.
    pub min_outlier_b: Option<f64>,
    pub valid: bool,
}

/// `eta = C sqrt(log n)`, the model-free choice for the general certificate.
pub fn default_eta_star(n: usize, c: f64) -> f64 {
    c * (n as f64).ln().sqrt()
}

/// Edge counts `e(i, C_k)` for every vertex and cluster (`k` 0-based).
fn cluster_degrees(a: &Graph, truth: &Partition) -> Vec<Vec<f64>> {
    let r = truth.r();
    (0..a.n())
        .map(|i| {
            let mut e = vec![0.0; r];
            for (j, &v) in a.row(i).iter().enumerate() {
                let l = truth.label(j);
                if v != 0 && l != OUTLIER {
                    e[l - 1] += v as f64;
                }
            }
            e
        })
        .collect()
}

fn check_sizes(a: &Graph, truth: &Partition) -> Result<()> {
    if a.n() != truth.n() {
        return Err(Error::Shape { expected: a.n(), got: truth.n() });
    }
    Ok(())
}

/// Two-cluster certificate: `d_i = sum_j A_ij s_i s_j - lambda (2K - n) s_i`,
/// `S = diag(d) - A + lambda J`.
pub fn binary_certificate(a: &Graph, truth: &Partition, lambda: f64) -> Result<Certificate> {
    check_sizes(a, truth)?;
    a.require_alphabet(Alphabet::ZeroOne)?;
    if !(lambda >= 0.0) {
        return domain(format!("lambda must be nonnegative, got {lambda}"));
    }
    let sigma = truth.signs()?;
    let imbalance: f64 = sigma.iter().sum();
    let a_sigma = a.to_matrix().mul_vec(&sigma);
    let d: Vec<f64> = (0..a.n()).map(|i| sigma[i] * a_sigma[i] - lambda * imbalance * sigma[i]).collect();
    let s_star = assemble(a, &d, None, &Lambda::Scalar(lambda), None);
    Ok(Certificate {
        variant: CertVariant::Binary,
        truth: truth.clone(),
        d_star: d,
        b_star: None,
        lambda: Lambda::Scalar(lambda),
        eta_star: None,
        s_star,
        null_basis: vec![sigma],
    })
}

/// Signed-graph certificate: `d_i = sum_j A_ij s_i s_j`, `S = diag(d) - A`.
pub fn censored_certificate(a: &Graph, truth: &Partition) -> Result<Certificate> {
    check_sizes(a, truth)?;
    a.require_alphabet(Alphabet::PlusMinusOne)?;
    let sigma = truth.signs()?;
    let a_sigma = a.to_matrix().mul_vec(&sigma);
    let d: Vec<f64> = (0..a.n()).map(|i| sigma[i] * a_sigma[i]).collect();
    let s_star = assemble(a, &d, None, &Lambda::Scalar(0.0), None);
    Ok(Certificate {
        variant: CertVariant::Censored,
        truth: truth.clone(),
        d_star: d,
        b_star: None,
        lambda: Lambda::Scalar(0.0),
        eta_star: None,
        s_star,
        null_basis: vec![sigma],
    })
}

/// Equal-size multi-cluster certificate with cross-cluster density `q_hat`.
pub fn multi_certificate(a: &Graph, truth: &Partition, q_hat: f64) -> Result<Certificate> {
    check_sizes(a, truth)?;
    a.require_alphabet(Alphabet::ZeroOne)?;
    let n = a.n();
    let r = truth.r();
    let sizes = truth.sizes();
    if r < 2 || truth.outliers() > 0 || sizes.iter().any(|&s| s != sizes[0]) || sizes[0] == 0 {
        return Err(Error::Encoding(format!("multi certificate needs r >= 2 equal clusters, got sizes {sizes:?}")));
    }
    let kf = sizes[0] as f64;
    let root_log = (n as f64).ln().sqrt();
    let e = cluster_degrees(a, truth);
    let k_of = |i: usize| truth.label(i) - 1;
    let s: Vec<f64> = (0..n).map(|i| e[i][k_of(i)]).collect();
    let rmax: Vec<f64> =
        (0..n).map(|i| (0..r).filter(|&k| k != k_of(i)).map(|k| e[i][k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let mut block = vec![vec![0.0; r]; r];
    let mut r_sum = vec![0.0; r];
    for i in 0..n {
        r_sum[k_of(i)] += rmax[i];
        for k in 0..r {
            block[k_of(i)][k] += e[i][k];
        }
    }
    let alpha = 0.5 * (kf * q_hat - root_log);
    let u = |k: usize, l: usize| (block[k][l] / kf - kf * q_hat + root_log) / (2.0 * kf);
    let lambda: Vec<f64> = rmax.iter().map(|ri| (ri - alpha) / kf).collect();
    let d: Vec<f64> = (0..n).map(|i| s[i] - rmax[i] + 2.0 * alpha - r_sum[k_of(i)] / kf).collect();
    let b = Matrix::from_fn(n, |i, j| {
        let (k, l) = (k_of(i), k_of(j));
        if k == l {
            0.0
        } else {
            (rmax[i] - e[i][l]) / kf + (rmax[j] - e[j][k]) / kf + 2.0 * u(k, l)
        }
    });
    let lambda = Lambda::Vector(lambda);
    let s_star = assemble(a, &d, Some(&b), &lambda, None);
    let null_basis = (1..=r).map(|k| truth.indicator(k)).collect();
    Ok(Certificate {
        variant: CertVariant::Multi,
        truth: truth.clone(),
        d_star: d,
        b_star: Some(b),
        lambda,
        eta_star: None,
        s_star,
        null_basis,
    })
}

/// Certificate for clusters of arbitrary sizes with outliers.
pub fn general_certificate(a: &Graph, truth: &Partition, eta_star: f64, lambda_star: f64) -> Result<Certificate> {
    check_sizes(a, truth)?;
    a.require_alphabet(Alphabet::ZeroOne)?;
    if !(eta_star >= 0.0 && lambda_star >= 0.0) {
        return domain(format!("need eta, lambda >= 0, got ({eta_star}, {lambda_star})"));
    }
    let n = a.n();
    let r = truth.r();
    let sizes: Vec<f64> = truth.sizes().iter().map(|&s| s as f64).collect();
    if r == 0 || sizes.iter().any(|&s| s == 0.0) {
        return Err(Error::Encoding(format!("general certificate needs nonempty clusters, got {sizes:?}")));
    }
    let e = cluster_degrees(a, truth);
    let mut block = vec![vec![0.0; r]; r];
    for i in 0..n {
        if truth.label(i) != OUTLIER {
            for k in 0..r {
                block[truth.label(i) - 1][k] += e[i][k];
            }
        }
    }
    let d: Vec<f64> = (0..n)
        .map(|i| match truth.label(i) {
            OUTLIER => 0.0,
            l => e[i][l - 1] - eta_star - lambda_star * sizes[l - 1],
        })
        .collect();
    let b = Matrix::from_fn(n, |i, j| match (truth.label(i), truth.label(j)) {
        (OUTLIER, OUTLIER) => 0.0,
        (OUTLIER, l) => lambda_star - e[i][l - 1] / sizes[l - 1],
        (k, OUTLIER) => lambda_star - e[j][k - 1] / sizes[k - 1],
        (k, l) if k == l => 0.0,
        (k, l) => {
            let (k, l) = (k - 1, l - 1);
            lambda_star - e[i][l] / sizes[l] - e[j][k] / sizes[k] + block[k][l] / (sizes[k] * sizes[l])
        }
    });
    let lambda = Lambda::Scalar(lambda_star);
    let s_star = assemble(a, &d, Some(&b), &lambda, Some(eta_star));
    let null_basis = (1..=r).map(|k| truth.indicator(k)).collect();
    Ok(Certificate {
        variant: CertVariant::General,
        truth: truth.clone(),
        d_star: d,
        b_star: Some(b),
        lambda,
        eta_star: Some(eta_star),
        s_star,
        null_basis,
    })
}

/// `S = diag(d) - B - A + eta I + (lambda J | lambda 1^T + 1 lambda^T)`.
fn assemble(a: &Graph, d: &[f64], b: Option<&Matrix>, lambda: &Lambda, eta: Option<f64>) -> Matrix {
    let n = a.n();
    Matrix::from_fn(n, |i, j| {
        let mut v = -(a.get(i, j) as f64);
        if i == j {
            v += d[i] + eta.unwrap_or(0.0);
        }
        if let Some(b) = b {
            v -= b[(i, j)];
        }
        v + match lambda {
            Lambda::Scalar(l) => *l,
            Lambda::Vector(l) => l[i] + l[j],
        }
    })
}

impl Certificate {
    /// Rebuild `S` from its parts and the graph.
    pub fn reconstruct(&self, a: &Graph) -> Result<Matrix> {
        if a.n() != self.d_star.len() {
            return Err(Error::Shape { expected: self.d_star.len(), got: a.n() });
        }
        Ok(assemble(a, &self.d_star, self.b_star.as_ref(), &self.lambda, self.eta_star))
    }
}

/// Modified Gram-Schmidt; vectors that become numerically zero are dropped.
fn orthonormalize(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for q in &basis {
            let proj: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(q).for_each(|(a, b)| *a -= proj * b);
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            w.iter_mut().for_each(|x| *x /= norm);
            basis.push(w);
        }
    }
    basis
}

/// Smallest eigenvalue of `S` on the orthogonal complement of `basis`.
fn restricted_min_eigenvalue(s: &Matrix, basis: &[Vec<f64>]) -> f64 {
    let n = s.n();
    let q = orthonormalize(basis);
    if q.len() >= n {
        return f64::INFINITY;
    }
    // P = I - Q Q^T; the basis directions are lifted above the spectrum of PSP.
    let mut p = Matrix::identity(n);
    for v in &q {
        p.axpy(-1.0, &Matrix::outer(v));
    }
    let mut m = p.matmul(s).matmul(&p);
    let lift = s.frobenius() + 1.0;
    for v in &q {
        m.axpy(lift, &Matrix::outer(v));
    }
    m.symmetrize();
    m.min_eigenvalue()
}

/// Check every optimality condition of `cert`.
pub fn verify(cert: &Certificate, tol_null: f64, tol_eig: f64) -> CertReport {
    let s = &cert.s_star;
    let null_residual =
        cert.null_basis.iter().map(|xi| s.mul_vec(xi).iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let restricted_min_eig = restricted_min_eigenvalue(s, &cert.null_basis);
    let truth = &cert.truth;
    let n = truth.n();
    let min_d = (0..n).filter(|&i| truth.label(i) != OUTLIER).map(|i| cert.d_star[i]).fold(f64::INFINITY, f64::min);
    let (mut min_offblock_b, mut min_outlier_b) = (None::<f64>, None::<f64>);
    if let Some(b) = &cert.b_star {
        for i in 0..n {
            for j in 0..n {
                let (k, l) = (truth.label(i), truth.label(j));
                if i == j || k == l {
                    continue;
                }
                let slot = if k == OUTLIER || l == OUTLIER { &mut min_outlier_b } else { &mut min_offblock_b };
                *slot = Some(slot.map_or(b[(i, j)], |m| m.min(b[(i, j)])));
            }
        }
    }
    let valid = null_residual <= tol_null
        && restricted_min_eig > tol_eig
        && min_d > 0.0
        && min_offblock_b.map_or(true, |m| m > 0.0)
        && min_outlier_b.map_or(true, |m| m >= 0.0);
    CertReport { null_residual, restricted_min_eig, min_d, min_offblock_b, min_outlier_b, valid }
}

/// [`verify`] with tolerances `1e-8 n` and `1e-8`.
pub fn verify_default(cert: &Certificate) -> CertReport {
    verify(cert, DEFAULT_TOL_NULL_PER_VERTEX * cert.d_star.len() as f64, DEFAULT_TOL_EIG)
}
