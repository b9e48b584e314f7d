//! Euclidean projections onto the PSD cone and onto the affine/box part of
//! the feasible set.

use super::problem::{DiagMode, SdpProblem};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Sweep limit for alternating projections when equalities meet inequalities.
pub const DYKSTRA_SWEEPS: usize = 50;
const DYKSTRA_STOP: f64 = 1e-12;

/// Clip negative eigenvalues to zero.
pub fn project_psd(x: &Matrix) -> Matrix {
    let eig = x.sym_eigen();
    let n = x.n();
    let neg: Vec<usize> = (0..n).filter(|&k| eig.values[k] < 0.0).collect();
    let mut out = if neg.len() * 2 <= n {
        let mut out = x.clone();
        out.axpy(-1.0, &eig.reconstruct(&neg, |l| l));
        out
    } else {
        let pos: Vec<usize> = (0..n).filter(|&k| eig.values[k] > 0.0).collect();
        eig.reconstruct(&pos, |l| l)
    };
    out.symmetrize();
    out
}

/// Affine equalities, solved in closed form for each supported combination.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Affine {
    Free,
    Diag,
    DiagSum(f64),
    DiagRow(f64),
    Row(f64),
    Sum(f64),
    Trace(f64),
    TraceSum(f64, f64),
}

/// Entrywise bounds: diagonal in `[diag_lo, diag_hi]`, off-diagonal `>= off_lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BoxSet {
    diag_lo: f64,
    diag_hi: f64,
    off_lo: f64,
}

impl BoxSet {
    fn apply(&self, x: &mut Matrix) {
        let n = x.n();
        let data = x.as_mut_slice();
        for i in 0..n {
            for j in 0..n {
                let v = &mut data[i * n + j];
                *v = if i == j { v.clamp(self.diag_lo, self.diag_hi) } else { v.max(self.off_lo) };
            }
        }
    }
}

/// Projection onto the non-PSD constraints of an [`SdpProblem`].
#[derive(Debug, Clone)]
pub(crate) struct Projector {
    affine: Affine,
    bounds: BoxSet,
}

impl Projector {
    pub(crate) fn new(p: &SdpProblem) -> Result<Self> {
        let n = p.n();
        let fixed = p.diag_mode == DiagMode::FixedOne;
        let affine = match (fixed, p.j_inner, p.rowsum, p.trace) {
            (false, None, None, None) => Affine::Free,
            (true, None, None, None) => Affine::Diag,
            (true, Some(c), None, None) => Affine::DiagSum(c),
            (true, None, Some(k), None) if n >= 3 => Affine::DiagRow(k),
            (false, None, Some(k), None) => Affine::Row(k),
            (false, Some(c), None, None) => Affine::Sum(c),
            (false, None, None, Some(t)) => Affine::Trace(t),
            (false, Some(c), None, Some(t)) if n >= 2 => Affine::TraceSum(t, c),
            _ => {
                return Err(Error::Unsupported(format!(
                    "diag {:?} with j_inner {:?}, rowsum {:?}, trace {:?} (n = {n})",
                    p.diag_mode, p.j_inner, p.rowsum, p.trace
                )))
            }
        };
        let bounds = BoxSet {
            diag_lo: match (fixed, p.nonneg) {
                (true, _) => 1.0,
                (false, true) => 0.0,
                (false, false) => f64::NEG_INFINITY,
            },
            diag_hi: 1.0,
            off_lo: if p.nonneg { 0.0 } else { f64::NEG_INFINITY },
        };
        Ok(Self { affine, bounds })
    }

    fn box_is_redundant(&self) -> bool {
        // A fixed unit diagonal without sign constraints is enforced by the
        // affine step alone.
        self.bounds.off_lo == f64::NEG_INFINITY && self.bounds.diag_lo == self.bounds.diag_hi
    }

    pub(crate) fn project(&self, y: &Matrix) -> Matrix {
        if self.affine == Affine::Free {
            let mut x = y.clone();
            self.bounds.apply(&mut x);
            return x;
        }
        if self.box_is_redundant() {
            return self.project_affine(y);
        }
        if let Some(x) = self.project_separable(y) {
            return x;
        }
        if let (Affine::DiagRow(k), 0.0) = (self.affine, self.bounds.off_lo) {
            if let Some(x) = project_row_sums(y, k - 1.0) {
                return x;
            }
        }
        // Dykstra: the affine step needs no correction term, the box step does.
        let mut x = y.clone();
        let mut q = Matrix::zeros(y.n());
        for _ in 0..DYKSTRA_SWEEPS {
            let a = self.project_affine(&x);
            let mut shifted = a.clone();
            shifted.axpy(1.0, &q);
            let mut b = shifted.clone();
            self.bounds.apply(&mut b);
            q = shifted;
            q.axpy(-1.0, &b);
            let change = b.frobenius_diff(&x);
            x = b;
            if change <= DYKSTRA_STOP * x.frobenius().max(1.0) {
                break;
            }
        }
        x
    }

    /// Exact projection when every equality is carried by one shared shift of
    /// the diagonal and one of the off-diagonal entries.
    fn project_separable(&self, y: &Matrix) -> Option<Matrix> {
        let n = y.n();
        let b = self.bounds;
        let diag = y.diag();
        let off: Vec<f64> =
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| y[(i, j)]).collect();
        let (gamma, beta) = match self.affine {
            Affine::Sum(c) => {
                let s = solve_shift(&[(&off, b.off_lo, f64::INFINITY), (&diag, b.diag_lo, b.diag_hi)], c);
                (s, s)
            }
            Affine::Trace(t) => (solve_shift(&[(&diag, b.diag_lo, b.diag_hi)], t), 0.0),
            Affine::TraceSum(t, c) => (
                solve_shift(&[(&diag, b.diag_lo, b.diag_hi)], t),
                solve_shift(&[(&off, b.off_lo, f64::INFINITY)], c - t),
            ),
            _ => return None,
        };
        Some(Matrix::from_fn(n, |i, j| {
            if i == j {
                (y[(i, i)] - gamma).clamp(b.diag_lo, b.diag_hi)
            } else {
                (y[(i, j)] - beta).max(b.off_lo)
            }
        }))
    }

    fn project_affine(&self, y: &Matrix) -> Matrix {
        let n = y.n();
        let nf = n as f64;
        let mut x = y.clone();
        match self.affine {
            Affine::Free => {}
            Affine::Diag => set_unit_diag(&mut x),
            Affine::DiagSum(c) => {
                set_unit_diag(&mut x);
                if n > 1 {
                    let off = x.sum() - nf;
                    let shift = (c - nf - off) / (nf * nf - nf);
                    add_off_diag(&mut x, shift);
                }
            }
            Affine::DiagRow(k) => {
                let r: Vec<f64> = (0..n).map(|i| y.row(i).iter().sum::<f64>() - y[(i, i)] - (k - 1.0)).collect();
                let s = r.iter().sum::<f64>() / (2.0 * nf - 2.0);
                let mu: Vec<f64> = r.iter().map(|ri| (ri - s) / (nf - 2.0)).collect();
                subtract_rank_two(&mut x, &mu);
                set_unit_diag(&mut x);
            }
            Affine::Row(k) => {
                let r: Vec<f64> = (0..n).map(|i| y.row(i).iter().sum::<f64>() - k).collect();
                let s = r.iter().sum::<f64>() / (2.0 * nf);
                let mu: Vec<f64> = r.iter().map(|ri| (ri - s) / nf).collect();
                subtract_rank_two(&mut x, &mu);
            }
            Affine::Sum(c) => {
                let shift = (c - y.sum()) / (nf * nf);
                for v in x.as_mut_slice() {
                    *v += shift;
                }
            }
            Affine::Trace(t) => x.add_diag(&vec![(t - y.trace()) / nf; n]),
            Affine::TraceSum(t, c) => {
                // X = Y - alpha I - beta J with both equalities restored.
                let (tr, sum) = (y.trace(), y.sum());
                let beta = (sum - tr - c + t) / (nf * nf - nf);
                let alpha = (tr - t) / nf - beta;
                for v in x.as_mut_slice() {
                    *v -= beta;
                }
                x.add_diag(&vec![-alpha; n]);
            }
        }
        x
    }
}

/// The shift `s` with `sum clamp(v - s, lo, hi) = target` over all groups
/// `(values, lo, hi)`; the sum is nonincreasing in `s`.
fn solve_shift(groups: &[(&[f64], f64, f64)], target: f64) -> f64 {
    let total = |s: f64| -> f64 {
        groups.iter().map(|(vals, lo, hi)| vals.iter().map(|v| (v - s).clamp(*lo, *hi)).sum::<f64>()).sum()
    };
    let values = groups.iter().flat_map(|g| g.0.iter().copied());
    let (vmin, vmax) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !vmin.is_finite() {
        return 0.0;
    }
    let reach = target.abs() + 1.0;
    let (mut lo, mut hi) = (vmin - reach - 1.0, vmax + reach + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    // Solve exactly on the active set at `s`.
    let (mut free_sum, mut free, mut fixed) = (0.0, 0usize, 0.0);
    for (vals, l, h) in groups {
        for &v in vals.iter() {
            let x = v - s;
            if x <= *l {
                fixed += l;
            } else if x >= *h {
                fixed += h;
            } else {
                free_sum += v;
                free += 1;
            }
        }
    }
    if free == 0 {
        return s;
    }
    let exact = (free_sum - (target - fixed)) / free as f64;
    if (total(exact) - target).abs() <= (total(s) - target).abs() {
        exact
    } else {
        s
    }
}

/// Newton iteration limit for the row-sum projection.
const ROW_SUM_NEWTON_ITERS: usize = 100;
/// Row-sum residual accepted from the Newton iteration before falling back to
/// alternating sweeps.
const ROW_SUM_ACCEPT: f64 = 1e-9;

/// Exact projection onto `{diag(X) = 1, X >= 0, X 1 = (m + 1) 1}`.
///
/// The minimizer is `X_ij = max(Y_ij - u_i - u_j, 0)` off the diagonal, where
/// `u` maximizes the concave dual
/// `phi(u) = -sum_{i<j} max(Y_ij - u_i - u_j, 0)^2 - 2 m sum_i u_i`.
/// Semismooth Newton on `u` with the signless Laplacian of the active pairs and
/// a backtracking line search on `phi`.
fn project_row_sums(y: &Matrix, m: f64) -> Option<Matrix> {
    let n = y.n();
    let phi = |u: &[f64]| -> f64 {
        let mut v = -2.0 * m * u.iter().sum::<f64>();
        for i in 0..n {
            for j in (i + 1)..n {
                let x = (y[(i, j)] - u[i] - u[j]).max(0.0);
                v -= x * x;
            }
        }
        v
    };
    let row_residual = |u: &[f64]| -> f64 {
        (0..n)
            .map(|i| {
                let r: f64 = (0..n).filter(|&j| j != i).map(|j| (y[(i, j)] - u[i] - u[j]).max(0.0)).sum();
                (r - m).abs()
            })
            .fold(0.0, f64::max)
    };
    let tol = 4.0 * f64::EPSILON * n as f64 * (1.0 + m + y.max_abs());
    let mut u = vec![0.0; n];
    let mut value = phi(&u);
    let mut residual = f64::INFINITY;
    for _ in 0..ROW_SUM_NEWTON_ITERS {
        let mut f = vec![-m; n];
        let mut h = Matrix::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let x = y[(i, j)] - u[i] - u[j];
                if x > 0.0 {
                    f[i] += x;
                    f[j] += x;
                    h[(i, i)] += 1.0;
                    h[(j, j)] += 1.0;
                    h[(i, j)] = 1.0;
                    h[(j, i)] = 1.0;
                }
            }
        }
        residual = f.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
        if residual <= tol {
            break;
        }
        let damping = 1e-12 + 0.1 * residual.min(1.0);
        h.add_diag(&vec![damping; n]);
        let Some(delta) = h.solve_spd(&f) else { break };
        let slope: f64 = 2.0 * f.iter().zip(&delta).map(|(a, b)| a * b).sum::<f64>();
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, b)| a + t * b).collect();
            let v = phi(&trial);
            // Near the optimum the dual gain drowns in rounding; a halved
            // residual is accepted instead.
            if v >= value + 1e-4 * t * slope || row_residual(&trial) <= 0.5 * residual {
                u = trial;
                value = v;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if residual > ROW_SUM_ACCEPT * (1.0 + m) {
        return None;
    }
    Some(Matrix::from_fn(n, |i, j| if i == j { 1.0 } else { (y[(i, j)] - u[i] - u[j]).max(0.0) }))
}

fn set_unit_diag(x: &mut Matrix) {
    for i in 0..x.n() {
        x[(i, i)] = 1.0;
    }
}

fn add_off_diag(x: &mut Matrix, shift: f64) {
    let n = x.n();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                x[(i, j)] += shift;
            }
        }
    }
}

fn subtract_rank_two(x: &mut Matrix, mu: &[f64]) {
    let n = x.n();
    for i in 0..n {
        for j in 0..n {
            x[(i, j)] -= mu[i] + mu[j];
        }
    }
}

/// Project `y` onto the affine and entrywise constraints of `problem`
/// (everything except positive semidefiniteness).
pub fn project_constraints(problem: &SdpProblem, y: &Matrix) -> Result<Matrix> {
    if y.n() != problem.n() {
        return Err(Error::Shape { expected: problem.n(), got: y.n() });
    }
    Ok(Projector::new(problem)?.project(y))
}
