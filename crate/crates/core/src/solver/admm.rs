//! Over-relaxed ADMM splitting `X` (PSD cone) from `Z` (affine/box set).

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::anderson::Anderson;
use super::problem::SdpProblem;
use super::projection::{project_psd, Projector};
use crate::error::{domain, Result};
use crate::matrix::Matrix;
use crate::models::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Bound on `||X - Z||_F`.
    pub tol_primal: f64,
    /// Bound on `step * ||Z_k - Z_{k-1}||_F / max(1, ||C||_F)`.
    pub tol_dual: f64,
    /// Splitting penalty for the objective rescaled to unit Frobenius norm;
    /// `None` means `1 / sqrt(n)`.
    pub step: Option<f64>,
    /// Rebalance the penalty when one residual dominates the other.
    pub adaptive_step: bool,
    pub over_relax: f64,
    /// Anderson acceleration memory; `0` runs the plain iteration.
    pub anderson_memory: usize,
    pub seed: u64,
    /// Perturb the starting point with seeded noise.
    pub restart: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            tol_primal: 1e-6,
            tol_dual: 1e-6,
            step: None,
            adaptive_step: false,
            over_relax: 1.5,
            anderson_memory: 10,
            seed: 0,
            restart: false,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return domain("max_iter must be at least 1");
        }
        if !(self.tol_primal > 0.0 && self.tol_dual > 0.0) {
            return domain("tolerances must be positive");
        }
        if !(1.0..=1.8).contains(&self.over_relax) {
            return domain(format!("over_relax must lie in [1, 1.8], got {}", self.over_relax));
        }
        if let Some(s) = self.step {
            if !(s > 0.0 && s.is_finite()) {
                return domain(format!("step must be positive, got {s}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// The constraint-side iterate, feasible up to projection accuracy.
    pub x: Matrix,
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iters: usize,
    pub converged: bool,
    /// Penalty in effect at termination, on the scale of the original objective.
    pub step: f64,
}

const BALANCE_RATIO: f64 = 10.0;
const BALANCE_EVERY: usize = 10;

struct Splitting<'a> {
    c: &'a Matrix,
    projector: Projector,
    alpha: f64,
}

struct Outcome {
    z: Matrix,
    u: Matrix,
    primal: f64,
    dz: f64,
}

impl Splitting<'_> {
    /// One over-relaxed ADMM pass from `(z, u)` with penalty `rho`.
    fn apply(&self, z: &Matrix, u: &Matrix, rho: f64) -> Outcome {
        let mut v = z.clone();
        v.axpy(-1.0, u);
        v.axpy(1.0 / rho, self.c);
        let x = project_psd(&v);
        let mut relaxed = x.clone();
        relaxed.scale(self.alpha);
        relaxed.axpy(1.0 - self.alpha, z);
        let mut target = relaxed.clone();
        target.axpy(1.0, u);
        let z_new = self.projector.project(&target);
        let mut u_new = u.clone();
        u_new.axpy(1.0, &relaxed);
        u_new.axpy(-1.0, &z_new);
        let primal = x.frobenius_diff(&z_new);
        let dz = z_new.frobenius_diff(z);
        Outcome { z: z_new, u: u_new, primal, dz }
    }
}

fn pack(z: &Matrix, u: &Matrix) -> Vec<f64> {
    let mut w = Vec::with_capacity(2 * z.as_slice().len());
    w.extend_from_slice(z.as_slice());
    w.extend_from_slice(u.as_slice());
    w
}

fn unpack(w: &[f64], n: usize) -> (Matrix, Matrix) {
    let (a, b) = w.split_at(n * n);
    let mut z = Matrix::from_row_major(n, a.to_vec()).expect("packed state has n^2 entries");
    let mut u = Matrix::from_row_major(n, b.to_vec()).expect("packed state has n^2 entries");
    z.symmetrize();
    u.symmetrize();
    (z, u)
}

/// Solve `problem` to the requested accuracy. Reaching `max_iter` is reported
/// through `converged = false`, not as an error.
pub fn solve(problem: &SdpProblem, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    let n = problem.n();
    let c = &problem.objective;
    let c_norm = c.frobenius().max(1.0);
    let split = Splitting { c, projector: Projector::new(problem)?, alpha: opts.over_relax };
    let mut rho = opts.step.unwrap_or(1.0 / (n.max(1) as f64).sqrt()) * c_norm;

    let mut start = if let Some(v) = problem.j_inner {
        Matrix::filled(n, v / (n * n) as f64)
    } else if let Some(k) = problem.rowsum {
        Matrix::filled(n, k / n as f64)
    } else {
        Matrix::identity(n)
    };
    if opts.restart {
        let mut rng = rng_from_seed(opts.seed);
        let mut noise = Matrix::from_fn(n, |_, _| rng.gen_range(-1e-2..1e-2));
        noise.symmetrize();
        start.axpy(1.0, &noise);
    }
    let mut z = split.projector.project(&start);
    let mut u = Matrix::zeros(n);
    let mut best = z.clone();
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);
    let mut iters = 0;
    let mut converged = false;
    let mut anderson = Anderson::new(opts.anderson_memory);
    // Plain successor of the last accepted point, kept in case an
    // extrapolated point turns out worse.
    let mut fallback: Option<(Matrix, Matrix, f64)> = None;

    while iters < opts.max_iter {
        iters += 1;
        let out = split.apply(&z, &u, rho);
        primal = out.primal;
        dual = rho * out.dz / c_norm;
        let w = pack(&z, &u);
        let tw = pack(&out.z, &out.u);
        let g: Vec<f64> = tw.iter().zip(&w).map(|(a, b)| a - b).collect();
        let g_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        best = out.z.clone();
        if primal <= opts.tol_primal && dual <= opts.tol_dual {
            converged = true;
            break;
        }
        if let Some((fz, fu, f_norm)) = fallback.take() {
            if g_norm > f_norm {
                anderson.reset();
                z = fz;
                u = fu;
                continue;
            }
        }
        if opts.adaptive_step && iters % BALANCE_EVERY == 0 {
            let rel_primal = primal / out.z.frobenius().max(1.0);
            let rel_dual = out.dz / out.u.frobenius().max(f64::MIN_POSITIVE);
            let factor = if rel_primal > BALANCE_RATIO * rel_dual {
                2.0
            } else if rel_dual > BALANCE_RATIO * rel_primal {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                let mut u_scaled = out.u;
                u_scaled.scale(1.0 / factor);
                z = out.z;
                u = u_scaled;
                anderson.reset();
                continue;
            }
        }
        match anderson.step(&w, &g) {
            Some(next) => {
                let (nz, nu) = unpack(&next, n);
                fallback = Some((out.z, out.u, g_norm));
                z = nz;
                u = nu;
            }
            None => {
                z = out.z;
                u = out.u;
            }
        }
    }
    let objective = c.dot(&best);
    Ok(SolveResult { x: best, objective, primal_residual: primal, dual_residual: dual, iters, converged, step: rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{partition_to_matrix, Alphabet, Encoding, Graph, Partition};
    use crate::solver::problem::{build_sdp_binary, build_sdp_censored, build_sdp_multi};

    fn two_triangles() -> Graph {
        Graph::from_edges(6, Alphabet::ZeroOne, [(0, 1, 1), (0, 2, 1), (1, 2, 1), (3, 4, 1), (3, 5, 1), (4, 5, 1)])
            .unwrap()
    }

    #[test]
    fn two_triangles_binary() {
        let p = build_sdp_binary(&two_triangles(), 3).unwrap();
        let res = solve(&p, &SolveOptions { tol_primal: 1e-8, tol_dual: 1e-8, ..Default::default() }).unwrap();
        assert!(res.converged, "{res:?}");
        let truth = Partition::contiguous(&[3, 3], 6).unwrap();
        let y = partition_to_matrix(&truth, Encoding::Ybinary).unwrap().matrix;
        assert!(res.x.max_abs_diff(&y) <= 1e-4, "{}", res.x.max_abs_diff(&y));
        assert!((res.objective - 12.0).abs() < 1e-4);
    }

    #[test]
    fn noiseless_censored() {
        let truth = Partition::contiguous(&[3, 2], 5).unwrap();
        let s = truth.signs().unwrap();
        let mut g = Graph::empty(5, Alphabet::PlusMinusOne);
        for i in 0..5 {
            for j in (i + 1)..5 {
                g.set(i, j, (s[i] * s[j]) as i8).unwrap();
            }
        }
        let res = solve(&build_sdp_censored(&g).unwrap(), &SolveOptions::default()).unwrap();
        assert!(res.converged);
        assert!(res.x.max_abs_diff(&Matrix::outer(&s)) < 1e-4);
    }

    #[test]
    fn multi_feasibility() {
        let g = two_triangles();
        let opts = SolveOptions { tol_primal: 1e-6, tol_dual: 1e-6, ..Default::default() };
        let res = solve(&build_sdp_multi(&g, 3).unwrap(), &opts).unwrap();
        assert!(res.converged);
        let tol = 10.0 * opts.tol_primal;
        assert!(res.x.diag().iter().all(|d| (d - 1.0).abs() <= tol));
        assert!(res.x.row_sums().iter().all(|s| (s - 3.0).abs() <= tol * 6.0));
        assert!(res.x.min_entry() >= -tol);
        assert!(res.x.min_eigenvalue() >= -tol);
    }

    #[test]
    fn reports_non_convergence() {
        let p = build_sdp_binary(&two_triangles(), 3).unwrap();
        let res = solve(&p, &SolveOptions { max_iter: 2, ..Default::default() }).unwrap();
        assert!(!res.converged);
        assert_eq!(res.iters, 2);
    }

    #[test]
    fn rejects_bad_options() {
        let p = build_sdp_binary(&two_triangles(), 3).unwrap();
        assert!(solve(&p, &SolveOptions { over_relax: 2.0, ..Default::default() }).is_err());
        assert!(solve(&p, &SolveOptions { max_iter: 0, ..Default::default() }).is_err());
        assert!(solve(&p, &SolveOptions { tol_dual: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn deterministic() {
        let p = build_sdp_binary(&two_triangles(), 3).unwrap();
        let opts = SolveOptions { restart: true, seed: 9, ..Default::default() };
        assert_eq!(solve(&p, &opts).unwrap(), solve(&p, &opts).unwrap());
    }
}
