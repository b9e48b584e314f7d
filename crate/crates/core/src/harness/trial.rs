//! A single generate, solve, round, certify trial.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::adaptive::{degree_profile, lambda_hat};
use crate::certify::{
    binary_certificate, censored_certificate, default_eta_star, general_certificate, multi_certificate, verify_default,
    DEFAULT_ETA_CONSTANT,
};
use crate::error::{domain, Result};
use crate::matrix::Matrix;
use crate::models::{
    exact_match, expected_adjacency, generate, partition_to_matrix, EdgeLaw, Encoding, Graph, ModelSpec, Partition,
    Variant,
};
use crate::solver::{
    build_sdp_binary, build_sdp_censored, build_sdp_general, build_sdp_general_penalized, build_sdp_multi,
    build_sdp_penalized, round_binary, round_multi, round_sizes, solve, SdpProblem, SolveOptions,
};
use crate::thresholds::{binary_threshold, censored_report, general_report, multi_threshold, solve_psi, tau};

/// Largest entrywise distance from the planted matrix still counted as recovery.
pub const RECOVERY_TOLERANCE: f64 = 0.1;

/// Source of the penalty for the size-free two-cluster relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaChoice {
    /// `tau(a, b) log n / n` from the model parameters.
    Oracle,
    /// Degree-based estimate.
    Auto,
    Fixed(f64),
}

/// Which relaxation a trial solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Binary,
    Penalized(LambdaChoice),
    Multi,
    Censored,
    General,
    /// `eta = C sqrt(log n)` with the given constant.
    GeneralPenalized {
        eta_constant: f64,
    },
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Binary => "binary",
            Method::Penalized(_) => "penalized",
            Method::Multi => "multi",
            Method::Censored => "censored",
            Method::General => "general",
            Method::GeneralPenalized { .. } => "general-pen",
        }
    }

    /// The model family the relaxation is designed for.
    pub fn variant(self) -> Variant {
        match self {
            Method::Binary | Method::Penalized(_) => Variant::BinaryAsym,
            Method::Multi => Variant::MultiEqual,
            Method::Censored => Variant::Censored,
            Method::General | Method::GeneralPenalized { .. } => Variant::GeneralOutliers,
        }
    }

    pub fn general_penalized() -> Self {
        Method::GeneralPenalized { eta_constant: DEFAULT_ETA_CONSTANT }
    }
}

/// One grid point: a model and the relaxation applied to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPoint {
    pub spec: ModelSpec,
    pub method: Method,
}

impl TrialPoint {
    pub fn new(spec: ModelSpec, method: Method) -> Result<Self> {
        spec.validate()?;
        if spec.variant != method.variant() {
            return domain(format!("method '{}' does not apply to {} models", method.name(), spec.variant));
        }
        Ok(Self { spec, method })
    }
}

/// Outcome of one trial; also a CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub variant: String,
    pub n: usize,
    pub a: f64,
    pub b: Option<f64>,
    pub rho: Option<f64>,
    pub r: Option<usize>,
    pub eps: Option<f64>,
    pub seed: u64,
    /// Rounded partition matches, the solution is within
    /// [`RECOVERY_TOLERANCE`] of the planted matrix, and the solver converged.
    pub recovered: bool,
    pub cert_valid: bool,
    pub iters: usize,
    pub seconds: f64,
    /// Threshold margin of the point; positive means recoverable. `NaN` where
    /// the threshold formula is undefined.
    pub margin: f64,
    pub converged: bool,
    pub rounded_match: bool,
}

/// Solver settings used by sweeps: loose enough to finish `n = 300` in
/// seconds, tight enough for the recovery tolerance.
pub fn harness_solve_options() -> SolveOptions {
    SolveOptions { max_iter: 600, tol_primal: 1e-4, tol_dual: 1e-4, ..SolveOptions::default() }
}

/// Theoretical margin of a point, recomputed from the model parameters.
pub fn point_margin(point: &TrialPoint) -> f64 {
    let s = &point.spec;
    let b = s.b_or_zero();
    let report = match point.method {
        Method::Binary | Method::Penalized(_) => binary_threshold(s.rho.unwrap_or(0.5), s.a, b),
        Method::Multi => multi_threshold(s.num_clusters(), s.a, b),
        Method::Censored => censored_report(s.a, s.epsilon_or_zero()),
        Method::General | Method::GeneralPenalized { .. } => {
            let smallest = s.cluster_sizes().into_iter().min().unwrap_or(0);
            general_report(s.a, b, smallest as f64 / s.n as f64)
        }
    };
    report.map_or(f64::NAN, |r| r.margin)
}

/// `(b + 2 psi) log n / n`, the penalty of the general certificate.
fn general_lambda(spec: &ModelSpec) -> Result<f64> {
    let b = spec.b_or_zero();
    let psi = solve_psi(spec.a, b)?;
    Ok((b + 2.0 * psi) * spec.log_n() / spec.n as f64)
}

fn penalized_lambda(choice: LambdaChoice, spec: &ModelSpec, graph: &Graph) -> Result<f64> {
    match choice {
        LambdaChoice::Oracle => Ok(tau(spec.a, spec.b_or_zero())? * spec.log_n() / spec.n as f64),
        LambdaChoice::Auto => lambda_hat(&degree_profile(graph)?, graph.n()),
        LambdaChoice::Fixed(v) => Ok(v),
    }
}

struct Plan {
    problem: SdpProblem,
    cert: Result<crate::certify::Certificate>,
}

fn plan(point: &TrialPoint, truth: &Partition, graph: &Graph) -> Result<Plan> {
    let spec = &point.spec;
    let n = spec.n;
    let log_n = spec.log_n();
    Ok(match point.method {
        Method::Binary => {
            let k = truth.sizes()[0];
            let lambda = tau(spec.a, spec.b_or_zero()).map(|t| t * log_n / n as f64);
            Plan {
                problem: build_sdp_binary(graph, k)?,
                cert: lambda.and_then(|l| binary_certificate(graph, truth, l)),
            }
        }
        Method::Penalized(choice) => {
            let lambda = penalized_lambda(choice, spec, graph)?;
            Plan { problem: build_sdp_penalized(graph, lambda)?, cert: binary_certificate(graph, truth, lambda) }
        }
        Method::Multi => {
            let k = truth.sizes()[0];
            Plan { problem: build_sdp_multi(graph, k)?, cert: multi_certificate(graph, truth, spec.q()) }
        }
        Method::Censored => Plan { problem: build_sdp_censored(graph)?, cert: censored_certificate(graph, truth) },
        Method::General => {
            let sizes = truth.sizes();
            let sum_k: usize = sizes.iter().sum();
            let sum_k2: usize = sizes.iter().map(|k| k * k).sum();
            let mut noise = graph.to_matrix();
            noise.axpy(-1.0, &expected_adjacency(truth, EdgeLaw::of(spec)));
            let eta = noise.spectral_norm_sym();
            let cert = general_lambda(spec).and_then(|l| general_certificate(graph, truth, eta, l));
            Plan { problem: build_sdp_general(graph, sum_k, sum_k2)?, cert }
        }
        Method::GeneralPenalized { eta_constant } => {
            let eta = default_eta_star(n, eta_constant);
            let lambda = general_lambda(spec)?;
            Plan {
                problem: build_sdp_general_penalized(graph, eta, lambda)?,
                cert: general_certificate(graph, truth, eta, lambda),
            }
        }
    })
}

fn round(point: &TrialPoint, truth: &Partition, x: &Matrix) -> Partition {
    match point.method {
        Method::Binary => round_binary(x, Some(truth.sizes()[0])),
        Method::Penalized(_) | Method::Censored => round_binary(x, None),
        Method::Multi => round_multi(x, truth.r(), truth.sizes()[0]),
        Method::General | Method::GeneralPenalized { .. } => round_sizes(x, &truth.sizes()),
    }
}

fn planted_matrix(point: &TrialPoint, truth: &Partition) -> Result<Matrix> {
    let encoding = match point.method {
        Method::Binary | Method::Penalized(_) | Method::Censored => Encoding::Ybinary,
        _ => Encoding::Zmulti,
    };
    Ok(partition_to_matrix(truth, encoding)?.matrix)
}

/// Generate, solve, round and certify one instance. Solver non-convergence
/// yields `recovered = false` with `converged = false`; certificates whose
/// parameters are undefined at this point count as invalid.
pub fn run_trial(point: &TrialPoint, seed: u64, opts: &SolveOptions) -> Result<TrialRecord> {
    let started = Instant::now();
    let (truth, graph) = generate(&point.spec, seed)?;
    let Plan { problem, cert } = plan(point, &truth, &graph)?;
    let res = solve(&problem, opts)?;
    let estimate = round(point, &truth, &res.x);
    let rounded_match = exact_match(&estimate, &truth);
    let close = res.x.max_abs_diff(&planted_matrix(point, &truth)?) <= RECOVERY_TOLERANCE;
    let cert_valid = cert.map(|c| verify_default(&c).valid).unwrap_or(false);
    let s = &point.spec;
    Ok(TrialRecord {
        variant: point.method.name().to_string(),
        n: s.n,
        a: s.a,
        b: s.b,
        rho: s.rho,
        r: s.r,
        eps: s.epsilon,
        seed,
        recovered: rounded_match && close && res.converged,
        cert_valid,
        iters: res.iters,
        seconds: started.elapsed().as_secs_f64(),
        margin: point_margin(point),
        converged: res.converged,
        rounded_match,
    })
}
