use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blocksdp::adaptive::{degree_profile_with, lambda_hat, SideMean};
use blocksdp::certify::{
    binary_certificate, censored_certificate, default_eta_star, general_certificate, multi_certificate, verify,
    DEFAULT_ETA_CONSTANT, DEFAULT_TOL_EIG, DEFAULT_TOL_NULL_PER_VERTEX,
};
use blocksdp::harness::{
    exponent_experiment, harness_solve_options, phase_sweep, spectral_norm_experiment, GridPoint, LambdaChoice, Method,
    SuccessCriterion, SweepConfig,
};
use blocksdp::models::io::{read_graph, read_partition, read_spec, write_graph, write_partition};
use blocksdp::models::{generate_with, GenerateOptions, Graph, ModelSpec, Partition, Variant, RNG_ALGORITHM};
use blocksdp::oracle::{ml_binary, ml_censored, ml_multi, swap_witness};
use blocksdp::solver::{
    build_sdp_binary, build_sdp_censored, build_sdp_general, build_sdp_general_penalized, build_sdp_multi,
    build_sdp_penalized, round_binary, round_multi, round_sizes, solve, SdpProblem, SolveOptions,
};
use blocksdp::thresholds::{binary_threshold, censored_report, general_report, multi_threshold};
use blocksdp::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Exit status when some solve stopped at its iteration cap.
const EXIT_NON_CONVERGED: u8 = 2;

#[derive(Parser)]
#[command(name = "blocksdp", version, about = "SDP recovery of planted clusters in block models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a planted partition and graph.
    Gen(GenArgs),
    /// Solve an SDP relaxation on a graph file.
    Solve(SolveArgs),
    /// Build and verify a dual certificate for a planted partition.
    Certify(CertifyArgs),
    /// Exhaustive maximum-likelihood search on a tiny graph.
    Oracle(OracleArgs),
    /// Evaluate the recovery threshold at a parameter point.
    Threshold(ThresholdArgs),
    /// Monte Carlo sweep over a parameter grid, written as CSV.
    Sweep(SweepArgs),
    /// Normalized spectral deviation of the adjacency matrix.
    Specnorm(SpecnormArgs),
    /// Monte Carlo estimate of a binomial-difference tail exponent.
    Exponent(ExponentArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// JSON model specification; overrides the individual flags.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    eps: Option<f64>,
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec> {
        if let Some(path) = &self.spec {
            return read_spec(path);
        }
        let missing = |what: &str| Error::InvalidSpec(format!("--{what} is required without --spec"));
        ModelSpec {
            n: self.n.ok_or_else(|| missing("n"))?,
            variant: self.variant.ok_or_else(|| missing("variant"))?,
            a: self.a.ok_or_else(|| missing("a"))?,
            b: self.b,
            rho: self.rho,
            r: self.r,
            sizes: self.sizes.clone(),
            epsilon: self.eps,
        }
        .validated()
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Permute vertices instead of the contiguous block layout.
    #[arg(long)]
    shuffle: bool,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    partition: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SdpKind {
    Binary,
    Penalized,
    Multi,
    Censored,
    General,
    GeneralPen,
}

#[derive(Args)]
struct SolverFlags {
    #[arg(long)]
    max_iter: Option<usize>,
    /// Primal and dual residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    adaptive_step: bool,
    #[arg(long)]
    anderson: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start from a randomly perturbed point.
    #[arg(long)]
    restart: bool,
}

impl SolverFlags {
    fn options(&self) -> SolveOptions {
        let mut o = SolveOptions { seed: self.seed, restart: self.restart, ..SolveOptions::default() };
        if let Some(m) = self.max_iter {
            o.max_iter = m;
        }
        if let Some(t) = self.tol {
            o.tol_primal = t;
            o.tol_dual = t;
        }
        if let Some(m) = self.anderson {
            o.anderson_memory = m;
        }
        o.step = self.step;
        o.adaptive_step = self.adaptive_step;
        o
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    sdp: SdpKind,
    #[arg(long)]
    graph: PathBuf,
    /// Size of the first cluster (binary) or of every cluster (multi).
    #[arg(long)]
    k: Option<usize>,
    /// Number of clusters (multi).
    #[arg(long)]
    r: Option<usize>,
    /// Cluster sizes (general, general-pen rounding).
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Penalty: a number, or `auto` for the degree-based estimate.
    #[arg(long)]
    lambda: Option<String>,
    /// Divide side means by n instead of by the side count (with `--lambda auto`).
    #[arg(long)]
    literal_side_means: bool,
    /// Identity penalty (general-pen); defaults to 3 sqrt(log n).
    #[arg(long)]
    eta: Option<f64>,
    #[command(flatten)]
    solver: SolverFlags,
    /// SolveResult JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rounded partition destination.
    #[arg(long)]
    partition: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CertKind {
    Binary,
    Censored,
    Multi,
    General,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_enum)]
    variant: CertKind,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    /// Penalty `lambda` (binary, general).
    #[arg(long)]
    lambda: Option<f64>,
    /// Cross-cluster edge probability (multi).
    #[arg(long)]
    q: Option<f64>,
    /// Identity multiplier (general); defaults to 3 sqrt(log n).
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    tol_null: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL_EIG)]
    tol_eig: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Binary,
    Multi,
    Censored,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    sdp: OracleKind,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Planted partition for the single-swap failure witness.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// ML partition destination.
    #[arg(long)]
    partition: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdKind {
    Binary,
    Multi,
    Censored,
    General,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, value_enum)]
    variant: ThresholdKind,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: Option<f64>,
    /// Smaller cluster fraction (binary) or smallest fraction (general).
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep configuration; overrides the grid flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Option<SdpKind>,
    /// `oracle`, `auto` or a number (penalized method).
    #[arg(long, default_value = "oracle")]
    lambda: String,
    #[arg(long, default_value_t = 300)]
    n: usize,
    #[arg(long, value_delimiter = ',')]
    a: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    b: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 25)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[arg(long, value_enum, default_value = "rounded-match")]
    criterion: CriterionArg,
    /// CSV destination for per-trial records.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    RoundedMatch,
    CertificateValid,
    Both,
}

#[derive(Args)]
struct SpecnormArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExponentArgs {
    #[arg(long)]
    rho1: f64,
    #[arg(long)]
    rho2: f64,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [256usize, 512, 1024, 2048])]
    n: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidSpec(format!("--{flag} is required here")))
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn parse_lambda(text: &str, graph: &Graph, literal: bool) -> Result<f64> {
    if text.eq_ignore_ascii_case("auto") {
        let side = if literal { SideMean::Literal } else { SideMean::Conditional };
        return lambda_hat(&degree_profile_with(graph, side)?, graph.n());
    }
    text.parse().map_err(|_| Error::Parse(format!("--lambda expects a number or 'auto', got '{text}'")))
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode> {
    let spec = args.model.spec()?;
    let (truth, graph) = generate_with(&spec, args.seed, GenerateOptions { shuffle: args.shuffle })?;
    fs::write(&args.graph, write_graph(&graph))?;
    fs::write(&args.partition, write_partition(&truth))?;
    eprintln!("generated n={} edges={} rng={RNG_ALGORITHM} seed={}", graph.n(), graph.edge_count(), args.seed);
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode> {
    let graph = read_graph(&args.graph)?;
    let n = graph.n();
    let sizes_of = |sizes: &Option<Vec<usize>>| -> Result<Vec<usize>> { require(sizes.clone(), "sizes") };
    let problem: SdpProblem = match args.sdp {
        SdpKind::Binary => build_sdp_binary(&graph, require(args.k, "k")?)?,
        SdpKind::Penalized => {
            let lambda = parse_lambda(&require(args.lambda.clone(), "lambda")?, &graph, args.literal_side_means)?;
            build_sdp_penalized(&graph, lambda)?
        }
        SdpKind::Multi => build_sdp_multi(&graph, require(args.k, "k")?)?,
        SdpKind::Censored => build_sdp_censored(&graph)?,
        SdpKind::General => {
            let sizes = sizes_of(&args.sizes)?;
            build_sdp_general(&graph, sizes.iter().sum(), sizes.iter().map(|k| k * k).sum())?
        }
        SdpKind::GeneralPen => {
            let eta = args.eta.unwrap_or_else(|| default_eta_star(n, DEFAULT_ETA_CONSTANT));
            let lambda = parse_lambda(&require(args.lambda.clone(), "lambda")?, &graph, args.literal_side_means)?;
            build_sdp_general_penalized(&graph, eta, lambda)?
        }
    };
    let res = solve(&problem, &args.solver.options())?;
    emit_json(&res, args.out.as_deref())?;
    if let Some(path) = &args.partition {
        let rounded: Partition = match args.sdp {
            SdpKind::Binary => round_binary(&res.x, args.k),
            SdpKind::Penalized | SdpKind::Censored => round_binary(&res.x, None),
            SdpKind::Multi => {
                let k = require(args.k, "k")?;
                round_multi(&res.x, args.r.unwrap_or(n / k.max(1)), k)
            }
            SdpKind::General | SdpKind::GeneralPen => round_sizes(&res.x, &sizes_of(&args.sizes)?),
        };
        fs::write(path, write_partition(&rounded))?;
    }
    if !res.converged {
        eprintln!("solver stopped at the iteration cap after {} iterations", res.iters);
        return Ok(ExitCode::from(EXIT_NON_CONVERGED));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(args: &CertifyArgs) -> Result<ExitCode> {
    let graph = read_graph(&args.graph)?;
    let truth = read_partition(&args.partition)?;
    let n = graph.n();
    let cert = match args.variant {
        CertKind::Binary => binary_certificate(&graph, &truth, require(args.lambda, "lambda")?)?,
        CertKind::Censored => censored_certificate(&graph, &truth)?,
        CertKind::Multi => multi_certificate(&graph, &truth, require(args.q, "q")?)?,
        CertKind::General => {
            let eta = args.eta.unwrap_or_else(|| default_eta_star(n, DEFAULT_ETA_CONSTANT));
            general_certificate(&graph, &truth, eta, require(args.lambda, "lambda")?)?
        }
    };
    let tol_null = args.tol_null.unwrap_or(DEFAULT_TOL_NULL_PER_VERTEX * n as f64);
    emit_json(&verify(&cert, tol_null, args.tol_eig), None)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OracleOutput {
    ml: blocksdp::oracle::MlResult,
    witness: Option<blocksdp::oracle::SwapReport>,
}

fn cmd_oracle(args: &OracleArgs) -> Result<ExitCode> {
    let graph = read_graph(&args.graph)?;
    let ml = match args.sdp {
        OracleKind::Binary => ml_binary(&graph, require(args.k, "k")?)?,
        OracleKind::Censored => ml_censored(&graph)?,
        OracleKind::Multi => ml_multi(&graph, require(args.r, "r")?, require(args.k, "k")?)?,
    };
    let witness = match &args.truth {
        Some(path) => Some(swap_witness(&graph, &read_partition(path)?)?),
        None => None,
    };
    if let Some(path) = &args.partition {
        fs::write(path, write_partition(&ml.best))?;
    }
    emit_json(&OracleOutput { ml, witness }, None)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_threshold(args: &ThresholdArgs) -> Result<ExitCode> {
    let b = || require(args.b, "b");
    let report = match args.variant {
        ThresholdKind::Binary => binary_threshold(args.rho.unwrap_or(0.5), args.a, b()?)?,
        ThresholdKind::Multi => multi_threshold(require(args.r, "r")?, args.a, b()?)?,
        ThresholdKind::Censored => censored_report(args.a, args.eps.unwrap_or(0.0))?,
        ThresholdKind::General => general_report(args.a, b()?, require(args.rho, "rho")?)?,
    };
    emit_json(&report, None)?;
    Ok(ExitCode::SUCCESS)
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig> {
    if let Some(path) = &args.config {
        return Ok(serde_json::from_str(&fs::read_to_string(path)?)?);
    }
    let method = match require(args.method, "method")? {
        SdpKind::Binary => Method::Binary,
        SdpKind::Penalized => Method::Penalized(match args.lambda.to_ascii_lowercase().as_str() {
            "oracle" => LambdaChoice::Oracle,
            "auto" => LambdaChoice::Auto,
            other => LambdaChoice::Fixed(
                other
                    .parse()
                    .map_err(|_| Error::Parse(format!("--lambda expects oracle, auto or a number, got '{other}'")))?,
            ),
        }),
        SdpKind::Multi => Method::Multi,
        SdpKind::Censored => Method::Censored,
        SdpKind::General => Method::General,
        SdpKind::GeneralPen => Method::general_penalized(),
    };
    let opt_list = |v: &[f64]| if v.is_empty() { vec![None] } else { v.iter().copied().map(Some).collect() };
    let mut grid = Vec::new();
    for &a in &args.a {
        for b in opt_list(&args.b) {
            for eps in opt_list(&args.eps) {
                grid.push(GridPoint { a, b, rho: args.rho, r: args.r, eps });
            }
        }
    }
    Ok(SweepConfig {
        method,
        n: args.n,
        grid,
        sizes: args.sizes.clone(),
        trials: args.trials,
        seed_base: args.seed_base,
        solver: harness_solve_options(),
        criterion: match args.criterion {
            CriterionArg::RoundedMatch => SuccessCriterion::RoundedMatch,
            CriterionArg::CertificateValid => SuccessCriterion::CertificateValid,
            CriterionArg::Both => SuccessCriterion::Both,
        },
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode> {
    let config = sweep_config(args)?;
    config.validate()?;
    let mut writer = csv::Writer::from_path(&args.out)?;
    let res = phase_sweep(&config, Some(&mut writer))?;
    emit_json(&res.summaries, None)?;
    if res.any_non_converged() {
        eprintln!("some solves stopped at the iteration cap");
        return Ok(ExitCode::from(EXIT_NON_CONVERGED));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_specnorm(args: &SpecnormArgs) -> Result<ExitCode> {
    emit_json(&spectral_norm_experiment(&args.model.spec()?, args.trials, args.seed)?, None)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_exponent(args: &ExponentArgs) -> Result<ExitCode> {
    let rep = exponent_experiment(args.rho1, args.rho2, args.a, args.b, args.alpha, &args.n, args.samples, args.seed)?;
    emit_json(&rep, None)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Specnorm(a) => cmd_specnorm(a),
        Command::Exponent(a) => cmd_exponent(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
