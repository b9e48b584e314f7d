//! Monte Carlo experiment driver.

mod experiments;
mod sweep;
mod trial;

pub use experiments::{
    exponent_experiment, least_squares, spectral_norm_experiment, ExponentPoint, ExponentReport, SpecNormStats,
};
pub use sweep::{
    phase_sweep, read_records, summarize, trial_seed, wilson_interval, write_records, GridPoint, PointSummary,
    SuccessCriterion, SweepConfig, SweepResult, POINT_SEED_STRIDE,
};
pub use trial::{
    harness_solve_options, point_margin, run_trial, LambdaChoice, Method, TrialPoint, TrialRecord, RECOVERY_TOLERANCE,
};
