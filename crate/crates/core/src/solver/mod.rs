//! Dense operator-splitting solver for the cluster-recovery SDPs and rounding
//! of its output to integral partitions.

mod admm;
mod anderson;
mod problem;
mod projection;
mod rounding;

pub use admm::{solve, SolveOptions, SolveResult};
pub use problem::{
    build_sdp_binary, build_sdp_censored, build_sdp_general, build_sdp_general_penalized, build_sdp_multi,
    build_sdp_penalized, DiagMode, SdpProblem,
};
pub use projection::{project_constraints, project_psd};
pub use rounding::{leading_eigenvector, round_binary, round_multi, round_sizes};
