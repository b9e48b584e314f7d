//! Semidefinite relaxations for exact cluster recovery in stochastic and
//! censored block models.
//!
//! The crate covers the whole pipeline: seeded model generation
//! ([`models`]), closed-form recovery thresholds ([`thresholds`]), a dense
//! operator-splitting SDP solver with rounding ([`solver`]), dual certificates
//! that prove optimality of the planted solution ([`certify`]), a data-driven
//! penalty ([`adaptive`]), brute-force maximum-likelihood baselines
//! ([`oracle`]) and Monte Carlo experiment drivers ([`harness`]).

pub mod adaptive;
pub mod certify;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod models;
pub mod oracle;
pub mod solver;
pub mod thresholds;

pub use error::{Error, Result};
pub use matrix::Matrix;
