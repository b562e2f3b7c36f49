//! Rank-based ξ correlation and XI-SIS marginal feature screening.
//!
//! The crate is split by concern:
//!
//! - [`rankcorr`]: the ξ estimator (tie-aware rank counts), its population
//!   value on finite-support joints, and the binary-response statistic.
//! - [`baselines`]: competing marginal utilities (absolute Pearson, distance
//!   correlation, point-biserial).
//! - [`screening`]: scoring every column of a [`screening::DataMatrix`] and
//!   selecting by top-d or by threshold.
//! - [`simgen`]: AR(1) Gaussian designs, the M1–M4 generative models, and the
//!   replicated screening harness.
//! - [`evalkit`]: K-fold plans, CV prediction error, and classification metrics.
//!
//! All randomness is seeded explicitly; see [`seeding`].

pub mod baselines;
pub mod error;
pub mod evalkit;
pub mod rankcorr;
pub mod screening;
pub mod seeding;
pub mod simgen;

pub use error::{Error, Result};
pub use rankcorr::Sample;
