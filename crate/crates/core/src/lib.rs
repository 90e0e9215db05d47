//! Benchmarking framework for algorithm selection on continuous black-box
//! optimization problems.
//!
//! The crate implements the full pipeline: a 24-class problem suite with
//! seeded instances ([`suite`]), a five-algorithm optimizer portfolio
//! ([`portfolio`]), landscape feature extractors ([`features`]), performance
//! targets ([`metrics`]), random-forest meta-models ([`models`]), and the
//! evaluation protocols plus the two headline audits ([`eval`]): the
//! leave-instance-out leakage audit and the scale-sensitivity audit.
//!
//! Everything is deterministic given a master seed: per-task seeds are
//! derived with [`rng::mix`], so results are independent of execution order
//! and parallelism degree.

pub mod acceptance;
pub mod error;
pub mod eval;
pub mod features;
pub mod io;
pub mod metrics;
pub mod models;
pub mod pipeline;
pub mod portfolio;
pub mod rng;
pub mod stats;
pub mod suite;

pub use error::{Error, Result};
