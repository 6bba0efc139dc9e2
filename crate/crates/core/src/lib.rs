//! Instance generation for box-constrained bi-objective benchmarks.
//!
//! Base problems (ZDT, DTLZ, MMF) are evaluated on the unit cube and composed
//! with bijective cube-to-cube transformations of the search space (Beta-CDF
//! warping, sphered rotation) and of the objective space (Beta-CDF warping of
//! the unit region). Optimizers only see the transformed instance, while all
//! indicators are computed on the original objective values.

pub mod algorithms;
pub mod error;
pub mod harness;
pub mod indicators;
pub mod instance;
pub mod problems;
pub mod specfun;
pub mod transforms;

pub use error::{Error, Result};

/// A pair of objective values, both minimized.
pub type Objectives = [f64; 2];

/// Version string stamped into every emitted row.
pub const VERSION: &str = concat!("moinst-", env!("CARGO_PKG_VERSION"));
