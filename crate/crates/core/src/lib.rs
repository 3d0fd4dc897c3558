//! Numerical laboratory for bilinear L² restriction estimates on the
//! thickened wave cone in 1+3 dimensions.
//!
//! The crate builds the geometric sets, direction nets, volume oracles and
//! discrete Fourier-side fields needed to test each estimate, and the
//! harness that checks empirical ratios against calibrated fixtures.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimate;
pub mod exec;
pub mod fixtures;
pub mod geometry;
pub mod measure;
pub mod spectral;
pub mod sphere_net;
pub mod suites;

pub use error::{Error, Result};

/// Crate version, stamped into every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
