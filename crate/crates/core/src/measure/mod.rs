//! Volumes and areas behind every |E| bound: Monte Carlo, closed forms and
//! quadrature.

mod cones;
mod mc;
pub mod quadrature;
mod quadric;
mod shells;

use serde::{Deserialize, Serialize};

pub use cones::{cone_ball_constant, cone_cone_reference, cone_cone_volume, ConeBallResult, ConeConeBounds, ConeSpec};
pub use mc::{mc_volume, mc_volume_with, MC_CHUNK};
pub use quadric::{quadric_area, QuadricArea, QuadricKind, QuadricSurface, Regime, RegimeWindow, ThickPlane};
pub use shells::{slab_sphere_volume, sphere_sphere_volume, two_shell_volume, SphereSphere};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Mc,
    Quadrature,
}

/// A measured volume or area. `stderr` is zero exactly for exact values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub method: Method,
}

impl MeasureEstimate {
    pub fn exact(value: f64) -> Self {
        MeasureEstimate { value: value.max(0.0), stderr: 0.0, n_samples: 0, method: Method::Exact }
    }

    /// |self − reference| ≤ k·stderr (plus a relative floor for exact comparisons).
    pub fn agrees_with(&self, reference: f64, k: f64) -> bool {
        (self.value - reference).abs() <= k * self.stderr + 1e-12 * reference.abs().max(1e-300)
    }
}
