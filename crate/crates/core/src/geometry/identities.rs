use serde::{Deserialize, Serialize};

use super::region::angle;
use super::vector::Vec3;
use crate::error::{ensure, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleIdentity {
    /// |a| + |b| − |a+b| against min(|a|,|b|) θ².
    Sum,
    /// |a−b| − ||a|−|b|| against |a||b| θ² / |a−b|.
    Difference,
}

/// Both sides of an angle comparability statement; the caller decides the window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Defect {
    pub lhs: f64,
    pub comparator: f64,
}

impl Defect {
    /// lhs / comparator, or `None` when both vanish (collinear inputs).
    pub fn ratio(self) -> Option<f64> {
        (self.comparator > 0.0).then(|| self.lhs / self.comparator)
    }
}

/// Evaluates the two sides of the sum or difference angle identity.
///
/// The left side is computed through the rationalized form
/// 2|a||b|(1 − cos θ)/(denominator) to avoid cancellation at small angles.
pub fn angle_identity_defect(a: Vec3, b: Vec3, which: AngleIdentity) -> Result<Defect> {
    let theta = angle(a, b)?;
    let (na, nb) = (a.norm(), b.norm());
    // 1 − cos θ = 2 sin²(θ/2), stable near θ = 0.
    let one_minus_cos = 2.0 * (theta / 2.0).sin().powi(2);
    match which {
        AngleIdentity::Sum => {
            let lhs = 2.0 * na * nb * one_minus_cos / (na + nb + (a + b).norm());
            Ok(Defect { lhs, comparator: na.min(nb) * theta * theta })
        }
        AngleIdentity::Difference => {
            let d = (a - b).norm();
            ensure!(d > 0.0, Domain, "difference identity needs a != b");
            let lhs = 2.0 * na * nb * one_minus_cos / (d + (na - nb).abs());
            Ok(Defect { lhs, comparator: na * nb * theta * theta / d })
        }
    }
}

/// Which half of the disk-rectangle containment lemma to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "part", rename_all = "snake_case")]
pub enum RectanglePart {
    /// Rectangle |ξ¹ − cos β cos θ| ≤ y, |ξ²| ≤ x for a chosen 0 < x ≤ sin θ.
    Bounded { x: f64 },
    /// Half-strip ξ¹ ≥ cos β cos θ − y, |ξ²| ≤ x with x fixed by β, θ; needs β < θ.
    Dipping,
}

/// Membership of `probe` in the lifted rectangle set and in the disk of
/// radius θ about ω₁ = (cos β, 0, sin β). The lemma asserts the first implies
/// the second.
///
/// Probes are normalized; probes with non-positive third component are never
/// in the rectangle set (it lives on the open upper hemisphere).
pub fn disk_contains_projected_rectangle(
    beta: f64,
    theta: f64,
    part: RectanglePart,
    probe: Vec3,
) -> Result<(bool, bool)> {
    use std::f64::consts::FRAC_PI_2;
    ensure!(beta > 0.0 && beta <= FRAC_PI_2, Domain, "beta {beta} outside (0, pi/2]");
    ensure!(theta > 0.0 && theta <= FRAC_PI_2, Domain, "theta {theta} outside (0, pi/2]");
    let e = probe.normalized().ok_or_else(|| crate::Error::Domain("probe must be nonzero".into()))?;
    let (sb, cb) = beta.sin_cos();
    let (st, ct) = theta.sin_cos();
    let omega1 = Vec3::new(cb, 0.0, sb);
    let in_disk = e.dot(omega1) >= ct;

    let in_rect = if e.z <= 0.0 || e.x * e.x + e.y * e.y >= 1.0 {
        false
    } else {
        match part {
            RectanglePart::Bounded { x } => {
                ensure!(x > 0.0 && x <= st, Domain, "x {x} outside (0, sin theta]");
                let y = sb * (st * st - x * x).max(0.0).sqrt();
                (e.x - cb * ct).abs() <= y && e.y.abs() <= x
            }
            RectanglePart::Dipping => {
                ensure!(beta < theta, Domain, "dipping part needs beta < theta");
                let x = (1.0 - (ct * ct) / (cb * cb)).max(0.0).sqrt();
                let y = sb * (st * st - x * x).max(0.0).sqrt();
                e.x >= cb * ct - y && e.y.abs() <= x
            }
        }
    };
    Ok((in_rect, in_disk))
}
