use serde::{Deserialize, Serialize};

use super::quadrature::GaussLegendre;
use super::shells::two_shell_volume;
use super::{mc_volume, MeasureEstimate};
use crate::error::{ensure, Result};
use crate::geometry::{Region, Sign, SpacetimePoint, Vec3};

/// (±, N, L) for one thickened cone K±_{N,L}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub sign: Sign,
    pub n: f64,
    pub l: f64,
}

impl ConeSpec {
    pub fn new(sign: Sign, n: f64, l: f64) -> Self {
        ConeSpec { sign, n, l }
    }

    pub fn region(&self) -> Region {
        Region::thick_cone(self.sign, self.n, self.l)
    }

    /// Radii |ξ| allowed at time τ, as an interval (possibly empty).
    fn radii(&self, tau: f64) -> (f64, f64) {
        let c = self.sign.value() * tau;
        ((c - self.l).max(self.n / 2.0).max(0.0), (c + self.l).min(self.n))
    }
}

/// The candidate bounds for |K₁ ∩ (X₀ − K₂)|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeConeBounds {
    /// N²L², reported only when both cones share N and L.
    pub equal_case: Option<f64>,
    /// N₁²L₁L₂.
    pub n1_sq_l1_l2: f64,
    /// N₁³ min(L₁, L₂), the large-L fallback.
    pub n1_cubed_lmin: f64,
}

impl ConeConeBounds {
    fn new(a: ConeSpec, b: ConeSpec) -> Self {
        ConeConeBounds {
            equal_case: (a.n == b.n && a.l == b.l).then_some(a.n * a.n * a.l * a.l),
            n1_sq_l1_l2: a.n * a.n * a.l * b.l,
            n1_cubed_lmin: a.n.powi(3) * a.l.min(b.l),
        }
    }

    pub fn min_applicable(&self) -> f64 {
        self.equal_case.unwrap_or(f64::INFINITY).min(self.n1_sq_l1_l2).min(self.n1_cubed_lmin)
    }
}

fn validate(a: &ConeSpec) -> Result<()> {
    ensure!(a.n > 0.0 && a.l > 0.0, Domain, "cone parameters must be positive: {a:?}");
    Ok(())
}

/// Monte Carlo |K^{±₁}_{N₁,L₁} ∩ (X₀ − K^{±₂}_{N₂,L₂})| with the candidate bounds.
pub fn cone_cone_volume(
    a: ConeSpec,
    b: ConeSpec,
    x0: SpacetimePoint,
    n: u64,
    seed: u64,
) -> Result<(MeasureEstimate, ConeConeBounds)> {
    validate(&a)?;
    validate(&b)?;
    let e = a.region().and(b.region().reflect().translate(x0));
    Ok((mc_volume(&e, n, seed)?, ConeConeBounds::new(a, b)))
}

/// The same volume by Fubini in τ: every τ-slice is an intersection of two
/// concentric-radius shells whose centres are |ξ₀| apart, integrated exactly,
/// and the τ integral is done by Gauss–Legendre on panels between the kinks.
pub fn cone_cone_reference(a: ConeSpec, b: ConeSpec, x0: SpacetimePoint) -> Result<f64> {
    validate(&a)?;
    validate(&b)?;
    let s = x0.xi.norm();
    let slice = |tau: f64| {
        let (a_lo, a_hi) = a.radii(tau);
        let (b_lo, b_hi) = b.radii(x0.tau - tau);
        if a_hi <= a_lo || b_hi <= b_lo {
            0.0
        } else {
            two_shell_volume(a_lo, a_hi, b_lo, b_hi, s)
        }
    };

    // Radius endpoints as affine functions of τ: (constant, slope).
    let mut ends_a = vec![(a.n / 2.0, 0.0), (a.n, 0.0)];
    for l in [-a.l, a.l] {
        ends_a.push((l, a.sign.value()));
    }
    let mut ends_b = vec![(b.n / 2.0, 0.0), (b.n, 0.0)];
    for l in [-b.l, b.l] {
        ends_b.push((b.sign.value() * x0.tau + l, -b.sign.value()));
    }
    let mut cuts = Vec::new();
    let mut root = |c: f64, m: f64| {
        if m != 0.0 {
            cuts.push(-c / m);
        }
    };
    for &(c, m) in &ends_a {
        root(c, m);
        root(c - a.n / 2.0, m);
        root(c - a.n, m);
        for &(d, k) in &ends_b {
            root(c + d - s, m + k);
            root(c - d - s, m - k);
            root(c - d + s, m - k);
        }
    }
    for &(d, k) in &ends_b {
        root(d, k);
        root(d - b.n / 2.0, k);
        root(d - b.n, k);
    }
    let (lo, hi) = match a.sign {
        Sign::Plus => (a.n / 2.0 - a.l, a.n + a.l),
        Sign::Minus => (-a.n - a.l, -a.n / 2.0 + a.l),
    };
    cuts.push(lo);
    cuts.push(hi);
    cuts.retain(|t| t.is_finite() && *t >= lo && *t <= hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let gl = GaussLegendre::new(24);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (l, h) = (w[0], w[1]);
        if h - l <= 0.0 {
            continue;
        }
        // Four sub-panels per kink interval keeps the error far below MC noise.
        let m = 4;
        for i in 0..m {
            let pl = l + (h - l) * i as f64 / m as f64;
            let ph = l + (h - l) * (i + 1) as f64 / m as f64;
            total += gl.integrate(pl, ph, slice);
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConeBallResult {
    /// Largest volume over the X₀ stencil.
    pub estimate: MeasureEstimate,
    /// The X₀ attaining it.
    pub x0: SpacetimePoint,
    /// rNL².
    pub bound: f64,
}

/// Volume of E = A ∩ (X₀ − A) with A = K±_{N,L} ∩ (ℝ × B), B = B(center, r),
/// maximised over a stencil of X₀ around the sumset centre (2(±|c|), 2c).
pub fn cone_ball_constant(
    sign: Sign,
    n: f64,
    l: f64,
    r: f64,
    center: Vec3,
    samples: u64,
    seed: u64,
) -> Result<ConeBallResult> {
    ensure!(n > 0.0 && l > 0.0 && r > 0.0, Domain, "N, L, r must be positive");
    ensure!(r <= n / 8.0, Precondition, "ball radius {r} exceeds N/8 = {}", n / 8.0);
    let a = Region::thick_cone(sign, n, l).and(Region::ball(center, r));
    let axis = center.normalized().unwrap_or(Vec3::E1);
    let tau_c = 2.0 * sign.value() * center.norm();
    let mut best: Option<(MeasureEstimate, SpacetimePoint)> = None;
    let mut k = 0u64;
    for dt in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        for dx in [-0.25, 0.0, 0.25] {
            let x0 = SpacetimePoint::new(tau_c + dt * l, center * 2.0 + axis * (dx * r));
            let e = a.clone().and(a.clone().reflect().translate(x0));
            let est = mc_volume(&e, samples, seed.wrapping_add(k))?;
            k += 1;
            if best.map_or(true, |(b, _)| est.value > b.value) {
                best = Some((est, x0));
            }
        }
    }
    let (estimate, x0) = best.expect("stencil is nonempty");
    Ok(ConeBallResult { estimate, x0, bound: r * n * l * l })
}
