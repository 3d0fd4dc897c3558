use std::f64::consts::PI;

use serde::Serialize;

use super::MeasureEstimate;
use crate::error::{ensure, Result};
use crate::geometry::Vec3;

/// |S_ε(ρ) ∩ {a < ξ¹ < b}| in closed form.
///
/// Slices of the shell perpendicular to ξ¹ are annuli of area
/// π([(ρ+ε)² − x²]₊ − [(ρ−ε)² − x²]₊); where both brackets are positive the
/// difference is exactly 4ρε, which is integrated separately so that the
/// interior case returns 4πρε(b − a) up to a single rounding.
pub fn slab_sphere_volume(rho: f64, eps: f64, a: f64, b: f64) -> Result<MeasureEstimate> {
    ensure!(rho > 0.0 && rho.is_finite(), Domain, "rho must be positive, got {rho}");
    ensure!(eps > 0.0 && eps <= rho / 4.0, Precondition, "need 0 < eps <= rho/4, got eps={eps}, rho={rho}");
    ensure!(a < b, Domain, "slab needs a < b, got [{a}, {b}]");
    let (inner, outer) = (rho - eps, rho + eps);
    let clip = |lo: f64, hi: f64| (a.max(lo), b.min(hi));

    let (l, h) = clip(-inner, inner);
    let mut v = if h > l { 4.0 * rho * eps * (h - l) } else { 0.0 };

    let cap = |x: f64| outer * outer * x - x * x * x / 3.0;
    for (lo, hi) in [(-outer, -inner), (inner, outer)] {
        let (l, h) = clip(lo, hi);
        if h > l {
            v += cap(h) - cap(l);
        }
    }
    Ok(MeasureEstimate::exact(PI * v))
}

/// Exact volume of {a_lo ≤ |ξ| ≤ a_hi} ∩ {b_lo ≤ |ξ − s·e| ≤ b_hi} for a unit e.
///
/// In coordinates x = ξ·e and u = |ξ − x e|², the intersection is
/// π ∫ len(x) dx with len(x) the length of an intersection of u-intervals whose
/// endpoints are quadratics in x with equal leading terms. Between the
/// breakpoints collected below len is one quadratic, so Simpson's rule is exact.
pub fn two_shell_volume(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64, s: f64) -> f64 {
    let a_lo = a_lo.max(0.0);
    let b_lo = b_lo.max(0.0);
    if a_hi <= a_lo || b_hi <= b_lo {
        return 0.0;
    }
    let s = s.abs();
    if s == 0.0 {
        let (lo, hi) = (a_lo.max(b_lo), a_hi.min(b_hi));
        return if hi > lo { 4.0 / 3.0 * PI * (hi.powi(3) - lo.powi(3)) } else { 0.0 };
    }
    let x_lo = (-a_hi).max(s - b_hi);
    let x_hi = a_hi.min(s + b_hi);
    if x_hi <= x_lo {
        return 0.0;
    }
    let len = |x: f64| {
        let xs = x - s;
        let hi = (a_hi * a_hi - x * x).min(b_hi * b_hi - xs * xs);
        let lo = (a_lo * a_lo - x * x).max(b_lo * b_lo - xs * xs).max(0.0);
        (hi - lo).max(0.0)
    };
    let mut cuts = vec![x_lo, x_hi, -a_lo, a_lo, s - b_lo, s + b_lo];
    for alpha in [a_lo * a_lo, a_hi * a_hi] {
        for beta in [b_lo * b_lo, b_hi * b_hi] {
            cuts.push((alpha - beta + s * s) / (2.0 * s));
        }
    }
    cuts.retain(|c| c.is_finite() && *c >= x_lo && *c <= x_hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut v = 0.0;
    for w in cuts.windows(2) {
        let (l, h) = (w[0], w[1]);
        if h > l {
            v += (h - l) / 6.0 * (len(l) + 4.0 * len(0.5 * (l + h)) + len(h));
        }
    }
    PI * v
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SphereSphere {
    /// Exact |S_δ(r) ∩ (ξ₀ + S_Δ(R))|.
    pub estimate: MeasureEstimate,
    /// rRδΔ / |ξ₀|.
    pub bound: f64,
    /// The slab reduction: membership forces ξ·ξ̂₀ into an interval of length
    /// 2(rδ + RΔ)/|ξ₀|; this is the volume of that slab cut from the shell with
    /// the smaller rδ product. Always at least the exact value.
    pub reduction: f64,
}

/// Volume of the intersection of two thickened spheres, with its bound.
pub fn sphere_sphere_volume(r: f64, delta: f64, big_r: f64, big_delta: f64, xi0: Vec3) -> Result<SphereSphere> {
    ensure!(r > 0.0 && big_r > 0.0, Domain, "radii must be positive");
    ensure!(delta > 0.0 && delta <= r / 4.0, Precondition, "need 0 < delta <= r/4");
    ensure!(big_delta > 0.0 && big_delta <= big_r / 4.0, Precondition, "need 0 < Delta <= R/4");
    ensure!(!xi0.is_zero(), Domain, "concentric shells (xi0 = 0) are excluded");
    let s = xi0.norm();
    let exact = two_shell_volume(r - delta, r + delta, big_r - big_delta, big_r + big_delta, s);

    let lo = ((r - delta).powi(2) - (big_r + big_delta).powi(2) + s * s) / (2.0 * s);
    let hi = ((r + delta).powi(2) - (big_r - big_delta).powi(2) + s * s) / (2.0 * s);
    let reduction = if r * delta <= big_r * big_delta {
        slab_sphere_volume(r, delta, lo, hi)?.value
    } else {
        slab_sphere_volume(big_r, big_delta, lo - s, hi - s)?.value
    };
    Ok(SphereSphere { estimate: MeasureEstimate::exact(exact), bound: r * big_r * delta * big_delta / s, reduction })
}
