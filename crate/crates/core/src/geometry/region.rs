use serde::{Deserialize, Serialize};

use super::vector::{Direction, Sign, SpacetimePoint, Vec3};
use crate::error::{ensure, Error, Result};

/// Closed interval, possibly infinite or empty (`lo > hi`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ALL: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    pub const EMPTY: Interval = Interval { lo: f64::INFINITY, hi: f64::NEG_INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn is_empty(self) -> bool {
        !(self.lo <= self.hi)
    }

    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn len(self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn intersect(self, o: Interval) -> Interval {
        Interval::new(self.lo.max(o.lo), self.hi.min(o.hi))
    }

    pub fn hull(self, o: Interval) -> Interval {
        if self.is_empty() {
            return o;
        }
        if o.is_empty() {
            return self;
        }
        Interval::new(self.lo.min(o.lo), self.hi.max(o.hi))
    }

    pub fn shift(self, d: f64) -> Interval {
        Interval::new(self.lo + d, self.hi + d)
    }

    pub fn negate(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

/// Axis-aligned bounds in (τ, ξ¹, ξ², ξ³). Unbounded directions are infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub tau: Interval,
    pub xi: [Interval; 3],
}

impl Bounds {
    pub const ALL: Bounds = Bounds { tau: Interval::ALL, xi: [Interval::ALL; 3] };

    fn spatial(lo: Vec3, hi: Vec3) -> Bounds {
        Bounds {
            tau: Interval::ALL,
            xi: [Interval::new(lo.x, hi.x), Interval::new(lo.y, hi.y), Interval::new(lo.z, hi.z)],
        }
    }

    fn cube(r: f64) -> Bounds {
        Bounds::spatial(Vec3::new(-r, -r, -r), Vec3::new(r, r, r))
    }

    pub fn xi_bounded(&self) -> bool {
        self.xi.iter().all(|i| i.is_finite() || i.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty() || self.xi.iter().any(|i| i.is_empty())
    }

    pub fn xi_lo(&self) -> Vec3 {
        Vec3::new(self.xi[0].lo, self.xi[1].lo, self.xi[2].lo)
    }

    pub fn xi_hi(&self) -> Vec3 {
        Vec3::new(self.xi[0].hi, self.xi[1].hi, self.xi[2].hi)
    }

    fn map(self, f: impl Fn(Interval, Interval) -> Interval, o: Bounds) -> Bounds {
        Bounds { tau: f(self.tau, o.tau), xi: [f(self.xi[0], o.xi[0]), f(self.xi[1], o.xi[1]), f(self.xi[2], o.xi[2])] }
    }
}

/// Whether a region constrains only ξ (and so lifts to a cylinder ℝ × A in
/// spacetime) or involves τ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dim {
    Space,
    Spacetime,
}

/// A query point for [`Region::contains`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Space(Vec3),
    Spacetime(SpacetimePoint),
}

impl From<Vec3> for Point {
    fn from(v: Vec3) -> Self {
        Point::Space(v)
    }
}

impl From<SpacetimePoint> for Point {
    fn from(p: SpacetimePoint) -> Self {
        Point::Spacetime(p)
    }
}

/// Geometric sets in ℝ³ or ℝ^{1+3}. Spatial variants act on the ξ part of a
/// spacetime point, i.e. they denote ℝ × A when queried in spacetime.
///
/// Boundaries are closed except the annulus convention N/2 < |ξ| ≤ N, and
/// ξ = 0 is excluded from every cone and sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    Ball {
        center: Vec3,
        radius: f64,
    },
    /// ΔB_N = {N/2 < |ξ| ≤ N}.
    Annulus {
        n: f64,
    },
    /// S_δ(r) = {r − δ ≤ |ξ| ≤ r + δ}.
    ThickSphere {
        r: f64,
        delta: f64,
    },
    /// K±_{N,L}: |−τ ± |ξ|| ≤ L and ξ ∈ ΔB_N.
    ThickCone {
        sign: Sign,
        n: f64,
        l: f64,
    },
    /// K±_{N,L,γ,ω}: K±_{N,L} with θ(±ξ, ω) ≤ γ.
    SectorCone {
        sign: Sign,
        n: f64,
        l: f64,
        gamma: f64,
        omega: Direction,
    },
    /// Γ_γ(ω) = {ξ ≠ 0 : θ(ξ, ω) ≤ γ}.
    Sector {
        omega: Direction,
        gamma: f64,
    },
    /// T_r(ω): distance from the axis ℝω at most r.
    Tube {
        r: f64,
        omega: Direction,
    },
    /// {ξ · ω ∈ [lo, hi]}.
    Slab {
        omega: Direction,
        lo: f64,
        hi: f64,
    },
    /// H_d(ω) = {|−τ + ξ·ω| ≤ d}.
    NullHyperplane {
        d: f64,
        omega: Direction,
    },
    /// {ξ ≠ 0 : θ(ξ, ω^⊥) ≥ α}.
    HalfSpaceCone {
        omega: Direction,
        alpha: f64,
    },
    /// {τ ∈ [lo, hi]}.
    TimeSlab {
        lo: f64,
        hi: f64,
    },
    Translate {
        region: Box<Region>,
        offset: SpacetimePoint,
    },
    /// −A.
    Reflect {
        region: Box<Region>,
    },
    /// Intersection; the empty list is everything.
    Intersect {
        regions: Vec<Region>,
    },
    /// Union; the empty list is nothing.
    Union {
        regions: Vec<Region>,
    },
}

/// θ(a, b) for nonzero a, b, in [0, π].
///
/// Computed as atan2(|a × b|, a·b), which agrees with the clamped arccos of
/// the normalized inner product but keeps full precision near 0 and π.
pub fn angle(a: Vec3, b: Vec3) -> Result<f64> {
    ensure!(!a.is_zero() && !b.is_zero(), Domain, "angle of a zero vector");
    Ok(angle_unchecked(a, b))
}

#[inline]
pub(crate) fn angle_unchecked(a: Vec3, b: Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// 𝔥 = −τ ± |ξ|.
pub fn hyperbolic_weight(x: SpacetimePoint, sign: Sign) -> f64 {
    -x.tau + sign.value() * x.xi.norm()
}

impl Region {
    pub fn ball(center: Vec3, radius: f64) -> Region {
        Region::Ball { center, radius }
    }

    pub fn thick_cone(sign: Sign, n: f64, l: f64) -> Region {
        Region::ThickCone { sign, n, l }
    }

    pub fn translate(self, offset: SpacetimePoint) -> Region {
        Region::Translate { region: Box::new(self), offset }
    }

    pub fn reflect(self) -> Region {
        Region::Reflect { region: Box::new(self) }
    }

    pub fn and(self, other: Region) -> Region {
        match self {
            Region::Intersect { mut regions } => {
                regions.push(other);
                Region::Intersect { regions }
            }
            r => Region::Intersect { regions: vec![r, other] },
        }
    }

    pub fn everything() -> Region {
        Region::Intersect { regions: Vec::new() }
    }

    pub fn dim(&self) -> Dim {
        match self {
            Region::Ball { .. }
            | Region::Annulus { .. }
            | Region::ThickSphere { .. }
            | Region::Sector { .. }
            | Region::Tube { .. }
            | Region::Slab { .. }
            | Region::HalfSpaceCone { .. } => Dim::Space,
            Region::ThickCone { .. }
            | Region::SectorCone { .. }
            | Region::NullHyperplane { .. }
            | Region::TimeSlab { .. } => Dim::Spacetime,
            Region::Translate { region, offset } => {
                if offset.tau != 0.0 {
                    Dim::Spacetime
                } else {
                    region.dim()
                }
            }
            Region::Reflect { region } => region.dim(),
            Region::Intersect { regions } | Region::Union { regions } => {
                regions.iter().map(Region::dim).max().unwrap_or(Dim::Space)
            }
        }
    }

    /// Checks parameter sanity (positive radii, finite values) recursively.
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, what: &str| -> Result<()> {
            ensure!(v > 0.0 && v.is_finite(), Domain, "{what} must be positive and finite, got {v}");
            Ok(())
        };
        match self {
            Region::Ball { center, radius } => {
                ensure!(center.is_finite(), Domain, "ball center not finite");
                ensure!(*radius >= 0.0 && radius.is_finite(), Domain, "ball radius {radius}");
            }
            Region::Annulus { n } => pos(*n, "N")?,
            Region::ThickSphere { r, delta } => {
                pos(*r, "r")?;
                pos(*delta, "delta")?;
            }
            Region::ThickCone { n, l, .. } => {
                pos(*n, "N")?;
                pos(*l, "L")?;
            }
            Region::SectorCone { n, l, gamma, .. } => {
                pos(*n, "N")?;
                pos(*l, "L")?;
                pos(*gamma, "gamma")?;
            }
            Region::Sector { gamma, .. } => pos(*gamma, "gamma")?,
            Region::Tube { r, .. } => pos(*r, "r")?,
            Region::Slab { lo, hi, .. } | Region::TimeSlab { lo, hi } => {
                ensure!(lo <= hi, Domain, "interval [{lo}, {hi}] is reversed");
            }
            Region::NullHyperplane { d, .. } => pos(*d, "d")?,
            Region::HalfSpaceCone { alpha, .. } => {
                ensure!(*alpha >= 0.0 && *alpha <= std::f64::consts::FRAC_PI_2, Domain, "alpha {alpha}");
            }
            Region::Translate { region, offset } => {
                ensure!(offset.is_finite(), Domain, "translation offset not finite");
                region.validate()?;
            }
            Region::Reflect { region } => region.validate()?,
            Region::Intersect { regions } | Region::Union { regions } => {
                for r in regions {
                    r.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Membership with dimension checking: spacetime regions reject plain
    /// spatial points.
    pub fn contains(&self, p: impl Into<Point>) -> Result<bool> {
        match p.into() {
            Point::Spacetime(x) => Ok(self.contains_spacetime(x)),
            Point::Space(xi) => {
                ensure!(self.dim() == Dim::Space, Usage, "spatial point queried against a spacetime region");
                Ok(self.contains_spacetime(SpacetimePoint::new(0.0, xi)))
            }
        }
    }

    /// Membership of a spacetime point. Spatial variants test ξ only.
    pub fn contains_spacetime(&self, p: SpacetimePoint) -> bool {
        let xi = p.xi;
        match self {
            Region::Ball { center, radius } => (xi - *center).norm2() <= radius * radius,
            Region::Annulus { n } => in_annulus(xi.norm(), *n),
            Region::ThickSphere { r, delta } => {
                let m = xi.norm();
                r - delta <= m && m <= r + delta
            }
            Region::ThickCone { sign, n, l } => {
                let m = xi.norm();
                in_annulus(m, *n) && (-p.tau + sign.value() * m).abs() <= *l
            }
            Region::SectorCone { sign, n, l, gamma, omega } => {
                let m = xi.norm();
                in_annulus(m, *n)
                    && (-p.tau + sign.value() * m).abs() <= *l
                    && angle_unchecked(xi * sign.value(), omega.vec()) <= *gamma
            }
            Region::Sector { omega, gamma } => !xi.is_zero() && angle_unchecked(xi, omega.vec()) <= *gamma,
            Region::Tube { r, omega } => {
                let w = omega.vec();
                (xi - w * xi.dot(w)).norm2() <= r * r
            }
            Region::Slab { omega, lo, hi } => {
                let s = xi.dot(omega.vec());
                *lo <= s && s <= *hi
            }
            Region::NullHyperplane { d, omega } => (-p.tau + xi.dot(omega.vec())).abs() <= *d,
            Region::HalfSpaceCone { omega, alpha } => {
                if xi.is_zero() {
                    return false;
                }
                let s = (xi.dot(omega.vec()).abs() / xi.norm()).min(1.0);
                s.asin() >= *alpha
            }
            Region::TimeSlab { lo, hi } => *lo <= p.tau && p.tau <= *hi,
            Region::Translate { region, offset } => region.contains_spacetime(p - *offset),
            Region::Reflect { region } => region.contains_spacetime(-p),
            Region::Intersect { regions } => regions.iter().all(|r| r.contains_spacetime(p)),
            Region::Union { regions } => regions.iter().any(|r| r.contains_spacetime(p)),
        }
    }

    /// Axis-aligned bounds; infinite where the region is unbounded.
    pub fn bounds(&self) -> Bounds {
        match self {
            Region::Ball { center, radius } => {
                let r = Vec3::new(*radius, *radius, *radius);
                Bounds::spatial(*center - r, *center + r)
            }
            Region::Annulus { n } => Bounds::cube(*n),
            Region::ThickSphere { r, delta } => Bounds::cube(r + delta),
            Region::ThickCone { sign, n, l } => Bounds { tau: cone_tau_range(*sign, *n, *l), ..Bounds::cube(*n) },
            Region::SectorCone { sign, n, l, gamma, omega } => {
                let axis = omega.vec() * sign.value();
                let mut b = Bounds { tau: cone_tau_range(*sign, *n, *l), ..Bounds::cube(*n) };
                for (i, e) in [Vec3::E1, Vec3::E2, Vec3::E3].into_iter().enumerate() {
                    let hi = cap_support(axis, e, *gamma, *n);
                    let lo = -cap_support(axis, -e, *gamma, *n);
                    b.xi[i] = Interval::new(lo, hi);
                }
                b
            }
            Region::Slab { omega, lo, hi } => {
                // Bounded along one axis when ω is ±e_i.
                let mut b = Bounds::ALL;
                let w = omega.vec().to_array();
                for (axis, wi) in b.xi.iter_mut().zip(w) {
                    if wi.abs() == 1.0 {
                        let iv = Interval::new(*lo, *hi);
                        *axis = if wi > 0.0 { iv } else { iv.negate() };
                    }
                }
                b
            }
            Region::Tube { .. }
            | Region::NullHyperplane { .. }
            | Region::HalfSpaceCone { .. }
            | Region::Sector { .. } => Bounds::ALL,
            Region::TimeSlab { lo, hi } => Bounds { tau: Interval::new(*lo, *hi), ..Bounds::ALL },
            Region::Translate { region, offset } => {
                let b = region.bounds();
                let o = offset.xi.to_array();
                Bounds {
                    tau: b.tau.shift(offset.tau),
                    xi: [b.xi[0].shift(o[0]), b.xi[1].shift(o[1]), b.xi[2].shift(o[2])],
                }
            }
            Region::Reflect { region } => {
                let b = region.bounds();
                Bounds { tau: b.tau.negate(), xi: [b.xi[0].negate(), b.xi[1].negate(), b.xi[2].negate()] }
            }
            Region::Intersect { regions } => {
                regions.iter().map(Region::bounds).fold(Bounds::ALL, |acc, b| acc.map(Interval::intersect, b))
            }
            Region::Union { regions } => {
                let empty = Bounds { tau: Interval::EMPTY, xi: [Interval::EMPTY; 3] };
                regions.iter().map(Region::bounds).fold(empty, |acc, b| acc.map(Interval::hull, b))
            }
        }
    }

    /// True when the region is bounded in every coordinate it constrains:
    /// ξ for spatial regions, (τ, ξ) for spacetime regions.
    pub fn is_bounded(&self) -> bool {
        let b = self.bounds();
        if b.is_empty() {
            return true;
        }
        b.xi_bounded() && (self.dim() == Dim::Space || b.tau.is_finite())
    }

    /// A superset of {τ : (τ, ξ) ∈ self} for fixed ξ. Exact for the convex
    /// variants; used only to prune convolution loops.
    pub fn tau_window(&self, xi: Vec3) -> Interval {
        match self {
            Region::ThickCone { sign, n, l } => {
                let m = xi.norm();
                if in_annulus(m, *n) {
                    Interval::new(sign.value() * m - l, sign.value() * m + l)
                } else {
                    Interval::EMPTY
                }
            }
            Region::SectorCone { sign, n, l, gamma, omega } => {
                let m = xi.norm();
                if in_annulus(m, *n) && angle_unchecked(xi * sign.value(), omega.vec()) <= *gamma {
                    Interval::new(sign.value() * m - l, sign.value() * m + l)
                } else {
                    Interval::EMPTY
                }
            }
            Region::NullHyperplane { d, omega } => {
                let s = xi.dot(omega.vec());
                Interval::new(s - d, s + d)
            }
            Region::TimeSlab { lo, hi } => Interval::new(*lo, *hi),
            Region::Translate { region, offset } => region.tau_window(xi - offset.xi).shift(offset.tau),
            Region::Reflect { region } => region.tau_window(-xi).negate(),
            Region::Intersect { regions } => {
                regions.iter().fold(Interval::ALL, |acc, r| acc.intersect(r.tau_window(xi)))
            }
            Region::Union { regions } => regions.iter().fold(Interval::EMPTY, |acc, r| acc.hull(r.tau_window(xi))),
            spatial => {
                if spatial.contains_spacetime(SpacetimePoint::new(0.0, xi)) {
                    Interval::ALL
                } else {
                    Interval::EMPTY
                }
            }
        }
    }

    /// Exact Lebesgue measure where a closed form is available.
    pub fn exact_measure(&self) -> Option<f64> {
        use std::f64::consts::PI;
        let ball = |r: f64| 4.0 / 3.0 * PI * r.max(0.0).powi(3);
        match self {
            Region::Ball { radius, .. } => Some(ball(*radius)),
            Region::Annulus { n } => Some(ball(*n) - ball(n / 2.0)),
            Region::ThickSphere { r, delta } => Some(ball(r + delta) - ball(r - delta)),
            // τ-fibres have length 2L over the annulus.
            Region::ThickCone { n, l, .. } => Some(2.0 * l * (ball(*n) - ball(n / 2.0))),
            Region::SectorCone { n, l, gamma, .. } => {
                let cap = 2.0 * PI * (1.0 - gamma.min(PI).cos()) / (4.0 * PI);
                Some(2.0 * l * cap * (ball(*n) - ball(n / 2.0)))
            }
            Region::Translate { region, .. } | Region::Reflect { region } => region.exact_measure(),
            _ => None,
        }
    }
}

#[inline]
pub(crate) fn in_annulus(m: f64, n: f64) -> bool {
    n / 2.0 < m && m <= n
}

fn cone_tau_range(sign: Sign, n: f64, l: f64) -> Interval {
    match sign {
        Sign::Plus => Interval::new(n / 2.0 - l, n + l),
        Sign::Minus => Interval::new(-n - l, -n / 2.0 + l),
    }
}

/// max of ξ·e over the spherical sector {N/2 < |ξ| ≤ N, θ(ξ, axis) ≤ γ}.
fn cap_support(axis: Vec3, e: Vec3, gamma: f64, n: f64) -> f64 {
    let c = (angle_unchecked(axis, e) - gamma).max(0.0).cos();
    if c >= 0.0 {
        n * c
    } else {
        n / 2.0 * c
    }
}

impl TryFrom<&str> for Region {
    type Error = Error;
    fn try_from(s: &str) -> Result<Self> {
        let r: Region = serde_json::from_str(s)?;
        r.validate()?;
        Ok(r)
    }
}
