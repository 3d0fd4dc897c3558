use serde::{Deserialize, Serialize};

use super::quadrature::GaussLegendre;
use super::{MeasureEstimate, Method};
use crate::error::{ensure, Result};
use crate::geometry::Sign;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadricKind {
    Ellipsoid,
    HyperboloidSheet,
}

/// Ellipsoid y² + z² = (b/a)²(a² − x²) or one sheet of
/// y² + z² = (b/a)²(x² − a²), with a ball centred at the focus (±c, 0, 0).
/// For the hyperboloid the sheet is the one on the side of that focus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadricSurface {
    pub kind: QuadricKind,
    pub a: f64,
    pub b: f64,
    pub focus_sign: Sign,
}

impl QuadricSurface {
    pub fn new(kind: QuadricKind, a: f64, b: f64, focus_sign: Sign) -> Result<Self> {
        let s = QuadricSurface { kind, a, b, focus_sign };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.a.is_finite() && self.b > 0.0 && self.a >= self.b,
            Domain,
            "quadric needs a >= b > 0, got a={}, b={}",
            self.a,
            self.b
        );
        Ok(())
    }

    /// Focal distance.
    pub fn c(&self) -> f64 {
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        match self.kind {
            QuadricKind::Ellipsoid => (a2 - b2).max(0.0).sqrt(),
            QuadricKind::HyperboloidSheet => (a2 + b2).sqrt(),
        }
    }

    pub fn focus(&self) -> f64 {
        self.focus_sign.value() * self.c()
    }

    /// Profile radius f(x), zero outside the surface's x-range.
    pub fn profile(&self, x: f64) -> f64 {
        let k = self.b / self.a;
        match self.kind {
            QuadricKind::Ellipsoid => k * (self.a * self.a - x * x).max(0.0).sqrt(),
            QuadricKind::HyperboloidSheet => k * (x * x - self.a * self.a).max(0.0).sqrt(),
        }
    }

    /// f(x)√(1 + f′(x)²), in the cancellation-free form (b/a²)√|a⁴ ∓ c²x²|.
    fn area_density(&self, x: f64) -> f64 {
        let (a2, c) = (self.a * self.a, self.c());
        let s = match self.kind {
            QuadricKind::Ellipsoid => a2 * a2 - c * c * x * x,
            QuadricKind::HyperboloidSheet => c * c * x * x - a2 * a2,
        };
        self.b / a2 * s.max(0.0).sqrt()
    }

    /// x-range of the surface (the focus-side sheet for the hyperboloid).
    fn x_range(&self) -> (f64, f64) {
        match (self.kind, self.focus_sign) {
            (QuadricKind::Ellipsoid, _) => (-self.a, self.a),
            (QuadricKind::HyperboloidSheet, Sign::Plus) => (self.a, f64::INFINITY),
            (QuadricKind::HyperboloidSheet, Sign::Minus) => (f64::NEG_INFINITY, -self.a),
        }
    }

    /// Coefficients (α, β, γ) of f(x)² = αx² + βx + γ.
    fn profile_sq(&self) -> (f64, f64, f64) {
        let k2 = (self.b / self.a).powi(2);
        match self.kind {
            QuadricKind::Ellipsoid => (-k2, 0.0, self.b * self.b),
            QuadricKind::HyperboloidSheet => (k2, 0.0, -self.b * self.b),
        }
    }
}

/// The δ-thickened plane between y = px + q and y = px + q + δ√(1+p²).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThickPlane {
    pub p: f64,
    pub q: f64,
    pub delta: f64,
}

impl ThickPlane {
    pub fn vertical_width(&self) -> f64 {
        self.delta * (1.0 + self.p * self.p).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    InRange,
    OutOfRange,
}

/// The window b²/a ≤ c₁R, R ≤ c₂a in which σ ≲ Rδ is claimed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeWindow {
    pub c1: f64,
    pub c2: f64,
}

impl Default for RegimeWindow {
    fn default() -> Self {
        RegimeWindow { c1: 1.0, c2: 4.0 }
    }
}

impl RegimeWindow {
    pub fn classify(&self, s: &QuadricSurface, r: f64) -> Regime {
        if s.b * s.b / s.a <= self.c1 * r && r <= self.c2 * s.a {
            Regime::InRange
        } else {
            Regime::OutOfRange
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadricArea {
    pub estimate: MeasureEstimate,
    /// Rδ.
    pub bound: f64,
    pub regime: Regime,
}

impl QuadricArea {
    pub fn ratio(&self) -> f64 {
        self.estimate.value / self.bound
    }
}

/// Real roots of αx² + βx + γ = 0, tolerant of a vanishing leading term.
fn quadratic_roots(al: f64, be: f64, ga: f64) -> Vec<f64> {
    let scale = al.abs().max(be.abs()).max(ga.abs());
    if scale == 0.0 {
        return vec![];
    }
    if al.abs() <= 1e-14 * scale {
        return if be != 0.0 { vec![-ga / be] } else { vec![] };
    }
    let disc = be * be - 4.0 * al * ga;
    if disc < 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    // Stable pair: one root from the larger-magnitude combination.
    let t = -0.5 * (be + be.signum() * sq);
    if t == 0.0 {
        return vec![0.0];
    }
    vec![t / al, ga / t]
}

/// σ(S ∩ B(focus, R) ∩ P_δ) by quadrature in x of f√(1+f′²)·Δθ(x), where
/// Δθ(x) = 2(arcsin(h/f) − arcsin(g/f)) is the exact arc of the slice
/// circle between the plane's two lines. `n_quad` Gauss nodes are used per
/// sub-panel; panels are cut at every point where the integrand has a kink
/// or square-root endpoint.
pub fn quadric_area(
    s: QuadricSurface,
    r: f64,
    plane: ThickPlane,
    n_quad: usize,
    window: RegimeWindow,
) -> Result<QuadricArea> {
    s.validate()?;
    ensure!(r > 0.0 && r.is_finite(), Domain, "ball radius must be positive, got {r}");
    ensure!(plane.delta > 0.0 && plane.p.is_finite() && plane.q.is_finite(), Domain, "invalid plane {plane:?}");
    ensure!(n_quad >= 2, Domain, "need at least 2 quadrature nodes");
    let regime = window.classify(&s, r);
    let bound = r * plane.delta;

    // Ball on the surface: (x − x_c)² + f(x)² ≤ R².
    let xc = s.focus();
    let (fa, fb, fc) = s.profile_sq();
    let ball = quadratic_roots(1.0 + fa, -2.0 * xc + fb, xc * xc + fc - r * r);
    let in_ball = |x: f64| (x - xc).powi(2) + (fa * x * x + fb * x + fc) <= r * r;
    let (mut lo, mut hi) = s.x_range();
    let mut ball_sorted = ball.clone();
    ball_sorted.sort_by(f64::total_cmp);
    match ball_sorted.as_slice() {
        [x1, x2] => {
            lo = lo.max(*x1);
            hi = hi.min(*x2);
        }
        _ => {
            // Degenerate (sphere about its centre): all or nothing.
            let mid = if lo.is_finite() && hi.is_finite() { (lo + hi) / 2.0 } else { xc };
            if !in_ball(mid) {
                return Ok(QuadricArea { estimate: quadrature_zero(n_quad), bound, regime });
            }
        }
    }
    ensure!(lo.is_finite() && hi.is_finite(), Domain, "quadric slice range is unbounded");
    if hi <= lo {
        return Ok(QuadricArea { estimate: quadrature_zero(n_quad), bound, regime });
    }

    let w = plane.vertical_width();
    let integrand = |x: f64| {
        let f = s.profile(x);
        if f <= 0.0 {
            return 0.0;
        }
        let g = plane.p * x + plane.q;
        let h = (g + w).min(f);
        let arc = |y: f64| (y / f).clamp(-1.0, 1.0).asin();
        let dtheta = 2.0 * (arc(h) - arc(g)).max(0.0);
        s.area_density(x) * dtheta
    };

    let mut cuts = vec![lo, hi];
    for shift in [0.0, w] {
        // (px + q')² = f(x)²
        let q = plane.q + shift;
        cuts.extend(quadratic_roots(plane.p * plane.p - fa, 2.0 * plane.p * q - fb, q * q - fc));
    }
    cuts.extend([-s.a, s.a]);
    cuts.retain(|x| x.is_finite() && *x >= lo && *x <= hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let gl = GaussLegendre::new(n_quad);
    // Tolerance scaled to the trivial bound: the whole slice arc times the
    // largest density on the range.
    let scale = 2.0 * std::f64::consts::PI * s.area_density(lo).max(s.area_density(hi)).max(s.b);
    let tol = 1e-10 * scale;
    let (mut value, mut stderr, mut panels) = (0.0, 0.0, 0);
    for p in cuts.windows(2) {
        let (v, e, k) = gl.integrate_adaptive(p[0], p[1], tol, integrand);
        value += v;
        stderr += e;
        panels += k;
    }
    let stderr = stderr.max(f64::EPSILON * value.abs()).max(f64::MIN_POSITIVE);
    let n_samples = (n_quad * panels) as u64;
    Ok(QuadricArea {
        estimate: MeasureEstimate { value: value.max(0.0), stderr, n_samples, method: Method::Quadrature },
        bound,
        regime,
    })
}

fn quadrature_zero(n_quad: usize) -> MeasureEstimate {
    MeasureEstimate { value: 0.0, stderr: f64::MIN_POSITIVE, n_samples: n_quad as u64, method: Method::Quadrature }
}
