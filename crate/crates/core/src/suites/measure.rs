//! Volume and area suites: slab-sphere exactness, shell intersections,
//! cone intersections and quadric areas.

use std::f64::consts::PI;

use rand::Rng;

use super::{Check, Row, SuiteReport};
use crate::error::Result;
use crate::estimate::fit_exponent;
use crate::exec::{chunk_rng, Exec};
use crate::fixtures::{Fixtures, MeasureFixtures};
use crate::geometry::{Direction, Region, Sign, SpacetimePoint, Vec3};
use crate::measure::{
    cone_ball_constant, cone_cone_volume, mc_volume, quadric_area, slab_sphere_volume, sphere_sphere_volume, ConeSpec,
    QuadricKind, QuadricSurface, Regime, RegimeWindow, ThickPlane,
};
use crate::sphere_net::sample_direction;

pub const SLAB_DRAWS: usize = 50;
pub const SLAB_MC_SAMPLES: u64 = 1_000_000;

/// Interior slab-sphere values against 4πρε(b−a), and 50 random draws
/// against Monte Carlo within 3 standard errors.
pub fn slab_sphere(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("slab-sphere", seed);
    let mut rng = chunk_rng(seed, 0x51ab);
    let mut worst_rel = 0.0f64;
    for _ in 0..SLAB_DRAWS {
        let rho = 0.5 + 3.5 * rng.random::<f64>();
        let eps = rho / 4.0 * rng.random::<f64>().max(1e-3);
        let inner = rho - eps;
        let mut ab = [inner * (2.0 * rng.random::<f64>() - 1.0), inner * (2.0 * rng.random::<f64>() - 1.0)];
        ab.sort_by(f64::total_cmp);
        if ab[0] == ab[1] {
            continue;
        }
        let exact = 4.0 * PI * rho * eps * (ab[1] - ab[0]);
        let v = slab_sphere_volume(rho, eps, ab[0], ab[1])?.value;
        worst_rel = worst_rel.max((v - exact).abs() / exact);
    }
    rep.checks.push(Check::at_most("interior relative error", worst_rel, 1e-12));

    let draws: Vec<(f64, f64, f64, f64)> = (0..SLAB_DRAWS)
        .map(|_| {
            let rho = 0.5 + 3.5 * rng.random::<f64>();
            let eps = rho / 4.0 * (0.02 + 0.98 * rng.random::<f64>());
            let reach = rho + 2.0 * eps;
            let mut ab = [reach * (2.0 * rng.random::<f64>() - 1.0), reach * (2.0 * rng.random::<f64>() - 1.0)];
            ab.sort_by(f64::total_cmp);
            (rho, eps, ab[0], ab[1].max(ab[0] + 1e-3))
        })
        .collect();
    let mut outside = 0u64;
    let mut worst_z = 0.0f64;
    for (i, &(rho, eps, a, b)) in draws.iter().enumerate() {
        let exact = slab_sphere_volume(rho, eps, a, b)?.value;
        let region =
            Region::ThickSphere { r: rho, delta: eps }.and(Region::Slab { omega: Direction::E1, lo: a, hi: b });
        let mc = mc_volume(&region, SLAB_MC_SAMPLES, seed.wrapping_add(i as u64))?;
        if !mc.agrees_with(exact, 3.0) {
            outside += 1;
        }
        if mc.stderr > 0.0 {
            worst_z = worst_z.max((mc.value - exact).abs() / mc.stderr);
        }
        rep.rows.push(Row::new(
            "slab_sphere_mc",
            &[("rho", rho), ("eps", eps), ("a", a), ("b", b)],
            mc.value,
            mc.stderr,
            exact,
        ));
    }
    rep.checks.push(Check::none("draws outside 3 stderr", outside));
    rep.metric("largest_z", worst_z);
    Ok(rep)
}

/// Ratios value/(rRδΔ/|ξ₀|) over the dyadic sweep, tagged with r/δ.
///
/// r, R ∈ 2⁰..2⁶, δ, Δ ∈ 2⁻¹⁰..2⁻⁴ and |ξ₀| doubling from max(r, R)/2
/// up to r + R, which is included. Zero volumes are dropped.
pub fn sphere_sphere_sweep() -> Result<Vec<(f64, f64)>> {
    let radii: Vec<f64> = (0..=6).map(|k| (1u64 << k) as f64).collect();
    let thick: Vec<f64> = (4..=10).map(|k| 1.0 / (1u64 << k) as f64).collect();
    let mut out = Vec::new();
    for &r in &radii {
        for &big_r in &radii {
            let mut dists = Vec::new();
            let mut s = r.max(big_r) / 2.0;
            while s < r + big_r {
                dists.push(s);
                s *= 2.0;
            }
            dists.push(r + big_r);
            for &d in &thick {
                for &big_d in &thick {
                    for &s in &dists {
                        let v = sphere_sphere_volume(r, d, big_r, big_d, Vec3::new(s, 0.0, 0.0))?;
                        if v.estimate.value > 0.0 {
                            out.push((r / d, v.estimate.value / v.bound));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Largest ratio in each decade of r/δ (10¹..10⁵).
fn decade_maxima(sweep: &[(f64, f64)]) -> Vec<f64> {
    let mut m = vec![0.0f64; 4];
    for &(x, ratio) in sweep {
        let d = (x.log10().floor() as i64 - 1).clamp(0, 3) as usize;
        m[d] = m[d].max(ratio);
    }
    m
}

/// Acceptance criterion 3.
pub fn sphere_sphere(fx: &Fixtures) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("sphere-sphere", 0);
    let sweep = sphere_sphere_sweep()?;
    let maxima = decade_maxima(&sweep);
    let overall = maxima.iter().cloned().fold(0.0, f64::max);
    let least = maxima.iter().cloned().fold(f64::INFINITY, f64::min);
    for (i, m) in maxima.iter().enumerate() {
        rep.metric(&format!("max_ratio_decade_{}", i + 1), *m);
    }
    rep.metric("configurations", sweep.len() as f64);
    rep.checks.push(Check::at_least("smallest decade maximum", least, f64::MIN_POSITIVE));
    rep.checks.push(Check::below("max/min of decade maxima", overall / least, 4.0));
    rep.checks.push(Check::at_most("max value/bound", overall, fx.measure.sphere_sphere));
    Ok(rep)
}

/// One cone-cone configuration: the two cones and X₀.
pub type ConePair = (ConeSpec, ConeSpec, SpacetimePoint);

/// The bounded-ratio sweep: N₁ ≤ N₂ ∈ {4, 8, 16}, L from N₁/16 to N₁, all
/// sign pairs and |ξ₀| ∈ {N₂/2, N₂, 3N₂/2}.
pub fn cone_cone_configs() -> Vec<ConePair> {
    let mut out = Vec::new();
    for n1 in [4.0, 8.0] {
        for n2 in [n1, 2.0 * n1] {
            let ls = [n1 / 16.0, n1 / 4.0, n1];
            for &l1 in &ls {
                for &l2 in &ls {
                    for s1 in Sign::BOTH {
                        for s2 in Sign::BOTH {
                            for m in [0.5, 1.0, 1.5] {
                                let tau = 0.75 * (s1.value() * n1 + s2.value() * n2);
                                let x0 = SpacetimePoint::new(tau, Vec3::new(m * n2, 0.0, 0.0));
                                out.push((ConeSpec::new(s1, n1, l1), ConeSpec::new(s2, n2, l2), x0));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

pub const CONE_SAMPLES: u64 = 1_000_000;
pub const CONE_FIT_SAMPLES: u64 = 8_000_000;

/// Largest value / min(applicable bounds) over [`cone_cone_configs`].
pub fn cone_cone_max_ratio(seed: u64) -> Result<(f64, Vec<Row>)> {
    let configs = cone_cone_configs();
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for (i, (a, b, x0)) in configs.iter().enumerate() {
        let (est, bounds) = cone_cone_volume(*a, *b, *x0, CONE_SAMPLES, seed.wrapping_add(i as u64))?;
        let bound = bounds.min_applicable();
        worst = worst.max(est.value / bound);
        rows.push(Row::new(
            "cone_cone",
            &[
                ("n1", a.n),
                ("n2", b.n),
                ("l1", a.l),
                ("l2", b.l),
                ("s1", a.sign.value()),
                ("s2", b.sign.value()),
                ("xi0", x0.xi.x),
            ],
            est.value,
            est.stderr,
            bound,
        ));
    }
    Ok((worst, rows))
}

/// Equal cones with N = 8 and L = 1/16..1/2 at the transversal
/// X₀ = (3N/2, (N, 0, 0)); returns (L, volume) pairs.
pub fn cone_cone_l_scaling(seed: u64) -> Result<Vec<(f64, f64)>> {
    let n = 8.0;
    let x0 = SpacetimePoint::new(1.5 * n, Vec3::new(n, 0.0, 0.0));
    let ls = [1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0];
    let vols = Exec::Sequential.map(ls.len(), |i| {
        let c = ConeSpec::new(Sign::Plus, n, ls[i]);
        cone_cone_volume(c, c, x0, CONE_FIT_SAMPLES, seed.wrapping_add(0xf17 + i as u64)).map(|(e, _)| e.value)
    });
    ls.iter().zip(vols).map(|(&l, v)| Ok((l, v?))).collect()
}

/// Acceptance criterion 4.
pub fn cone_cone(fx: &Fixtures, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("cone-cone", seed);
    let (worst, rows) = cone_cone_max_ratio(seed)?;
    rep.rows = rows;
    rep.checks.push(Check::at_most("max value / min applicable bound", worst, fx.measure.cone_cone));
    let pts = cone_cone_l_scaling(seed)?;
    for &(l, v) in &pts {
        rep.rows.push(Row::new("cone_cone_l_scaling", &[("n", 8.0), ("l", l)], v, 0.0, 64.0 * l * l));
    }
    let (slope, se) = fit_exponent(&pts)?;
    rep.metric("l_exponent_stderr", se);
    rep.checks.push(Check::within("L exponent", slope, [1.8, 2.2]));
    Ok(rep)
}

pub const CONE_BALL_SAMPLES: u64 = 200_000;

/// Largest value / rNL² over N ∈ {16, 32}, r ∈ {N/16, N/8} and L ∈ {r/4, r, 4r}.
pub fn cone_ball_max_ratio(seed: u64) -> Result<(f64, Vec<Row>)> {
    let mut rng = chunk_rng(seed, 0xba11);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    let mut k = 0u64;
    for n in [16.0, 32.0] {
        for r in [n / 16.0, n / 8.0] {
            for l in [r / 4.0, r, 4.0 * r] {
                for sign in Sign::BOTH {
                    let center = sample_direction(&mut rng) * (0.75 * n);
                    let res = cone_ball_constant(sign, n, l, r, center, CONE_BALL_SAMPLES, seed.wrapping_add(100 * k))?;
                    k += 1;
                    worst = worst.max(res.estimate.value / res.bound);
                    rows.push(Row::new(
                        "cone_ball",
                        &[("n", n), ("r", r), ("l", l), ("sign", sign.value())],
                        res.estimate.value,
                        res.estimate.stderr,
                        res.bound,
                    ));
                }
            }
        }
    }
    Ok((worst, rows))
}

/// Cone-ball boundedness for the cones subcommand.
pub fn cone_ball(fx: &Fixtures, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("cone-ball", seed);
    let (worst, rows) = cone_ball_max_ratio(seed)?;
    rep.rows = rows;
    rep.checks.push(Check::at_most("max value / rNL^2", worst, fx.measure.cone_ball));
    Ok(rep)
}

pub const QUADRIC_NODES: usize = 24;

/// f′(x) for the profile, on the open x-range.
fn profile_slope(s: &QuadricSurface, x: f64) -> f64 {
    let k2 = (s.b / s.a).powi(2);
    let f = s.profile(x);
    match s.kind {
        QuadricKind::Ellipsoid => -k2 * x / f,
        QuadricKind::HyperboloidSheet => k2 * x / f,
    }
}

/// The thick plane tangent to the asymptotic cone on the focus side, with
/// δ = ab/R.
pub fn asymptote_plane(s: &QuadricSurface, r: f64) -> ThickPlane {
    let delta = s.a * s.b / r;
    let p = s.focus_sign.value() * s.b / s.a;
    ThickPlane { p, q: -delta * (1.0 + p * p).sqrt(), delta }
}

/// The hyperboloid configuration whose area outgrows Rδ for R ≫ a.
pub fn quadric_witness(r_over_a: f64) -> Result<f64> {
    let s = QuadricSurface::new(QuadricKind::HyperboloidSheet, 1.0, 0.5, Sign::Minus)?;
    let r = r_over_a * s.a;
    Ok(quadric_area(s, r, asymptote_plane(&s, r), QUADRIC_NODES, RegimeWindow::default())?.ratio())
}

/// In-regime area/(Rδ) over ellipsoids and hyperboloids with a = 1,
/// b ∈ {1, 1/2, 1/4, 1/8}, dyadic R in the window and planes tangent to
/// the surface, horizontal, or along the asymptotic cone.
pub fn quadric_sweep() -> Result<(f64, Vec<Row>)> {
    let window = RegimeWindow::default();
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for kind in [QuadricKind::Ellipsoid, QuadricKind::HyperboloidSheet] {
        for b in [1.0, 0.5, 0.25, 0.125] {
            for sign in Sign::BOTH {
                let s = QuadricSurface::new(kind, 1.0, b, sign)?;
                let mut r = crate::estimate::dyadic_ceil(b * b / s.a);
                while r <= window.c2 * s.a {
                    let mut planes = Vec::new();
                    let focus = s.focus();
                    for t in [0.0, 0.25, 0.5, 0.75, 0.95] {
                        // Tangent at a surface point inside the ball.
                        let x = match kind {
                            QuadricKind::Ellipsoid => (focus + (2.0 * t - 1.0) * r).clamp(-s.a * 0.999, s.a * 0.999),
                            QuadricKind::HyperboloidSheet => sign.value() * (s.a * 1.001 + t * r.max(s.a * 0.01)),
                        };
                        if s.profile(x) > 0.0 {
                            for frac in [1.0 / 64.0, 1.0 / 16.0, 0.25] {
                                let delta = frac * r;
                                let p = profile_slope(&s, x);
                                let w = delta * (1.0 + p * p).sqrt();
                                planes.push(ThickPlane { p, q: s.profile(x) - p * x - w / 2.0, delta });
                            }
                        }
                    }
                    for q in [0.0, 0.5 * b, b] {
                        planes.push(ThickPlane { p: 0.0, q: q - r / 64.0, delta: r / 32.0 });
                    }
                    if kind == QuadricKind::HyperboloidSheet {
                        planes.push(asymptote_plane(&s, r));
                    }
                    for plane in planes {
                        let area = quadric_area(s, r, plane, QUADRIC_NODES, window)?;
                        debug_assert_eq!(area.regime, Regime::InRange);
                        worst = worst.max(area.ratio());
                        rows.push(Row::new(
                            "quadric_area",
                            &[
                                ("hyperboloid", (kind == QuadricKind::HyperboloidSheet) as u8 as f64),
                                ("b", b),
                                ("r", r),
                                ("p", plane.p),
                                ("q", plane.q),
                                ("delta", plane.delta),
                            ],
                            area.estimate.value,
                            area.estimate.stderr,
                            area.bound,
                        ));
                    }
                    r *= 2.0;
                }
            }
        }
    }
    Ok((worst, rows))
}

pub const WITNESS_RATIO: f64 = 64.0;

/// Acceptance criterion 5.
pub fn quadric(fx: &Fixtures) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("quadric", 0);
    let (worst, rows) = quadric_sweep()?;
    rep.rows = rows;
    rep.checks.push(Check::at_most("max in-regime area / (R delta)", worst, fx.measure.quadric));
    let witness = quadric_witness(WITNESS_RATIO)?;
    rep.metric("witness_ratio_r_over_a_4", quadric_witness(4.0)?);
    rep.checks.push(Check::at_least(
        "witness at R/a = 64 over the in-regime constant",
        witness / fx.measure.quadric,
        4.0,
    ));
    Ok(rep)
}

/// Raw maxima for calibration.
pub fn observe_fixtures(seed: u64) -> Result<MeasureFixtures> {
    let ss = sphere_sphere_sweep()?.into_iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(MeasureFixtures {
        sphere_sphere: ss,
        cone_cone: cone_cone_max_ratio(seed)?.0,
        cone_ball: cone_ball_max_ratio(seed)?.0,
        quadric: quadric_sweep()?.0,
    })
}
