use std::f64::consts::PI;

use proptest::prelude::*;
use restriction_lab::exec::Exec;
use restriction_lab::fixtures::Fixtures;
use restriction_lab::geometry::{Region, Sign, SpacetimePoint, Vec3};
use restriction_lab::measure::*;

fn shell(r: f64, delta: f64) -> Region {
    Region::ThickSphere { r, delta }
}

fn shell_volume(lo: f64, hi: f64) -> f64 {
    4.0 / 3.0 * PI * (hi.powi(3) - lo.powi(3))
}

#[test]
fn mc_ball_volume() {
    let est = mc_volume(&Region::ball(Vec3::ZERO, 1.0), 1_000_000, 1).unwrap();
    assert!(est.agrees_with(4.0 / 3.0 * PI, 3.0), "{est:?}");
    assert_eq!(est.method, Method::Mc);
}

#[test]
fn mc_thin_shell_volume() {
    let est = mc_volume(&shell(1.0, 0.01), 10_000_000, 2).unwrap();
    assert!(est.agrees_with(shell_volume(0.99, 1.01), 3.0), "{est:?}");
}

#[test]
fn mc_is_deterministic_and_exec_independent() {
    let r = shell(2.0, 0.25);
    let a = mc_volume_with(&r, 300_000, 9, Exec::Sequential).unwrap();
    let b = mc_volume_with(&r, 300_000, 9, Exec::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mc_rejects_unbounded_region() {
    let slab = Region::TimeSlab { lo: 0.0, hi: 1.0 };
    assert!(mc_volume(&slab, 1000, 1).is_err());
}

#[test]
fn slab_sphere_interior_example() {
    let v = slab_sphere_volume(1.0, 0.01, -0.5, 0.5).unwrap();
    assert!((v.value - 0.125_663_706_143_591_7).abs() < 1e-15);
    assert_eq!(v.stderr, 0.0);
}

#[test]
fn slab_sphere_empty_slab() {
    assert_eq!(slab_sphere_volume(1.0, 0.01, 1.02, 2.0).unwrap().value, 0.0);
    assert!(slab_sphere_volume(1.0, 0.5, 0.0, 1.0).is_err());
}

#[test]
fn slab_sphere_cap_matches_mc() {
    let exact = slab_sphere_volume(1.0, 0.01, 0.99, 1.01).unwrap().value;
    let e = shell(1.0, 0.01).and(Region::Slab { omega: restriction_lab::geometry::Direction::E1, lo: 0.99, hi: 1.01 });
    let est = mc_volume(&e, 4_000_000, 3).unwrap();
    assert!(est.agrees_with(exact, 3.0), "exact {exact} vs {est:?}");
}

#[test]
fn sphere_sphere_disjoint_is_zero() {
    let s = sphere_sphere_volume(1.0, 0.01, 1.0, 0.01, Vec3::new(2.05, 0.0, 0.0)).unwrap();
    assert_eq!(s.estimate.value, 0.0);
}

#[test]
fn sphere_sphere_rejects_concentric() {
    assert!(sphere_sphere_volume(1.0, 0.01, 2.0, 0.01, Vec3::ZERO).is_err());
}

#[test]
fn sphere_sphere_matches_mc() {
    let xi0 = Vec3::new(1.0, 0.0, 0.0);
    let s = sphere_sphere_volume(1.0, 0.01, 1.0, 0.01, xi0).unwrap();
    let e = shell(1.0, 0.01).and(shell(1.0, 0.01).translate(SpacetimePoint::new(0.0, xi0)));
    let est = mc_volume(&e, 8_000_000, 4).unwrap();
    assert!(est.agrees_with(s.estimate.value, 3.0), "exact {} vs {est:?}", s.estimate.value);
    assert!(s.estimate.value / s.bound <= Fixtures::builtin().unwrap().measure.sphere_sphere);
    assert!(s.reduction >= s.estimate.value);
}

#[test]
fn cone_cone_far_outside_sumset_is_zero() {
    let a = ConeSpec::new(Sign::Plus, 4.0, 0.5);
    let x0 = SpacetimePoint::new(100.0, Vec3::new(100.0, 0.0, 0.0));
    let (est, _) = cone_cone_volume(a, a, x0, 100_000, 1).unwrap();
    assert_eq!(est.value, 0.0);
    assert_eq!(cone_cone_reference(a, a, x0).unwrap(), 0.0);
}

#[test]
fn cone_cone_reference_matches_mc() {
    let cases = [
        (
            ConeSpec::new(Sign::Plus, 4.0, 0.5),
            ConeSpec::new(Sign::Plus, 4.0, 0.5),
            SpacetimePoint::new(5.0, Vec3::new(4.0, 0.0, 0.0)),
        ),
        (
            ConeSpec::new(Sign::Plus, 4.0, 1.0),
            ConeSpec::new(Sign::Minus, 8.0, 0.5),
            SpacetimePoint::new(-2.0, Vec3::new(6.0, 0.0, 0.0)),
        ),
        (
            ConeSpec::new(Sign::Minus, 8.0, 8.0),
            ConeSpec::new(Sign::Minus, 8.0, 8.0),
            SpacetimePoint::new(-9.0, Vec3::new(0.0, 8.0, 0.0)),
        ),
    ];
    for (i, (a, b, x0)) in cases.into_iter().enumerate() {
        let (est, bounds) = cone_cone_volume(a, b, x0, 2_000_000, 10 + i as u64).unwrap();
        let reference = cone_cone_reference(a, b, x0).unwrap();
        assert!(reference > 0.0);
        assert!(est.agrees_with(reference, 4.0), "case {i}: reference {reference} vs {est:?}");
        assert!(bounds.min_applicable() > 0.0);
    }
}

#[test]
fn cone_cone_bounds_report_equal_case() {
    let a = ConeSpec::new(Sign::Plus, 4.0, 0.5);
    let (_, b) = cone_cone_volume(a, a, SpacetimePoint::new(5.0, Vec3::new(4.0, 0.0, 0.0)), 1000, 1).unwrap();
    assert_eq!(b.equal_case, Some(4.0));
    assert_eq!(b.n1_sq_l1_l2, 4.0);
    assert_eq!(b.n1_cubed_lmin, 32.0);
    let (_, b) = cone_cone_volume(a, ConeSpec::new(Sign::Plus, 8.0, 0.5), SpacetimePoint::default(), 1000, 1).unwrap();
    assert_eq!(b.equal_case, None);
}

#[test]
fn cone_ball_far_center_is_empty_and_bounded() {
    let fx = Fixtures::builtin().unwrap();
    let r = cone_ball_constant(Sign::Plus, 16.0, 0.5, 1.0, Vec3::new(12.0, 0.0, 0.0), 200_000, 1).unwrap();
    assert!(r.estimate.value > 0.0);
    assert!(r.estimate.value / r.bound <= fx.measure.cone_ball);
    // Ball wholly inside |ξ| ≤ N/2, so A is empty.
    let e = cone_ball_constant(Sign::Plus, 16.0, 0.5, 1.0, Vec3::new(3.0, 0.0, 0.0), 10_000, 1).unwrap();
    assert_eq!(e.estimate.value, 0.0);
    assert!(cone_ball_constant(Sign::Plus, 16.0, 0.5, 3.0, Vec3::new(12.0, 0.0, 0.0), 1000, 1).is_err());
}

#[test]
fn quadric_plane_missing_ball_is_zero() {
    let s = QuadricSurface::new(QuadricKind::Ellipsoid, 2.0, 1.0, Sign::Plus).unwrap();
    let plane = ThickPlane { p: 0.0, q: 50.0, delta: 0.1 };
    let a = quadric_area(s, 1.0, plane, 16, RegimeWindow::default()).unwrap();
    assert_eq!(a.estimate.value, 0.0);
}

#[test]
fn quadric_sphere_zone() {
    // Sphere of radius a; the slab q ≤ y ≤ q + δ cuts a zone of area 2πaδ.
    let a = 3.0;
    let s = QuadricSurface::new(QuadricKind::Ellipsoid, a, a, Sign::Plus).unwrap();
    for q in [-0.005 * a, 0.3 * a, -0.9 * a] {
        let plane = ThickPlane { p: 0.0, q, delta: 0.01 * a };
        let area = quadric_area(s, a, plane, 16, RegimeWindow::default()).unwrap();
        let zone = 2.0 * PI * a * plane.delta;
        assert!((area.estimate.value / zone - 1.0).abs() < 1e-3, "q={q}: {} vs {zone}", area.estimate.value);
    }
}

#[test]
fn quadric_regime_classification() {
    let w = RegimeWindow::default();
    let s = QuadricSurface::new(QuadricKind::HyperboloidSheet, 1.0, 0.5, Sign::Minus).unwrap();
    assert_eq!(w.classify(&s, 2.0), Regime::InRange);
    assert_eq!(w.classify(&s, 64.0), Regime::OutOfRange);
    assert!(QuadricSurface::new(QuadricKind::Ellipsoid, 1.0, 2.0, Sign::Plus).is_err());
}

#[test]
fn hyperboloid_tangent_to_asymptote_outgrows_in_regime_constant() {
    let fx = Fixtures::builtin().unwrap();
    let (a, b) = (1.0, 0.5);
    let s = QuadricSurface::new(QuadricKind::HyperboloidSheet, a, b, Sign::Minus).unwrap();
    let mut last = 0.0;
    for k in [8.0, 64.0] {
        let r = k * a;
        let delta = a * b / r;
        let p = Sign::Minus.value() * b / a;
        let plane = ThickPlane { p, q: -delta * (1.0 + p * p).sqrt(), delta };
        let area = quadric_area(s, r, plane, 16, RegimeWindow::default()).unwrap();
        assert_eq!(area.regime, Regime::OutOfRange);
        assert!(area.ratio() > last);
        last = area.ratio();
    }
    assert!(last > fx.measure.quadric, "R/a = 64 ratio {last} vs in-regime constant {}", fx.measure.quadric);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_shell_matches_concentric_and_symmetric(
        a_lo in 0.1..2.0f64, aw in 0.01..1.0f64, b_lo in 0.1..2.0f64, bw in 0.01..1.0f64, s in 0.0..5.0f64,
    ) {
        let v = two_shell_volume(a_lo, a_lo + aw, b_lo, b_lo + bw, s);
        let w = two_shell_volume(b_lo, b_lo + bw, a_lo, a_lo + aw, s);
        prop_assert!(v >= 0.0);
        prop_assert!((v - w).abs() <= 1e-9 * v.max(1e-12));
        prop_assert!(v <= shell_volume(a_lo, a_lo + aw) * (1.0 + 1e-12));
        prop_assert!(v <= shell_volume(b_lo, b_lo + bw) * (1.0 + 1e-12));
    }

    #[test]
    fn slab_sphere_is_additive(rho in 0.5..4.0f64, frac in 0.01..0.25f64, a in -5.0..5.0f64, w1 in 0.0..3.0f64, w2 in 0.0..3.0f64) {
        let eps = rho * frac;
        prop_assume!(w1 > 0.0 && w2 > 0.0);
        let whole = slab_sphere_volume(rho, eps, a, a + w1 + w2).unwrap().value;
        let parts = slab_sphere_volume(rho, eps, a, a + w1).unwrap().value
            + slab_sphere_volume(rho, eps, a + w1, a + w1 + w2).unwrap().value;
        prop_assert!((whole - parts).abs() <= 1e-9 * whole.max(1e-9));
    }

    #[test]
    fn sphere_sphere_reduction_dominates(r in 0.5..8.0f64, big_r in 0.5..8.0f64, fd in 0.001..0.25f64, fdd in 0.001..0.25f64, s in 0.05..16.0f64) {
        let v = sphere_sphere_volume(r, r * fd, big_r, big_r * fdd, Vec3::new(0.0, 0.0, s)).unwrap();
        prop_assert!(v.reduction >= v.estimate.value * (1.0 - 1e-9));
    }
}
