use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use restriction_lab::geometry::*;
use restriction_lab::sphere_net::sample_direction;
use restriction_lab::Error;

// Angle-identity windows from a dense (θ, |b|/|a|) grid scan, θ in
// [1e-4, π − 1e-4] and |b|/|a| in [1e-3, 1]. The sum ratio runs over
// [2/π², 1/2] and the difference ratio over [2/π², 1]; both endpoints
// are approached at the grid edges, so a 1% slack covers them.
const SUM_WINDOW: [f64; 2] = [0.2026 * 0.99, 0.5 * 1.01];
const DIFF_WINDOW: [f64; 2] = [0.2026 * 0.99, 1.0 * 1.01];

fn vec3() -> impl Strategy<Value = Vec3> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn point() -> impl Strategy<Value = SpacetimePoint> {
    (-10.0..10.0f64, vec3()).prop_map(|(t, v)| SpacetimePoint::new(t, v))
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

#[test]
fn membership_examples() {
    let shell = Region::ThickSphere { r: 1.0, delta: 0.1 };
    assert!(shell.contains(Vec3::new(1.0, 0.0, 0.0)).unwrap());
    let cone = Region::thick_cone(Sign::Plus, 2.0, 0.1);
    assert!(cone.contains(SpacetimePoint::new(1.5, Vec3::new(1.5, 0.0, 0.0))).unwrap());
    assert!(!cone.contains(SpacetimePoint::new(1.7, Vec3::new(1.5, 0.0, 0.0))).unwrap());
}

#[test]
fn annulus_is_half_open() {
    let a = Region::Annulus { n: 2.0 };
    assert!(!a.contains(Vec3::new(1.0, 0.0, 0.0)).unwrap());
    assert!(a.contains(Vec3::new(2.0, 0.0, 0.0)).unwrap());
    assert!(!a.contains(Vec3::new(2.0 + 1e-12, 0.0, 0.0)).unwrap());
}

#[test]
fn cones_exclude_zero_frequency() {
    let s = Region::Sector { omega: Direction::E3, gamma: PI };
    assert!(!s.contains(Vec3::ZERO).unwrap());
    assert!(s.contains(Vec3::new(0.0, 0.0, -1.0)).unwrap());
}

#[test]
fn spacetime_query_on_space_region_uses_xi() {
    let b = Region::ball(Vec3::ZERO, 1.0);
    assert!(b.contains(SpacetimePoint::new(1e9, Vec3::new(0.5, 0.0, 0.0))).unwrap());
}

#[test]
fn spatial_query_on_spacetime_region_is_usage_error() {
    let cone = Region::thick_cone(Sign::Plus, 2.0, 0.1);
    assert!(matches!(cone.contains(Vec3::E1), Err(Error::Usage(_))));
}

#[test]
fn hyperbolic_weight_examples() {
    let x = SpacetimePoint::new(1.0, Vec3::E1);
    assert_eq!(hyperbolic_weight(x, Sign::Plus), 0.0);
    assert_eq!(hyperbolic_weight(x, Sign::Minus), -2.0);
    assert_eq!(hyperbolic_weight(SpacetimePoint::new(0.0, Vec3::new(3.0, 4.0, 0.0)), Sign::Plus), 5.0);
}

#[test]
fn angle_rejects_zero() {
    assert!(matches!(angle(Vec3::ZERO, Vec3::E1), Err(Error::Domain(_))));
}

#[test]
fn angle_near_antipodal_keeps_precision() {
    let t = 1e-9f64;
    let b = Vec3::new(-t.cos(), t.sin(), 0.0);
    assert!((angle(Vec3::E1, b).unwrap() - (PI - t)).abs() < 1e-15);
}

#[test]
fn sum_identity_examples() {
    let d = angle_identity_defect(Vec3::E1, Vec3::E1, AngleIdentity::Sum).unwrap();
    assert_eq!((d.lhs, d.comparator), (0.0, 0.0));
    assert_eq!(d.ratio(), None);

    let d = angle_identity_defect(Vec3::E1, Vec3::E2, AngleIdentity::Sum).unwrap();
    assert!((d.lhs - (2.0 - 2f64.sqrt())).abs() < 1e-15);
    assert!((d.comparator - FRAC_PI_2 * FRAC_PI_2).abs() < 1e-15);
    let r = d.ratio().unwrap();
    assert!((r - 0.2374).abs() < 1e-4);
    assert!((SUM_WINDOW[0]..=SUM_WINDOW[1]).contains(&r));
}

#[test]
fn difference_identity_near_antipodal() {
    let b = Vec3::new(-1.0 + 1e-3, 1e-3, 0.0);
    let r = angle_identity_defect(Vec3::E1, b, AngleIdentity::Difference).unwrap().ratio().unwrap();
    assert!((DIFF_WINDOW[0]..=DIFF_WINDOW[1]).contains(&r), "ratio {r}");
}

#[test]
fn difference_identity_rejects_equal_inputs() {
    let a = Vec3::new(1.0, 2.0, 3.0);
    assert!(angle_identity_defect(a, a, AngleIdentity::Difference).is_err());
}

/// Random nonzero pair with θ in [1e-4, π − 1e-4] and |a|/|b| log-uniform in [1e-3, 1e3].
fn identity_pair(rng: &mut impl Rng) -> (Vec3, Vec3) {
    let a = sample_direction(rng);
    let theta = 1e-4 + (PI - 2e-4) * rng.random::<f64>();
    let e = a.any_orthogonal();
    let b = a * theta.cos() + e * theta.sin();
    let scale = 10f64.powf(6.0 * rng.random::<f64>() - 3.0);
    (a * 10f64.powf(2.0 * rng.random::<f64>() - 1.0), b * scale)
}

#[test]
fn identity_windows_hold_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut smin, mut smax, mut dmin, mut dmax) = (f64::MAX, 0.0f64, f64::MAX, 0.0f64);
    for _ in 0..1_000_000 {
        let (a, b) = identity_pair(&mut rng);
        let s = angle_identity_defect(a, b, AngleIdentity::Sum).unwrap().ratio().unwrap();
        let d = angle_identity_defect(a, b, AngleIdentity::Difference).unwrap().ratio().unwrap();
        smin = smin.min(s);
        smax = smax.max(s);
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    assert!(SUM_WINDOW[0] <= smin && smax <= SUM_WINDOW[1], "sum [{smin}, {smax}]");
    assert!(DIFF_WINDOW[0] <= dmin && dmax <= DIFF_WINDOW[1], "difference [{dmin}, {dmax}]");
    // The windows themselves must stay narrow enough to mean something.
    #[allow(clippy::assertions_on_constants)]
    {
        assert!(SUM_WINDOW[1] / SUM_WINDOW[0] <= 20.0 && DIFF_WINDOW[1] / DIFF_WINDOW[0] <= 20.0);
    }
}

#[test]
fn triangle_inequality_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100_000 {
        let (a, b, c) = (sample_direction(&mut rng), sample_direction(&mut rng), sample_direction(&mut rng));
        let ac = angle(a, c).unwrap();
        assert!(ac <= angle(a, b).unwrap() + angle(b, c).unwrap() + 1e-12);
        assert_eq!(angle(a, b).unwrap(), angle(b, a).unwrap());
    }
}

#[test]
fn rectangle_symmetric_example() {
    let probe = Vec3::new(0.0, 0.01, 1.0);
    let r = disk_contains_projected_rectangle(FRAC_PI_2, FRAC_PI_4, RectanglePart::Bounded { x: 0.5 }, probe);
    assert_eq!(r.unwrap(), (true, true));
}

#[test]
fn rectangle_rejects_out_of_range_angles() {
    let p = RectanglePart::Bounded { x: 0.1 };
    assert!(disk_contains_projected_rectangle(0.0, FRAC_PI_4, p, Vec3::E3).is_err());
    assert!(disk_contains_projected_rectangle(FRAC_PI_4, 2.0, p, Vec3::E3).is_err());
    assert!(disk_contains_projected_rectangle(FRAC_PI_4, FRAC_PI_6, RectanglePart::Dipping, Vec3::E3).is_err());
}

#[test]
fn rectangle_implication_near_disk_boundary() {
    // Probes just outside the disk about ω₁ = (cos β, 0, sin β).
    let (beta, theta) = (FRAC_PI_6, FRAC_PI_4);
    let w = Vec3::new(beta.cos(), 0.0, beta.sin());
    let e = w.any_orthogonal();
    let f = w.cross(e);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let az = 2.0 * PI * rng.random::<f64>();
        let t = theta * (1.0 + 1e-9 + 1e-3 * rng.random::<f64>());
        let p = w * t.cos() + (e * az.cos() + f * az.sin()) * t.sin();
        for part in [RectanglePart::Bounded { x: theta.sin() * 0.7 }, RectanglePart::Bounded { x: theta.sin() }] {
            let (rect, disk) = disk_contains_projected_rectangle(beta, theta, part, p).unwrap();
            assert!(!disk);
            assert!(!rect, "rectangle point outside the disk at {p}");
        }
    }
}

#[test]
fn rectangle_implication_monte_carlo() {
    let cells = [(FRAC_PI_6, FRAC_PI_4), (FRAC_PI_4, FRAC_PI_4), (0.2, 0.9), (FRAC_PI_2, 0.3)];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (beta, theta) in cells {
        let mut parts =
            vec![RectanglePart::Bounded { x: 0.9 * theta.sin() }, RectanglePart::Bounded { x: 0.5 * theta.sin() }];
        if beta < theta {
            parts.push(RectanglePart::Dipping);
        }
        for part in parts {
            let mut hits = 0;
            for _ in 0..250_000 {
                let p = sample_direction(&mut rng);
                let (rect, disk) = disk_contains_projected_rectangle(beta, theta, part, p).unwrap();
                assert!(!rect || disk, "violation at beta={beta} theta={theta} {part:?} probe {p}");
                hits += rect as usize;
            }
            assert!(hits > 0, "rectangle set never sampled at beta={beta} theta={theta} {part:?}");
        }
    }
}

#[test]
fn region_json_renormalizes_near_unit_axis() {
    let text = r#"{"kind":"sector","omega":[1.0000005,0,0],"gamma":0.5}"#;
    let r: Region = serde_json::from_str(text).unwrap();
    match r {
        Region::Sector { omega, .. } => assert_eq!(omega.vec().norm(), 1.0),
        other => panic!("unexpected {other:?}"),
    }
    let bad = r#"{"kind":"sector","omega":[1.1,0,0],"gamma":0.5}"#;
    assert!(serde_json::from_str::<Region>(bad).is_err());
}

#[test]
fn region_json_round_trip() {
    let r = Region::thick_cone(Sign::Minus, 8.0, 0.5)
        .and(Region::Sector { omega: Direction::E2, gamma: 0.25 })
        .translate(SpacetimePoint::new(1.0, Vec3::new(0.0, 2.0, 0.0)))
        .reflect();
    let back: Region = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}

proptest! {
    #[test]
    fn weights_sum_to_minus_two_tau(x in point()) {
        // Exact up to the rounding of the two separate sums.
        let s = hyperbolic_weight(x, Sign::Plus) + hyperbolic_weight(x, Sign::Minus);
        let ulp = 4.0 * f64::EPSILON * (x.tau.abs() + x.xi.norm());
        prop_assert!((s + 2.0 * x.tau).abs() <= ulp);
    }

    #[test]
    fn weights_on_integer_grid_sum_exactly(t in -1000i32..1000, a in 0i32..1000) {
        let x = SpacetimePoint::new(t as f64, Vec3::new(a as f64, 0.0, 0.0));
        prop_assert_eq!(hyperbolic_weight(x, Sign::Plus) + hyperbolic_weight(x, Sign::Minus), -2.0 * x.tau);
    }

    #[test]
    fn angle_is_symmetric_and_bounded(a in vec3(), b in vec3()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let t = angle(a, b).unwrap();
        prop_assert_eq!(t, angle(b, a).unwrap());
        prop_assert!((0.0..=PI).contains(&t));
    }

    #[test]
    fn translate_shifts_membership(s in sign(), n in 1.0..8.0f64, l in 0.1..4.0f64, v in point(), p in point()) {
        let base = Region::thick_cone(s, n, l);
        let moved = base.clone().translate(v);
        prop_assert_eq!(moved.contains(p).unwrap(), base.contains(p - v).unwrap());
    }

    #[test]
    fn reflect_negates_membership(s in sign(), n in 1.0..8.0f64, l in 0.1..4.0f64, p in point()) {
        let base = Region::thick_cone(s, n, l);
        prop_assert_eq!(base.clone().reflect().contains(p).unwrap(), base.contains(-p).unwrap());
    }

    #[test]
    fn reflected_cone_is_opposite_sign(s in sign(), n in 1.0..8.0f64, l in 0.1..4.0f64, p in point()) {
        let flipped = Region::thick_cone(s.flip(), n, l);
        prop_assert_eq!(Region::thick_cone(s, n, l).reflect().contains(p).unwrap(), flipped.contains(p).unwrap());
    }

    #[test]
    fn tau_window_matches_membership(s in sign(), n in 1.0..8.0f64, l in 0.1..4.0f64, p in point()) {
        let r = Region::thick_cone(s, n, l);
        let inside = r.contains(p).unwrap();
        prop_assert_eq!(inside, r.tau_window(p.xi).contains(p.tau));
    }
}
