use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use restriction_lab::fixtures::Fixtures;
use restriction_lab::geometry::{angle, Sign, SpacetimePoint, Vec3};
use restriction_lab::sphere_net::*;
use restriction_lab::Error;

fn fixtures() -> Fixtures {
    Fixtures::builtin().unwrap()
}

/// Brute-force pairwise minimum angle.
fn min_pair_angle(net: &SphereNet) -> f64 {
    let d = net.directions();
    let mut m = PI;
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            m = m.min(angle(d[i], d[j]).unwrap());
        }
    }
    m
}

#[test]
fn gamma_pi_gives_antipodal_pair() {
    let net = SphereNet::build(PI, 1).unwrap();
    assert_eq!(net.len(), 2);
    let d = net.directions();
    assert!((d[0] + d[1]).norm() < 1e-12);
    assert!(net.covering_multiplicity(d[0]).unwrap() >= 1);
}

#[test]
fn gamma_out_of_range_is_rejected() {
    assert!(SphereNet::build(0.0, 1).is_err());
    assert!(SphereNet::build(PI + 0.1, 1).is_err());
    assert!(SphereNet::build(f64::NAN, 1).is_err());
}

#[test]
fn build_is_deterministic() {
    let a = SphereNet::build(PI / 16.0, 9).unwrap();
    let b = SphereNet::build(PI / 16.0, 9).unwrap();
    assert_eq!(a.directions(), b.directions());
}

#[test]
fn separation_and_covering_at_pi_over_64() {
    let net = SphereNet::build(PI / 64.0, 2).unwrap();
    assert!(min_pair_angle(&net) >= net.gamma());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100_000 {
        let xi = sample_direction(&mut rng);
        assert!(net.nearest_angle(xi) <= net.gamma());
    }
}

#[test]
fn cardinality_at_pi_over_8_within_fixture() {
    let [a, b] = fixtures().net.cardinality;
    let g = PI / 8.0;
    for seed in 0..50 {
        let n = SphereNet::build(g, seed).unwrap().len() as f64;
        assert!(a / (g * g) <= n && n <= b / (g * g), "seed {seed}: {n} points");
    }
}

#[test]
fn within_matches_linear_scan() {
    let net = SphereNet::build(PI / 32.0, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let v = sample_direction(&mut rng) * 3.0;
        let phi = 0.5 * rng.random::<f64>();
        let mut fast = net.within(v, phi);
        fast.sort_unstable();
        let slow: Vec<usize> = (0..net.len()).filter(|&i| angle(v, net.directions()[i]).unwrap() <= phi).collect();
        assert_eq!(fast, slow);
    }
}

#[test]
fn covering_and_count_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let net = SphereNet::build(PI / 16.0, 3).unwrap();
    let (mut lo, mut hi) = (usize::MAX, 0);
    for _ in 0..100_000 {
        let c = net.covering_multiplicity(sample_direction(&mut rng)).unwrap();
        lo = lo.min(c);
        hi = hi.max(c);
    }
    assert_eq!(lo, 1);
    assert!(hi <= 25);

    for g in [PI / 8.0, PI / 32.0, PI / 128.0, PI / 256.0] {
        let net = SphereNet::build(g, 5).unwrap();
        for _ in 0..10_000 {
            let w = sample_direction(&mut rng);
            for k in 1..=3u32 {
                let c = net.count_within(w, k).unwrap();
                assert!(c <= ((2 * k + 1) * (2 * k + 1)) as usize, "gamma {g} k {k}: {c}");
            }
        }
    }
}

#[test]
fn zero_inputs_are_domain_errors() {
    let net = SphereNet::build(PI / 4.0, 0).unwrap();
    assert!(matches!(net.covering_multiplicity(Vec3::ZERO), Err(Error::Domain(_))));
    assert!(matches!(net.count_within(Vec3::E1, 0), Err(Error::Domain(_))));
}

#[test]
fn separated_decomposition_orthogonal_example() {
    let family = NetFamily::new(1);
    let pairs = family.separated_pair_decomposition(Vec3::E1, Vec3::E2, 1.0, 3).unwrap();
    assert!(!pairs.is_empty());
    let big_m = separation_ceiling(1.0, 3);
    assert_eq!(big_m, 12.0);
    for p in &pairs {
        let t = angle(p.omega1, p.omega2).unwrap();
        assert!(3.0 * p.gamma <= t && t <= big_m * p.gamma);
        assert!(angle(Vec3::E1, p.omega1).unwrap() <= p.gamma);
        assert!(angle(Vec3::E2, p.omega2).unwrap() <= p.gamma);
        let k = (1.0 / p.gamma).log2();
        assert_eq!(k, k.round(), "gamma {} is not dyadic", p.gamma);
    }
}

#[test]
fn separated_decomposition_rejects_collinear() {
    let family = NetFamily::new(1);
    let r = family.separated_pair_decomposition(Vec3::E1, Vec3::E1 * 2.0, 1.0, 3);
    assert!(matches!(r, Err(Error::Domain(_))));
    assert!(family.separated_pair_decomposition(Vec3::E1, Vec3::E2, 1.0, 2).is_err());
    assert!(family.separated_pair_decomposition(Vec3::E1, Vec3::E2, 1.5, 3).is_err());
}

#[test]
fn near_decomposition_equal_inputs() {
    for g in [PI / 8.0, PI / 32.0] {
        let net = SphereNet::build(g, 2).unwrap();
        let pairs = net.near_pair_decomposition(Vec3::E3, Vec3::E3, 1).unwrap();
        assert!(!pairs.is_empty());
        for p in pairs {
            assert!(angle(p.omega1, p.omega2).unwrap() <= 3.0 * g);
        }
    }
}

#[test]
fn near_decomposition_at_boundary_angle() {
    let g = PI / 16.0;
    let net = SphereNet::build(g, 2).unwrap();
    for k in 1..=3u32 {
        // Nudge inside so rounding cannot push the angle past kγ.
        let t = k as f64 * g * (1.0 - 1e-12);
        let xi2 = Vec3::new(t.cos(), t.sin(), 0.0);
        let pairs = net.near_pair_decomposition(Vec3::E1, xi2, k).unwrap();
        assert!(!pairs.is_empty());
        assert!(pairs.len() <= 625);
    }
    let far = Vec3::new(0.0, 1.0, 0.0);
    assert!(matches!(net.near_pair_decomposition(Vec3::E1, far, 1), Err(Error::Precondition(_))));
}

#[test]
fn overlap_with_thick_hyperplanes_counts_everything() {
    let g = PI / 32.0;
    let net = SphereNet::build(g, 1).unwrap();
    let n = 4.0;
    let x = SpacetimePoint::new(0.0, Vec3::new(0.0, 0.0, n));
    let (count, bound) = net.hyperplane_overlap_count(Vec3::E3, 0.5, 2.0 * n, n, x).unwrap();
    assert_eq!(count, net.within(Vec3::E3, 0.5).len());
    assert!(count as f64 <= fixtures().net.overlap * bound);
    assert!(2.0 * n / (n * g * g) > 0.5 / g);
}

#[test]
fn overlap_on_null_point_is_local() {
    let g = PI / 64.0;
    let net = SphereNet::build(g, 1).unwrap();
    let (n, d) = (8.0, 0.01);
    let x = SpacetimePoint::new(n, Vec3::new(0.0, 0.0, n));
    let (count, _) = net.hyperplane_overlap_count(Vec3::E3, 0.5, d, n, x).unwrap();
    // |−τ + ξ·ω| = N(1 − cos θ) ≤ d forces θ ≤ acos(1 − d/N) ≈ √(2d/N).
    let reach = (1.0 - d / n).acos();
    assert_eq!(count, net.within(Vec3::E3, reach).len());
}

#[test]
fn overlap_rejects_bad_ordering() {
    let net = SphereNet::build(PI / 8.0, 1).unwrap();
    let x = SpacetimePoint::new(0.0, Vec3::new(1.0, 0.0, 0.0));
    assert!(net.hyperplane_overlap_count(Vec3::E3, 0.1, 1.0, 1.0, x).is_err());
    assert!(net.hyperplane_overlap_count(Vec3::E3, 0.9, 1.0, 10.0, x).is_err());
}

#[test]
fn sector_null_point_is_in_hyperplane() {
    let w = Vec3::E1;
    let x = SpacetimePoint::new(3.0, w * 3.0);
    assert!(sector_in_hyperplane_check(Sign::Plus, 4.0, 0.1, 0.1, w, x, 1e-9).unwrap());
    let off = SpacetimePoint::new(0.0, Vec3::new(100.0, 0.0, 0.0));
    assert_eq!(sector_hyperplane_ratio(Sign::Plus, 4.0, 0.1, 0.1, w, off).unwrap(), None);
}

#[test]
fn net_json_round_trip() {
    let net = SphereNet::build(PI / 8.0, 12).unwrap();
    let back = SphereNet::from_json(&net.to_json().unwrap()).unwrap();
    assert_eq!(back.directions(), net.directions());
    assert_eq!(back.gamma(), net.gamma());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nets_are_separated_and_maximal(k in 2u32..6, seed in 0u64..1000) {
        let g = PI / (1u32 << k) as f64;
        let net = SphereNet::build(g, seed).unwrap();
        prop_assert!(min_pair_angle(&net) >= g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..2000 {
            prop_assert!(net.nearest_angle(sample_direction(&mut rng)) <= g);
        }
    }

    #[test]
    fn sector_points_lie_in_thickened_hyperplane(
        plus in any::<bool>(),
        gamma in 0.01..0.9f64,
        l in 0.01..2.0f64,
        t in 0.0..1.0f64,
        h in -1.0..1.0f64,
        frac in 0.5001..1.0f64,
        seed in any::<u64>(),
    ) {
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let n = 16.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = sample_direction(&mut rng);
        let e = w.any_orthogonal();
        let phi = gamma * t;
        let dir = (w * phi.cos() + e * phi.sin()) * sign.value();
        let x = SpacetimePoint::new(sign.value() * n * frac + l * h, dir * (n * frac));
        let r = sector_hyperplane_ratio(sign, n, l, gamma, w, x).unwrap();
        prop_assert!(r.is_some());
        prop_assert!(r.unwrap() <= fixtures().net.sector);
    }
}
