use num_complex::Complex64;
use proptest::prelude::*;
use restriction_lab::exec::Exec;
use restriction_lab::geometry::{Direction, Region, Sign, SpacetimePoint, Vec3};
use restriction_lab::measure::mc_volume;
use restriction_lab::spectral::io::{from_json, read_binary, to_json, write_binary};
use restriction_lab::spectral::*;
use restriction_lab::sphere_net::SphereNet;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gaussian(region: &Region, h: Spacing, seed: u64) -> SparseField {
    populate_region(region, h, FillMode::Gaussian { seed }, DEFAULT_POINT_CAP).unwrap()
}

fn small_cone(sign: Sign, n: f64, l: f64) -> Region {
    Region::thick_cone(sign, n, l)
}

#[test]
fn l2_norm_basics() {
    let h = Spacing::uniform(1.0);
    assert_eq!(l2_norm(&SparseField::empty(h)), 0.0);
    let u = SparseField::from_entries(h, [(0, [0, 0, 0], c(1.0, 0.0))]).unwrap();
    assert_eq!(l2_norm(&u), 1.0);
    let v = u.scale(c(0.0, -3.0));
    assert!((l2_norm(&v) - 3.0).abs() < 1e-15);
}

#[test]
fn from_entries_sums_duplicates_and_drops_zeros() {
    let h = Spacing::uniform(0.5);
    let u = SparseField::from_entries(
        h,
        [(1, [0, 1, 0], c(1.0, 0.0)), (1, [0, 1, 0], c(-1.0, 0.0)), (2, [0, 0, 0], c(0.5, 0.5))],
    )
    .unwrap();
    assert_eq!(u.len(), 1);
    assert_eq!(u.get(2, [0, 0, 0]), c(0.5, 0.5));
}

#[test]
fn single_pair_product() {
    let h = Spacing::new(0.25, 0.5).unwrap();
    let (a, b) = (c(1.5, -0.5), c(0.25, 2.0));
    let u1 = SparseField::from_entries(h, [(3, [1, 2, 0], a)]).unwrap();
    let u2 = SparseField::from_entries(h, [(-1, [0, 1, 4], b)]).unwrap();
    let p = bilinear_product(&u1, &u2, &ProductOptions::default()).unwrap();
    assert_eq!(p.len(), 1);
    assert_eq!(p.get(2, [1, 3, 4]), a * b * h.cell());

    let signs = (Sign::Plus, Sign::Minus);
    let q = bilinear_product(&u1, &u2, &ProductOptions::symbol(SymbolKind::Theta12, signs)).unwrap();
    let theta = restriction_lab::geometry::angle(h.xi_of([1, 2, 0]), -h.xi_of([0, 1, 4])).unwrap();
    let got = q.get(2, [1, 3, 4]);
    assert!((got - a * b * h.cell() * theta).norm() < 1e-15);

    let empty = SparseField::empty(h);
    assert!(bilinear_product(&empty, &u2, &ProductOptions::default()).unwrap().is_empty());
    assert!(bilinear_product(&u1, &empty, &ProductOptions::default()).unwrap().is_empty());
}

#[test]
fn angle_symbol_skips_zero_frequency() {
    let h = Spacing::uniform(1.0);
    let u1 = SparseField::from_entries(h, [(0, [0, 0, 0], c(1.0, 0.0))]).unwrap();
    let u2 = SparseField::from_entries(h, [(0, [1, 0, 0], c(1.0, 0.0))]).unwrap();
    let opts = ProductOptions::symbol(SymbolKind::SqrtTheta12, (Sign::Plus, Sign::Plus));
    assert!(bilinear_product(&u1, &u2, &opts).unwrap().is_empty());
}

#[test]
fn spacing_mismatch_is_rejected() {
    let u1 = SparseField::from_entries(Spacing::uniform(1.0), [(0, [1, 0, 0], c(1.0, 0.0))]).unwrap();
    let u2 = SparseField::from_entries(Spacing::uniform(0.5), [(0, [1, 0, 0], c(1.0, 0.0))]).unwrap();
    assert!(bilinear_product(&u1, &u2, &ProductOptions::default()).is_err());
    assert!(trilinear_form(&u1, &u1, &u2).is_err());
}

#[test]
fn pair_cap_is_enforced() {
    let h = Spacing::new(0.5, 0.5).unwrap();
    let u = gaussian(&small_cone(Sign::Plus, 2.0, 0.5), h, 1);
    let opts = ProductOptions { pair_cap: 10.0, ..Default::default() };
    let err = bilinear_product(&u, &u, &opts).unwrap_err();
    assert!(matches!(err, restriction_lab::Error::Resource(_)));
}

#[test]
fn product_matches_brute_force_with_output_region() {
    let h = Spacing::new(0.25, 0.5).unwrap();
    let u1 = gaussian(&small_cone(Sign::Plus, 2.0, 0.5), h, 3);
    let u2 = gaussian(&small_cone(Sign::Minus, 2.0, 0.5), h, 4);
    let out = small_cone(Sign::Plus, 1.0, 0.5);
    let signs = (Sign::Plus, Sign::Minus);
    let opts = ProductOptions::symbol(SymbolKind::Theta12, signs).output(out.clone());
    let fast = bilinear_product(&u1, &u2, &opts).unwrap();

    let mut entries = Vec::new();
    for (t1, k1, a) in u1.entries() {
        for (t2, k2, b) in u2.entries() {
            let k = [k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]];
            let t = t1 + t2;
            if !out.contains_spacetime(h.point(t, k)) {
                continue;
            }
            let w = SymbolKind::Theta12.weight(h.xi_of(k1), h.xi_of(k2), signs).unwrap();
            entries.push((t, k, a * b * w * h.cell()));
        }
    }
    let slow = SparseField::from_entries(h, entries).unwrap();
    assert!(!slow.is_empty());
    assert_eq!(fast.len(), slow.len());
    for (t, k, v) in slow.entries() {
        assert!((fast.get(t, k) - v).norm() <= 1e-12 * v.norm().max(1e-12), "mismatch at {t} {k:?}");
    }
}

#[test]
fn trilinear_matches_inner_product() {
    let h = Spacing::new(0.25, 0.5).unwrap();
    for seed in 0..100u64 {
        let u1 = gaussian(&small_cone(Sign::Plus, 1.0, 0.5), h, 3 * seed);
        let u2 = gaussian(&small_cone(Sign::Minus, 1.0, 0.5), h, 3 * seed + 1);
        let u0 = gaussian(&Region::TimeSlab { lo: -1.0, hi: 1.0 }.and(Region::Annulus { n: 1.0 }), h, 3 * seed + 2);
        let via_product = inner(&bilinear_product(&u1, &u2, &ProductOptions::default()).unwrap(), &u0).unwrap();
        let direct = trilinear_form(&u0, &u1, &u2).unwrap();
        assert!((via_product - direct).norm() <= 1e-10 * direct.norm(), "seed {seed}");
    }
}

#[test]
fn trilinear_self_pairing_is_norm_squared() {
    let h = Spacing::new(0.25, 0.5).unwrap();
    let u1 = gaussian(&small_cone(Sign::Plus, 1.0, 0.5), h, 8);
    let u2 = gaussian(&small_cone(Sign::Plus, 2.0, 0.5), h, 9);
    let u0 = bilinear_product(&u1, &u2, &ProductOptions::default()).unwrap();
    let t = trilinear_form(&u0, &u1, &u2).unwrap();
    let n2 = l2_norm(&u0).powi(2);
    assert!((t - c(n2, 0.0)).norm() <= 1e-10 * n2);
    let empty = SparseField::empty(h);
    assert_eq!(trilinear_form(&empty, &u1, &u2).unwrap(), c(0.0, 0.0));
}

/// Exchanging the roles of u₀ and u₁ conjugates both and reflects u₂:
/// I(u₀, u₁, u₂) = I(ū₁, ū₀, u₂(−·)).
#[test]
fn trilinear_permutation_rule() {
    let h = Spacing::new(0.25, 0.5).unwrap();
    let conj = |u: &SparseField| SparseField::from_entries(h, u.entries().map(|(t, k, v)| (t, k, v.conj()))).unwrap();
    let reflect = |u: &SparseField| {
        SparseField::from_entries(h, u.entries().map(|(t, k, v)| (-t, [-k[0], -k[1], -k[2]], v))).unwrap()
    };
    for seed in 0..10u64 {
        let u1 = gaussian(&small_cone(Sign::Plus, 1.0, 0.5), h, 10 * seed);
        let u2 = gaussian(&small_cone(Sign::Minus, 2.0, 0.5), h, 10 * seed + 1);
        let u0 = gaussian(&small_cone(Sign::Minus, 2.0, 1.0), h, 10 * seed + 2);
        let a = trilinear_form(&u0, &u1, &u2).unwrap();
        let b = trilinear_form(&conj(&u1), &conj(&u0), &reflect(&u2)).unwrap();
        assert!(a.norm() > 0.0);
        assert!((a.norm() - b.norm()).abs() <= 1e-10 * a.norm(), "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn product_is_bit_identical_across_exec() {
    let h = Spacing::new(0.25, 0.5).unwrap();
    let u1 = gaussian(&small_cone(Sign::Plus, 2.0, 0.5), h, 21);
    let u2 = gaussian(&small_cone(Sign::Plus, 4.0, 0.5), h, 22);
    let base = ProductOptions::symbol(SymbolKind::SqrtTheta12, (Sign::Plus, Sign::Plus)).output(small_cone(
        Sign::Plus,
        4.0,
        1.0,
    ));
    let seq = bilinear_product(&u1, &u2, &base.clone().exec(Exec::Sequential)).unwrap();
    let par = bilinear_product(&u1, &u2, &base.exec(Exec::Parallel)).unwrap();
    assert_eq!(seq, par);
    let a = trilinear_form_with(&seq, &u1, &u2, Exec::Sequential).unwrap();
    let b = trilinear_form_with(&seq, &u1, &u2, Exec::Parallel).unwrap();
    assert_eq!(a, b);
    let r = small_cone(Sign::Minus, 2.0, 1.0);
    let ps = populate_region_with(&r, h, FillMode::Gaussian { seed: 5 }, DEFAULT_POINT_CAP, Exec::Sequential).unwrap();
    let pp = populate_region_with(&r, h, FillMode::Gaussian { seed: 5 }, DEFAULT_POINT_CAP, Exec::Parallel).unwrap();
    assert_eq!(ps, pp);
}

#[test]
fn output_obeys_triangle_dichotomy() {
    let h = Spacing::new(0.25, 0.5).unwrap();
    let (n1, n2) = (2.0, 4.0);
    let u1 = gaussian(&small_cone(Sign::Plus, n1, 0.5), h, 31);
    let u2 = gaussian(&small_cone(Sign::Minus, n2, 0.5), h, 32);
    let p = bilinear_product(&u1, &u2, &ProductOptions::default()).unwrap();
    let mut violations = 0;
    for col in p.columns() {
        let n0 = h.xi_of(col.k).norm();
        // |ξ₁| ∈ (N₁/2, N₁], |ξ₂| ∈ (N₂/2, N₂].
        if n0 > n1 + n2 + 1e-12 || n0 < n2 / 2.0 - n1 - 1e-12 {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn product_support_is_the_sumset() {
    let h = Spacing::uniform(0.5);
    let u1 = gaussian(&small_cone(Sign::Plus, 1.0, 0.5), h, 41);
    let u2 = gaussian(&small_cone(Sign::Minus, 1.0, 0.5), h, 42);
    let p = bilinear_product(&u1, &u2, &ProductOptions::default()).unwrap();
    let mut sums = std::collections::BTreeSet::new();
    for (t1, k1, _) in u1.entries() {
        for (t2, k2, _) in u2.entries() {
            sums.insert((t1 + t2, [k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]]));
        }
    }
    for (t, k, _) in p.entries() {
        assert!(sums.contains(&(t, k)));
    }
}

#[test]
fn null_collinear_pairs_vanish_under_theta12() {
    let h = Spacing::uniform(0.5);
    // Exactly null points on the +e1 ray, both with sign +.
    let u1 = SparseField::from_entries(h, (2..5).map(|k| (k, [k, 0, 0], c(1.0, 0.0)))).unwrap();
    let u2 = SparseField::from_entries(h, (3..7).map(|k| (k, [k, 0, 0], c(0.0, 1.0)))).unwrap();
    let opts = ProductOptions::symbol(SymbolKind::Theta12, (Sign::Plus, Sign::Plus));
    assert!(bilinear_product(&u1, &u2, &opts).unwrap().is_empty());
    assert!(!bilinear_product(&u1, &u2, &ProductOptions::default()).unwrap().is_empty());
}

#[test]
fn project_properties() {
    let h = Spacing::new(0.25, 0.5).unwrap();
    let u = gaussian(&small_cone(Sign::Plus, 4.0, 1.0), h, 51);
    assert_eq!(project(&u, &Region::everything()), u);
    let a = Region::ball(Vec3::new(1.0, 1.0, 0.0), 2.0);
    let pa = project(&u, &a);
    assert_eq!(project(&pa, &a), pa);
    assert!(l2_norm(&pa) <= l2_norm(&u));
    // Plancherel over a partition into A and its complement.
    let complement =
        SparseField::from_entries(h, u.entries().filter(|(t, k, _)| !a.contains_spacetime(h.point(*t, *k)))).unwrap();
    let total = l2_norm(&pa).powi(2) + l2_norm(&complement).powi(2);
    assert!((total - l2_norm(&u).powi(2)).abs() <= 1e-12 * total);
}

#[test]
fn populate_count_matches_volume() {
    let h = Spacing::uniform(0.25);
    let region = small_cone(Sign::Plus, 8.0, 1.0);
    let u = populate_region(&region, h, FillMode::Ones, DEFAULT_POINT_CAP).unwrap();
    let vol = mc_volume(&region, 2_000_000, 7).unwrap();
    let predicted = vol.value / h.cell();
    let rel = (u.len() as f64 - predicted).abs() / predicted;
    assert!(rel <= 0.10, "count {} vs predicted {predicted}", u.len());
    assert!(u.entries().all(|(t, k, v)| v == c(1.0, 0.0) && region.contains_spacetime(h.point(t, k))));
}

#[test]
fn populate_edge_cases() {
    let h = Spacing::uniform(0.5);
    let nothing = Region::Union { regions: vec![] }.and(small_cone(Sign::Plus, 2.0, 1.0));
    assert!(populate_region(&nothing, h, FillMode::Ones, 10).unwrap().is_empty());
    let a = gaussian(&small_cone(Sign::Plus, 2.0, 1.0), h, 9);
    let b = gaussian(&small_cone(Sign::Plus, 2.0, 1.0), h, 9);
    assert_eq!(a, b);
    let err = populate_region(&small_cone(Sign::Plus, 2.0, 1.0), h, FillMode::Ones, 10).unwrap_err();
    assert!(err.to_string().contains("lattice points"));
    assert!(populate_region(&Region::Annulus { n: 2.0 }, h, FillMode::Ones, 10).is_err());
}

#[test]
fn binary_and_json_round_trip() {
    let h = Spacing::new(0.125, 0.5).unwrap();
    let u = gaussian(&small_cone(Sign::Minus, 2.0, 0.5), h, 61);
    let mut buf = Vec::new();
    write_binary(&u, &mut buf).unwrap();
    assert_eq!(&buf[..4], b"RLSF");
    assert_eq!(read_binary(&buf[..]).unwrap(), u);
    assert_eq!(from_json(&to_json(&u).unwrap()).unwrap(), u);

    let mut trailing = buf.clone();
    trailing.push(0);
    assert!(read_binary(&trailing[..]).is_err());
    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(read_binary(&bad[..]).is_err());
    assert!(read_binary(&buf[..buf.len() - 3]).is_err());
    assert!(from_json(r#"{"spacing": {"tau": 1, "xi": 1}, "entries": [], "extra": 1}"#).is_err());
}

#[test]
fn tube_sup_norm_examples() {
    let (n, r) = (8.0, 2.0);
    let h = Spacing::new(0.5, 0.5).unwrap();
    let net = SphereNet::build(r / n, 1).unwrap();
    let axis = Direction::new(Vec3::new(1.0, 2.0, 2.0).normalized().unwrap()).unwrap();

    // All mass inside one tube: the sup recovers (N/r)‖u‖.
    let tube =
        Region::Tube { r: r * 0.6, omega: axis }.and(Region::Annulus { n }).and(Region::TimeSlab { lo: 0.0, hi: 0.5 });
    let u = gaussian(&tube, h, 71);
    let t = tube_sup_norm(&u, n, r, &net).unwrap();
    assert!((t.value - n / r * t.plain).abs() <= 1e-12 * t.value);
    assert!(t.direction.dot(axis.vec()).abs() > (0.4 * r / n).cos());

    // Spherically symmetric coefficients: comparable to the plain norm.
    let shell = Region::Annulus { n }.and(Region::TimeSlab { lo: 0.0, hi: 0.0 });
    let sym = populate_region(&shell, h, FillMode::Ones, DEFAULT_POINT_CAP).unwrap();
    let s = tube_sup_norm(&sym, n, r, &net).unwrap();
    let ratio = s.value / s.plain;
    assert!(ratio > 0.5 && ratio < 4.0, "ratio {ratio}");

    assert!(tube_sup_norm(&u, n, n, &net).is_err());
    assert!(tube_sup_norm(&u, n, 1.0, &net).is_err());
}

#[test]
fn slab_sup_norm_examples() {
    let h = Spacing::uniform(1.0);
    let e1 = Vec3::E1;
    // M = 4 disjoint unit slabs along e1 with equal mass.
    let u = SparseField::from_entries(h, (0..4).flat_map(|j| (0..3).map(move |y| (0, [3 * j, y, 0], c(1.0, 0.0)))))
        .unwrap();
    let full = l2_norm(&u);
    assert!((slab_sup_norm(&u, e1, 1.0).unwrap() - full / 2.0).abs() < 1e-12);
    assert!((slab_sup_norm(&u, e1, 100.0).unwrap() - full).abs() < 1e-12);
    let single = SparseField::from_entries(h, [(0, [2, 0, 0], c(2.0, 0.0)), (1, [2, 5, 1], c(1.0, 0.0))]).unwrap();
    assert!((slab_sup_norm(&single, e1, 0.5).unwrap() - l2_norm(&single)).abs() < 1e-12);
    assert!(slab_sup_norm(&u, Vec3::ZERO, 1.0).is_err());
    assert!(slab_sup_norm(&u, e1, 0.0).is_err());
}

fn small_field() -> impl Strategy<Value = SparseField> {
    prop::collection::vec(((-3i64..3), (-3i64..3), (-3i64..3), (-3i64..3), -2.0f64..2.0, -2.0f64..2.0), 0..40).prop_map(
        |v| {
            SparseField::from_entries(
                Spacing::new(0.5, 0.5).unwrap(),
                v.into_iter().map(|(t, x, y, z, re, im)| (t, [x, y, z], c(re, im))),
            )
            .unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slab_sup_norm_is_monotone(u in small_field(), len in 0.1f64..3.0, extra in 0.0f64..3.0) {
        let w = Vec3::new(1.0, 0.5, -0.25);
        let a = slab_sup_norm(&u, w, len).unwrap();
        let b = slab_sup_norm(&u, w, len + extra).unwrap();
        prop_assert!(b >= a);
        prop_assert!(b <= l2_norm(&u) * (1.0 + 1e-12));
    }

    #[test]
    fn product_is_bilinear(u1 in small_field(), u2 in small_field(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let l = c(re, im);
        let opts = ProductOptions::default();
        let a = bilinear_product(&u1.scale(l), &u2, &opts).unwrap();
        let b = bilinear_product(&u1, &u2, &opts).unwrap().scale(l);
        for (t, k, v) in b.entries() {
            prop_assert!((a.get(t, k) - v).norm() <= 1e-12 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn product_commutes_for_plain_symbol(u1 in small_field(), u2 in small_field()) {
        let opts = ProductOptions::default();
        let a = bilinear_product(&u1, &u2, &opts).unwrap();
        let b = bilinear_product(&u2, &u1, &opts).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (t, k, v) in a.entries() {
            prop_assert!((b.get(t, k) - v).norm() <= 1e-12 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn binary_round_trip(u in small_field()) {
        let mut buf = Vec::new();
        write_binary(&u, &mut buf).unwrap();
        prop_assert_eq!(read_binary(&buf[..]).unwrap(), u);
    }

    #[test]
    fn projection_is_idempotent_contraction(u in small_field(), cx in -1.0f64..1.0, rad in 0.1f64..2.0) {
        let a = Region::ball(Vec3::new(cx, 0.0, 0.0), rad).translate(SpacetimePoint::new(0.0, Vec3::ZERO));
        let p = project(&u, &a);
        prop_assert_eq!(project(&p, &a), p.clone());
        prop_assert!(l2_norm(&p) <= l2_norm(&u));
    }
}
