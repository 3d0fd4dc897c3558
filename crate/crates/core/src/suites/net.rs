//! Direction-net suite: covering, local counts, decompositions and the
//! hyperplane lemmas.

use std::f64::consts::PI;

use rand::Rng;

use super::{Check, Row, SuiteReport};
use crate::error::Result;
use crate::exec::{chunk_rng, Exec};
use crate::fixtures::{Fixtures, NetFixtures};
use crate::geometry::{angle, Sign, SpacetimePoint, Vec3};
use crate::sphere_net::{sample_direction, sector_hyperplane_ratio, separation_ceiling, NetFamily, SphereNet};

/// γ = π/4, π/8, …, π/256.
pub fn criterion_gammas() -> Vec<f64> {
    (2..=8).map(|k| PI / (1u64 << k) as f64).collect()
}

pub const CRITERION_SAMPLES: usize = 100_000;

/// A random direction within angle `phi` of `axis`, uniform in solid angle.
fn direction_near(rng: &mut impl Rng, axis: Vec3, phi: f64) -> Vec3 {
    let cos_t = 1.0 - rng.random::<f64>() * (1.0 - phi.cos());
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let az = rng.random::<f64>() * 2.0 * PI;
    let e1 = axis.any_orthogonal();
    let e2 = axis.cross(e1);
    axis * cos_t + (e1 * az.cos() + e2 * az.sin()) * sin_t
}

/// Covering multiplicity in [1, 25] and count_within ≤ (2k+1)² for
/// k = 1, 2, 3 on `samples` random directions per net.
pub fn covering(gammas: &[f64], samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("net covering", seed);
    let mut mult = (usize::MAX, 0usize);
    let mut counts = [0usize; 3];
    for (g, &gamma) in gammas.iter().enumerate() {
        let net = SphereNet::build(gamma, seed)?;
        let per_chunk = 4096;
        let chunks = samples.div_ceil(per_chunk);
        let parts = Exec::default().map(chunks, |c| -> Result<(usize, usize, [usize; 3])> {
            let mut rng = chunk_rng(seed ^ ((g as u64) << 32), c as u64);
            let (mut lo, mut hi, mut cw) = (usize::MAX, 0, [0usize; 3]);
            for _ in 0..per_chunk.min(samples - c * per_chunk) {
                let m = net.covering_multiplicity(sample_direction(&mut rng))?;
                lo = lo.min(m);
                hi = hi.max(m);
                let w = sample_direction(&mut rng);
                for k in 1..=3u32 {
                    cw[k as usize - 1] = cw[k as usize - 1].max(net.count_within(w, k)?);
                }
            }
            Ok((lo, hi, cw))
        });
        let (mut lo, mut hi, mut cw) = (usize::MAX, 0, [0usize; 3]);
        for p in parts {
            let (a, b, c) = p?;
            lo = lo.min(a);
            hi = hi.max(b);
            for k in 0..3 {
                cw[k] = cw[k].max(c[k]);
            }
        }
        rep.rows.push(Row::new("covering_multiplicity", &[("gamma", gamma)], hi as f64, 0.0, 25.0));
        rep.metric(&format!("cardinality_gamma_pi_over_{}", (PI / gamma).round()), net.len() as f64);
        mult = (mult.0.min(lo), mult.1.max(hi));
        for k in 0..3 {
            counts[k] = counts[k].max(cw[k]);
        }
    }
    rep.checks.push(Check::at_least("min covering multiplicity", mult.0 as f64, 1.0));
    rep.checks.push(Check::at_most("max covering multiplicity", mult.1 as f64, 25.0));
    for k in 1..=3 {
        let bound = ((2 * k + 1) * (2 * k + 1)) as f64;
        rep.checks.push(Check::at_most(format!("max count_within k={k}"), counts[k - 1] as f64, bound));
    }
    Ok(rep)
}

/// Acceptance criterion 1.
pub fn criterion(seed: u64) -> Result<SuiteReport> {
    covering(&criterion_gammas(), CRITERION_SAMPLES, seed)
}

/// min and max of |Ω(γ)|·γ² over the given nets.
pub fn cardinality_range(gammas: &[f64], seeds: &[u64]) -> Result<(f64, f64)> {
    let jobs: Vec<(f64, u64)> = gammas.iter().flat_map(|&g| seeds.iter().map(move |&s| (g, s))).collect();
    let vals = Exec::default().map(jobs.len(), |i| -> Result<f64> {
        let (g, s) = jobs[i];
        Ok(SphereNet::build(g, s)?.len() as f64 * g * g)
    });
    let mut r = (f64::INFINITY, 0.0f64);
    for v in vals {
        let v = v?;
        r = (r.0.min(v), r.1.max(v));
    }
    Ok(r)
}

/// Random pairs whose angle is at least `min_angle`; smaller angles need
/// nets finer than desk scale allows.
fn separated_input(rng: &mut impl Rng, min_angle: f64) -> (Vec3, Vec3) {
    loop {
        let a = sample_direction(rng) * (0.5 + rng.random::<f64>());
        let b = sample_direction(rng) * (0.5 + rng.random::<f64>());
        if angle(a, b).is_ok_and(|t| t >= min_angle) {
            return (a, b);
        }
    }
}

pub const SEPARATED_MIN_ANGLE: f64 = 0.25;

/// Separated decomposition with γ* = 1, m = 3: every list nonempty and in
/// its angle window; returns the longest list.
pub fn separated_pairs(pairs: usize, seed: u64) -> Result<(SuiteReport, usize)> {
    let mut rep = SuiteReport::new("separated pairs", seed);
    let family = NetFamily::new(seed);
    let big_m = separation_ceiling(1.0, 3);
    let mut rng = chunk_rng(seed, 0x5e9);
    let (mut empty, mut outside, mut longest) = (0u64, 0u64, 0usize);
    for _ in 0..pairs {
        let (a, b) = separated_input(&mut rng, SEPARATED_MIN_ANGLE);
        let list = family.separated_pair_decomposition(a, b, 1.0, 3)?;
        if list.is_empty() {
            empty += 1;
        }
        for p in &list {
            let t = angle(p.omega1, p.omega2)?;
            let inside = angle(a, p.omega1)? <= p.gamma && angle(b, p.omega2)? <= p.gamma;
            if !inside || t < 3.0 * p.gamma || t > big_m * p.gamma {
                outside += 1;
            }
        }
        longest = longest.max(list.len());
    }
    rep.checks.push(Check::none("empty separated decompositions", empty));
    rep.checks.push(Check::none("separated pairs outside their window", outside));
    rep.metric("separated_pairs_longest", longest as f64);
    Ok((rep, longest))
}

/// Near decomposition with θ(ξ₁, ξ₂) ≤ kγ: nonempty, angle ≤ (k+2)γ and at
/// most 25² pairs.
pub fn near_pairs(samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("near pairs", seed);
    let mut rng = chunk_rng(seed, 0x4ea);
    let (mut empty, mut wide, mut longest) = (0u64, 0u64, 0usize);
    for (g, gamma) in [PI / 8.0, PI / 32.0].into_iter().enumerate() {
        let net = SphereNet::build(gamma, seed + g as u64)?;
        for i in 0..samples {
            let k = 1 + (i % 3) as u32;
            let a = sample_direction(&mut rng);
            // Every fourth pair sits exactly at the angle kγ.
            let phi = if i % 4 == 0 { k as f64 * gamma } else { rng.random::<f64>() * k as f64 * gamma };
            let e = a.any_orthogonal();
            let b = a * phi.cos() + e * phi.sin();
            let phi_eff = angle(a, b)?;
            if phi_eff > k as f64 * gamma {
                continue;
            }
            let list = net.near_pair_decomposition(a, b, k)?;
            empty += list.is_empty() as u64;
            for p in &list {
                if angle(p.omega1, p.omega2)? > (k + 2) as f64 * gamma {
                    wide += 1;
                }
            }
            longest = longest.max(list.len());
        }
    }
    rep.checks.push(Check::none("empty near decompositions", empty));
    rep.checks.push(Check::none("near pairs wider than (k+2)gamma", wide));
    rep.checks.push(Check::at_most("longest near decomposition", longest as f64, 625.0));
    Ok(rep)
}

/// Largest count/bound of the hyperplane overlap lemma over a dyadic sweep
/// of (γ, γ′, d, N) with `per_cell` random points per cell.
pub fn overlap_max_ratio(per_cell: usize, seed: u64) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut cell = 0u64;
    for gamma in [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0] {
        let net = SphereNet::build(gamma, seed)?;
        for gp_mult in [2.0, 4.0, 8.0] {
            let gp = gamma * gp_mult;
            if gp >= 1.0 {
                continue;
            }
            for d in [0.25, 1.0, 4.0] {
                for n in [16.0, 64.0, 256.0] {
                    let mut rng = chunk_rng(seed, 0x0e7 + cell);
                    cell += 1;
                    for _ in 0..per_cell {
                        let w0 = sample_direction(&mut rng);
                        let dir = direction_near(&mut rng, w0, gp);
                        let m = n * (0.5 + 1.5 * rng.random::<f64>());
                        let xi = dir * m;
                        // τ near the hyperplanes of directions close to ξ.
                        let tau = xi.dot(w0) + (2.0 * rng.random::<f64>() - 1.0) * (d + m * gp * gp);
                        let (count, bound) =
                            net.hyperplane_overlap_count(w0, gp, d, n, SpacetimePoint::new(tau, xi))?;
                        worst = worst.max(count as f64 / bound);
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Largest |−τ + ξ·ω| / max(L, Nγ²) over `samples` points of sectors.
pub fn sector_max_ratio(samples: usize, seed: u64) -> Result<f64> {
    let cells: Vec<(Sign, f64, f64, f64)> = Sign::BOTH
        .into_iter()
        .flat_map(|s| {
            [4.0, 64.0, 1024.0].into_iter().flat_map(move |n| {
                [0.25, 1.0, 4.0].into_iter().flat_map(move |l| [0.5, 0.125, 1.0 / 32.0].map(|g| (s, n, l, g)))
            })
        })
        .collect();
    let per = samples.div_ceil(cells.len());
    let parts = Exec::default().map(cells.len(), |c| -> Result<f64> {
        let (sign, n, l, gamma) = cells[c];
        let mut rng = chunk_rng(seed, 0x5ec + c as u64);
        let mut worst = 0.0f64;
        for _ in 0..per {
            let w = sample_direction(&mut rng);
            let m = n / 2.0 + rng.random::<f64>() * n / 2.0;
            let xi = direction_near(&mut rng, w, gamma) * (m * sign.value());
            let tau = sign.value() * m + (2.0 * rng.random::<f64>() - 1.0) * l;
            if let Some(r) = sector_hyperplane_ratio(sign, n, l, gamma, w, SpacetimePoint::new(tau, xi))? {
                worst = worst.max(r);
            }
        }
        Ok(worst)
    });
    parts.into_iter().try_fold(0.0f64, |a, r| Ok(a.max(r?)))
}

/// Sample sizes of the full suite.
#[derive(Clone, Copy, Debug)]
pub struct NetScale {
    pub covering_samples: usize,
    pub separated_pairs: usize,
    pub near_samples: usize,
    pub overlap_per_cell: usize,
    pub sector_samples: usize,
}

impl NetScale {
    pub const FULL: NetScale = NetScale {
        covering_samples: CRITERION_SAMPLES,
        separated_pairs: 10_000,
        near_samples: 2_000,
        overlap_per_cell: 1_000,
        sector_samples: 1_000_000,
    };
}

/// Raw statistics for calibration.
pub fn observe_fixtures(seed: u64, scale: NetScale) -> Result<NetFixtures> {
    let gammas = criterion_gammas();
    let (lo, hi) = cardinality_range(&gammas[..5], &[seed, seed + 1, seed + 2])?;
    let (lo8, hi8) = cardinality_range(&[PI / 8.0], &(0..50).map(|i| seed + 100 + i).collect::<Vec<_>>())?;
    let (_, longest) = separated_pairs(scale.separated_pairs, seed)?;
    Ok(NetFixtures {
        cardinality: [lo.min(lo8), hi.max(hi8)],
        separated_pairs: longest as f64,
        overlap: overlap_max_ratio(scale.overlap_per_cell, seed)?,
        sector: sector_max_ratio(scale.sector_samples, seed)?,
    })
}

/// Every net check, against the fixtures.
pub fn full(fx: &Fixtures, seed: u64, gammas: &[f64], scale: NetScale) -> Result<SuiteReport> {
    let mut rep = covering(gammas, scale.covering_samples, seed)?;
    rep.suite = "net".into();
    let f = &fx.net;
    for &g in gammas.iter().filter(|&&g| g <= PI / 4.0 + 1e-12) {
        let net = SphereNet::build(g, seed)?;
        rep.checks.push(Check::within(
            format!("cardinality * gamma^2 at gamma = {g:.5}"),
            net.len() as f64 * g * g,
            f.cardinality,
        ));
    }
    let (sep, longest) = separated_pairs(scale.separated_pairs, seed)?;
    rep.merge(sep);
    rep.checks.push(Check::at_most("separated decomposition length", longest as f64, f.separated_pairs));
    rep.merge(near_pairs(scale.near_samples, seed)?);
    let overlap = overlap_max_ratio(scale.overlap_per_cell, seed)?;
    rep.checks.push(Check::at_most("hyperplane overlap count / bound", overlap, f.overlap));
    let sector = sector_max_ratio(scale.sector_samples, seed)?;
    rep.checks.push(Check::at_most("sector to hyperplane ratio", sector, f.sector));
    Ok(rep)
}
