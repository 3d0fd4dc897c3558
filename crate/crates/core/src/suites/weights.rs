//! Hyperbolic weight inequalities on sampled bilinear interactions.

use std::f64::consts::PI;

use rand::Rng;

use super::{Check, SuiteReport};
use crate::error::Result;
use crate::exec::{chunk_rng, chunks, Exec};
use crate::fixtures::{Fixtures, WeightFixtures};
use crate::geometry::{output_sign, Interaction, Sign, Smallness, SpacetimePoint};
use crate::sphere_net::sample_direction;

pub const INTERACTIONS: usize = 1_000_000;
const CHUNK: usize = 1 << 14;

/// Extremes of the weight ratios over a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightStats {
    pub evaluated: u64,
    /// Smallest max|𝔥ⱼ| / (min(|ξ₁|,|ξ₂|)θ₁₂²).
    pub min_ratio: f64,
    /// Smallest max|𝔥ⱼ| / (|ξ₁||ξ₂|θ₁₂²/|ξ₀|) off the low-output same-sign case.
    pub product_ratio: f64,
    /// Smallest θ₁₂ in the low-output same-sign case.
    pub low_output_theta: f64,
    /// Range of |𝔥₀| over its comparator on the dominant-output subsample.
    pub output: [f64; 2],
    pub dominant: u64,
}

impl WeightStats {
    fn empty() -> Self {
        WeightStats {
            evaluated: 0,
            min_ratio: f64::INFINITY,
            product_ratio: f64::INFINITY,
            low_output_theta: f64::INFINITY,
            output: [f64::INFINITY, 0.0],
            dominant: 0,
        }
    }

    fn merge(self, o: WeightStats) -> WeightStats {
        WeightStats {
            evaluated: self.evaluated + o.evaluated,
            min_ratio: self.min_ratio.min(o.min_ratio),
            product_ratio: self.product_ratio.min(o.product_ratio),
            low_output_theta: self.low_output_theta.min(o.low_output_theta),
            output: [self.output[0].min(o.output[0]), self.output[1].max(o.output[1])],
            dominant: self.dominant + o.dominant,
        }
    }
}

/// 2^u with u uniform in [lo, hi].
fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (lo + (hi - lo) * rng.random::<f64>()).exp2()
}

/// One interaction with both inputs near random cones. ξ₂ lies within a
/// log-uniform angle of ±ξ₁. Half the draws are spread out: |ξⱼ|
/// log-uniform in 2⁻⁸..2⁸ and weights log-uniform between 2⁻²⁰|ξⱼ| and |ξⱼ|.
/// The other half probe the tight cases, with |ξ₂|/|ξ₁| within a factor 2
/// and weights uniform up to |ξⱼ|.
pub fn sample_interaction(rng: &mut impl Rng) -> Interaction {
    let tight = rng.random::<bool>();
    let d1 = sample_direction(rng);
    let phi = log_uniform(rng, -14.0, PI.log2());
    let e = d1.any_orthogonal();
    let az = 2.0 * PI * rng.random::<f64>();
    let e = e * az.cos() + d1.cross(e) * az.sin();
    let flip = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let d2 = (d1 * phi.cos() + e * phi.sin()) * flip;
    let m1 = log_uniform(rng, -8.0, 8.0);
    let m2 = if tight { m1 * log_uniform(rng, -1.0, 1.0) } else { log_uniform(rng, -8.0, 8.0) };
    let mut point = |d: crate::geometry::Vec3, m: f64| {
        let cone = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let size = if tight { rng.random::<f64>() } else { log_uniform(rng, -20.0, 0.0) };
        let h = m * size * if rng.random::<bool>() { 1.0 } else { -1.0 };
        SpacetimePoint::new(cone * m + h, d * m)
    };
    let x1 = point(d1, m1);
    let x2 = point(d2, m2);
    Interaction::new(x1, x2)
}

/// Samples `n` interactions and evaluates all eight sign triples on each.
pub fn observe(n: usize, seed: u64) -> Result<WeightStats> {
    let small = Smallness::default();
    let parts = chunks(n, CHUNK);
    let stats = Exec::default().map(parts.len(), |c| -> Result<WeightStats> {
        let mut rng = chunk_rng(seed, c as u64);
        let mut s = WeightStats::empty();
        for _ in 0..parts[c].1 {
            let it = sample_interaction(&mut rng);
            if it.x0().xi.is_zero() {
                continue;
            }
            let out = output_sign(it.x0());
            for signs in Sign::triples() {
                let r = it.report(signs, small)?;
                s.evaluated += 1;
                if let Some(v) = r.min_ratio {
                    s.min_ratio = s.min_ratio.min(v);
                }
                if r.low_output_same_sign {
                    s.low_output_theta = s.low_output_theta.min(r.theta12);
                } else if let Some(v) = r.product_ratio {
                    s.product_ratio = s.product_ratio.min(v);
                }
                if signs.0 == out && r.dominant_output_weight {
                    if let Some(v) = r.output_ratio {
                        s.dominant += 1;
                        s.output = [s.output[0].min(v), s.output[1].max(v)];
                    }
                }
            }
        }
        Ok(s)
    });
    stats.into_iter().try_fold(WeightStats::empty(), |a, s| Ok(a.merge(s?)))
}

/// Raw extremes for calibration; `lower` is the smaller of the two minima.
pub fn observe_fixtures(seed: u64) -> Result<WeightFixtures> {
    let s = observe(INTERACTIONS, seed)?;
    Ok(WeightFixtures { lower: s.min_ratio.min(s.product_ratio), output: s.output })
}

/// Acceptance criterion 11.
pub fn criterion(fx: &Fixtures, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("weights", seed);
    let s = observe(INTERACTIONS, seed)?;
    let c = fx.weights.lower;
    rep.checks.push(Check::at_least("min-type ratio", s.min_ratio, c));
    rep.checks.push(Check::at_least("product-type ratio off low output", s.product_ratio, c));
    rep.checks.push(Check::within("output weight ratio, dominant subsample", s.output[0], fx.weights.output));
    rep.checks.push(Check::within("output weight ratio max, dominant subsample", s.output[1], fx.weights.output));
    rep.checks.push(Check::at_least("dominant subsample size", s.dominant as f64, 1000.0));
    rep.metric("evaluated", s.evaluated as f64);
    rep.metric("low_output_min_theta", s.low_output_theta);
    Ok(rep)
}
