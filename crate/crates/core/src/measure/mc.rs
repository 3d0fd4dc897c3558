use rand::Rng;

use super::{MeasureEstimate, Method};
use crate::error::{ensure, Result};
use crate::exec::{chunk_rng, chunks, Exec};
use crate::geometry::{Dim, Region, SpacetimePoint, Vec3};

/// Samples per RNG substream.
pub const MC_CHUNK: usize = 1 << 16;

/// Hit-or-miss volume of a bounded region inside its bounding box.
///
/// Spatial regions are sampled in ℝ³, spacetime regions in ℝ⁴.
pub fn mc_volume(region: &Region, n: u64, seed: u64) -> Result<MeasureEstimate> {
    mc_volume_with(region, n, seed, Exec::default())
}

pub fn mc_volume_with(region: &Region, n: u64, seed: u64, exec: Exec) -> Result<MeasureEstimate> {
    ensure!(n >= 1000, Domain, "mc_volume needs at least 1000 samples, got {n}");
    ensure!(region.is_bounded(), Domain, "mc_volume of an unbounded region");
    let b = region.bounds();
    // An empty bounding box is known empty without sampling.
    if b.is_empty() {
        return Ok(MeasureEstimate::exact(0.0));
    }
    let spacetime = region.dim() == Dim::Spacetime;
    let lo = b.xi_lo();
    let span = b.xi_hi() - lo;
    let (t0, tspan) = if spacetime { (b.tau.lo, b.tau.len()) } else { (0.0, 1.0) };
    let box_volume = span.x * span.y * span.z * tspan;
    if box_volume <= 0.0 {
        return Ok(MeasureEstimate::exact(0.0));
    }

    let parts = chunks(n as usize, MC_CHUNK);
    let hits: u64 = exec
        .map(parts.len(), |c| {
            let mut rng = chunk_rng(seed, c as u64);
            let mut h = 0u64;
            for _ in 0..parts[c].1 {
                let xi = Vec3::new(
                    lo.x + span.x * rng.random::<f64>(),
                    lo.y + span.y * rng.random::<f64>(),
                    lo.z + span.z * rng.random::<f64>(),
                );
                let tau = if spacetime { t0 + tspan * rng.random::<f64>() } else { 0.0 };
                h += region.contains_spacetime(SpacetimePoint::new(tau, xi)) as u64;
            }
            h
        })
        .into_iter()
        .sum();

    let p = hits as f64 / n as f64;
    // Shrunken proportion in the variance keeps stderr positive at p ∈ {0, 1}.
    let q = (hits as f64 + 0.5) / (n as f64 + 1.0);
    Ok(MeasureEstimate {
        value: box_volume * p,
        stderr: box_volume * (q * (1.0 - q) / n as f64).sqrt(),
        n_samples: n,
        method: Method::Mc,
    })
}
