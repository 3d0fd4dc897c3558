use serde::Serialize;

use super::field::{l2_norm, SparseField};
use crate::error::{ensure, Result};
use crate::geometry::{in_annulus, Vec3};
use crate::sphere_net::SphereNet;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TubeSupNorm {
    /// (N/r) sup_ω ‖P_{ΔB_N ∩ T_r(ω)} u‖.
    pub value: f64,
    /// ‖u‖, for the comparison ‖u‖ ≲ ‖u‖_{N,r}.
    pub plain: f64,
    /// The maximising tube axis.
    pub direction: Vec3,
}

/// Per-column masses restricted to ΔB_N, with their spatial frequencies.
fn annulus_masses(u: &SparseField, n: f64) -> Vec<(Vec3, f64)> {
    let h = u.spacing();
    let cell = h.cell();
    u.columns()
        .iter()
        .filter_map(|c| {
            let xi = h.xi_of(c.k);
            in_annulus(xi.norm(), n).then(|| (xi, c.mass() * cell))
        })
        .collect()
}

fn in_tube(xi: Vec3, axis: Vec3, r: f64) -> bool {
    (xi - axis * xi.dot(axis)).norm2() <= r * r
}

fn tube_mass(cols: &[(Vec3, f64)], axis: Vec3, r: f64) -> f64 {
    cols.iter().filter(|(xi, _)| in_tube(*xi, axis, r)).map(|(_, m)| m).sum()
}

/// ‖u‖_{N,r} over the net directions, then refined by a shrinking pattern
/// search around the best few net points.
pub fn tube_sup_norm(u: &SparseField, n: f64, r: f64, net: &SphereNet) -> Result<TubeSupNorm> {
    ensure!(n > 0.0 && r > 0.0, Domain, "N and r must be positive");
    ensure!(r < n, Domain, "tube radius {r} must be below N = {n}");
    ensure!(
        (net.gamma() - r / n).abs() <= 1e-9 * (r / n),
        Precondition,
        "net spacing {} does not match r/N = {}",
        net.gamma(),
        r / n
    );
    let plain = l2_norm(u);
    let cols = annulus_masses(u, n);
    if cols.is_empty() {
        return Ok(TubeSupNorm { value: 0.0, plain, direction: Vec3::E3 });
    }

    // A tube about ℝω holds ξ iff θ(ξ, ±ω) ≤ arcsin(r/|ξ|).
    let dirs = net.directions();
    let mut mass = vec![0.0; dirs.len()];
    let mut hits = Vec::new();
    for &(xi, m) in &cols {
        let phi = (r / xi.norm()).min(1.0).asin();
        hits.clear();
        hits.extend(net.within(xi, phi));
        hits.extend(net.within(-xi, phi));
        hits.sort_unstable();
        hits.dedup();
        for &i in &hits {
            if in_tube(xi, dirs[i], r) {
                mass[i] += m;
            }
        }
    }
    let mut order: Vec<usize> = (0..dirs.len()).collect();
    order.sort_by(|&a, &b| mass[b].total_cmp(&mass[a]).then(a.cmp(&b)));

    let (mut best, mut best_dir) = (mass[order[0]], dirs[order[0]]);
    for &start in order.iter().take(3) {
        let (mut m, mut w) = (mass[start], dirs[start]);
        let mut step = net.gamma() / 2.0;
        while step > net.gamma() / 64.0 {
            let (e1, e2) = {
                let a = w.any_orthogonal();
                (a, w.cross(a))
            };
            let mut moved = false;
            for (dx, dy) in
                [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)]
            {
                let Some(cand) = (w + e1 * (dx * step) + e2 * (dy * step)).normalized() else { continue };
                let cm = tube_mass(&cols, cand, r);
                if cm > m {
                    m = cm;
                    w = cand;
                    moved = true;
                }
            }
            if !moved {
                step /= 2.0;
            }
        }
        if m > best {
            best = m;
            best_dir = w;
        }
    }
    Ok(TubeSupNorm { value: n / r * best.sqrt(), plain, direction: best_dir })
}

/// sup over translates I₁ = [jh, jh + len] (j ∈ ℤ, h the ξ step) of
/// ‖P_{ξ·ω ∈ I₁} u‖.
pub fn slab_sup_norm(u: &SparseField, omega: Vec3, slab_length: f64) -> Result<f64> {
    Ok(best_slab_window(u, omega, slab_length)?.map_or(0.0, |(_, m)| m.sqrt()))
}

/// The start of a maximising window for [`slab_sup_norm`] and the squared
/// mass it holds; `None` for an empty field.
pub fn best_slab_window(u: &SparseField, omega: Vec3, slab_length: f64) -> Result<Option<(f64, f64)>> {
    ensure!(slab_length > 0.0 && slab_length.is_finite(), Domain, "slab length must be positive");
    let w = omega.normalized().ok_or_else(|| crate::Error::Domain("slab direction must be nonzero".into()))?;
    let h = u.spacing();
    let cell = h.cell();
    let mut s: Vec<(f64, f64)> = u.columns().iter().map(|c| (h.xi_of(c.k).dot(w), c.mass() * cell)).collect();
    if s.is_empty() {
        return Ok(None);
    }
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    // An optimal window can be slid right until it starts at the lattice
    // point just below its leftmost member, so those starts suffice.
    let mut prefix = Vec::with_capacity(s.len() + 1);
    prefix.push(0.0);
    for (_, m) in &s {
        prefix.push(prefix[prefix.len() - 1] + m);
    }
    let mut best = (0.0, -1.0f64);
    for (pos, _) in &s {
        let start = (pos / h.xi).floor() * h.xi;
        let lo = s.partition_point(|p| p.0 < start);
        let hi = s.partition_point(|p| p.0 <= start + slab_length);
        let m = prefix[hi] - prefix[lo];
        if m > best.1 {
            best = (start, m);
        }
    }
    Ok(Some(best))
}
