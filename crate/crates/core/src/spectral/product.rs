use num_complex::Complex64;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::field::{Column, SparseField};
use crate::error::{ensure, Error, Result};
use crate::exec::Exec;
use crate::geometry::{angle_unchecked, Region, Sign, Vec3};

/// Default cap on |entries(u₁)|·|entries(u₂)|.
pub const DEFAULT_PAIR_CAP: f64 = 1e10;

/// Weight attached to each interacting pair of spatial frequencies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "symbol", rename_all = "snake_case")]
pub enum SymbolKind {
    One,
    /// θ₁₂ = θ(±₁ξ₁, ±₂ξ₂).
    Theta12,
    SqrtTheta12,
    /// θ₁₂ on {θ₁₂ ≤ threshold}, zero elsewhere.
    Theta12Small {
        threshold: f64,
    },
}

impl SymbolKind {
    pub const DEFAULT_SMALL: f64 = 0.125;

    pub fn validate(&self) -> Result<()> {
        if let SymbolKind::Theta12Small { threshold } = self {
            ensure!(*threshold > 0.0 && *threshold < 1.0, Domain, "threshold {threshold} outside (0, 1)");
        }
        Ok(())
    }

    /// The weight for one pair, `None` when the pair is skipped (ξ = 0 under
    /// an angle symbol).
    pub fn weight(&self, xi1: Vec3, xi2: Vec3, signs: (Sign, Sign)) -> Option<f64> {
        if *self == SymbolKind::One {
            return Some(1.0);
        }
        if xi1.is_zero() || xi2.is_zero() {
            return None;
        }
        let theta = angle_unchecked(xi1 * signs.0.value(), xi2 * signs.1.value());
        Some(match *self {
            SymbolKind::One => 1.0,
            SymbolKind::Theta12 => theta,
            SymbolKind::SqrtTheta12 => theta.sqrt(),
            SymbolKind::Theta12Small { threshold } => {
                if theta <= threshold {
                    theta
                } else {
                    0.0
                }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductOptions {
    pub symbol: SymbolKind,
    /// (±₁, ±₂), used only by the angle symbols.
    pub signs: (Sign, Sign),
    /// Output entries outside this region are never accumulated.
    pub output_region: Option<Region>,
    pub pair_cap: f64,
    pub exec: Exec,
}

impl Default for ProductOptions {
    fn default() -> Self {
        ProductOptions {
            symbol: SymbolKind::One,
            signs: (Sign::Plus, Sign::Plus),
            output_region: None,
            pair_cap: DEFAULT_PAIR_CAP,
            exec: Exec::default(),
        }
    }
}

impl ProductOptions {
    pub fn symbol(symbol: SymbolKind, signs: (Sign, Sign)) -> Self {
        ProductOptions { symbol, signs, ..Default::default() }
    }

    pub fn output(mut self, region: Region) -> Self {
        self.output_region = Some(region);
        self
    }

    pub fn exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

/// Contiguous runs of columns sharing k_x: (k_x, start, end).
fn planes(cols: &[Column]) -> Vec<(i64, usize, usize)> {
    let mut out: Vec<(i64, usize, usize)> = Vec::new();
    for (i, c) in cols.iter().enumerate() {
        match out.last_mut() {
            Some(p) if p.0 == c.k[0] => p.2 = i + 1,
            _ => out.push((c.k[0], i, i + 1)),
        }
    }
    out
}

fn find_plane(planes: &[(i64, usize, usize)], kx: i64) -> Option<(usize, usize)> {
    planes.binary_search_by_key(&kx, |p| p.0).ok().map(|i| (planes[i].1, planes[i].2))
}

/// Dense τ accumulator for one output column.
struct Acc {
    lo: i64,
    buf: Vec<Complex64>,
}

impl Acc {
    fn new(lo: i64, hi: i64) -> Self {
        Acc { lo, buf: vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize] }
    }

    fn ensure(&mut self, lo: i64, hi: i64) {
        if lo < self.lo {
            let extra = (self.lo - lo) as usize;
            let mut buf = vec![Complex64::new(0.0, 0.0); extra];
            buf.extend_from_slice(&self.buf);
            self.buf = buf;
            self.lo = lo;
        }
        let top = self.lo + self.buf.len() as i64 - 1;
        if hi > top {
            self.buf.resize(self.buf.len() + (hi - top) as usize, Complex64::new(0.0, 0.0));
        }
    }
}

/// Exact discrete convolution û₀(k₀) = h_τh_ξ³ Σ_{k₁+k₂=k₀} w·û₁(k₁)û₂(k₂).
///
/// Work is split by the output plane k₀ₓ, so every output coefficient is
/// accumulated by one worker in a fixed pair order and the result does not
/// depend on the number of workers.
pub fn bilinear_product(u1: &SparseField, u2: &SparseField, opts: &ProductOptions) -> Result<SparseField> {
    u1.check_spacing(u2)?;
    opts.symbol.validate()?;
    let h = u1.spacing();
    if u1.is_empty() || u2.is_empty() {
        return Ok(SparseField::empty(h));
    }
    let (c1, c2) = (u1.columns(), u2.columns());
    let (p1, p2) = (planes(c1), planes(c2));
    // Output index box: the sumset box, cut down by the output region's bounds.
    let mut kbox = [
        (p1[0].0 + p2[0].0, p1[p1.len() - 1].0 + p2[p2.len() - 1].0),
        (i64::MIN / 4, i64::MAX / 4),
        (i64::MIN / 4, i64::MAX / 4),
    ];
    if let Some(r) = &opts.output_region {
        let b = r.bounds();
        if b.is_empty() {
            return Ok(SparseField::empty(h));
        }
        for (i, iv) in b.xi.iter().enumerate() {
            if iv.lo.is_finite() {
                kbox[i].0 = kbox[i].0.max((iv.lo / h.xi).ceil() as i64 - 1);
            }
            if iv.hi.is_finite() {
                kbox[i].1 = kbox[i].1.min((iv.hi / h.xi).floor() as i64 + 1);
            }
        }
    }
    let (kx_lo, kx_hi) = kbox[0];
    if kx_lo > kx_hi {
        return Ok(SparseField::empty(h));
    }
    // Entry pairs that survive the k_x and k_y cuts of the output box.
    let mut prefix = Vec::with_capacity(c2.len() + 1);
    prefix.push(0.0f64);
    for c in c2 {
        prefix.push(prefix[prefix.len() - 1] + c.len() as f64);
    }
    let mut pairs = 0.0;
    for &(kx1, a0, a1) in &p1 {
        for &(kx2, b0, b1) in &p2 {
            if kx1 + kx2 < kx_lo || kx1 + kx2 > kx_hi {
                continue;
            }
            let plane2 = &c2[b0..b1];
            for col1 in &c1[a0..a1] {
                let s2 = plane2.partition_point(|c| c.k[1] < kbox[1].0 - col1.k[1]);
                let e2 = plane2.partition_point(|c| c.k[1] <= kbox[1].1 - col1.k[1]);
                pairs += col1.len() as f64 * (prefix[b0 + e2] - prefix[b0 + s2]);
            }
        }
    }
    if pairs > opts.pair_cap {
        return Err(Error::Resource(format!("{pairs:.3e} entry pairs exceed the cap {:.3e}", opts.pair_cap)));
    }
    let n_out = (kx_hi - kx_lo + 1) as usize;
    let cell = h.cell();
    let region = opts.output_region.as_ref();
    let progress_every = (n_out / 10).max(1);

    let plane = |i: usize| -> Vec<Column> {
        let kx0 = kx_lo + i as i64;
        let mut acc: FxHashMap<[i64; 2], Acc> = FxHashMap::default();
        for &(kx1, a0, a1) in &p1 {
            let Some((b0, b1)) = find_plane(&p2, kx0 - kx1) else { continue };
            let plane2 = &c2[b0..b1];
            for col1 in &c1[a0..a1] {
                let xi1 = h.xi_of(col1.k);
                let (ky_lo, ky_hi) = (kbox[1].0 - col1.k[1], kbox[1].1 - col1.k[1]);
                let (kz_lo, kz_hi) = (kbox[2].0 - col1.k[2], kbox[2].1 - col1.k[2]);
                let s2 = plane2.partition_point(|c| c.k[1] < ky_lo);
                let e2 = plane2.partition_point(|c| c.k[1] <= ky_hi);
                for col2 in &plane2[s2..e2] {
                    if col2.k[2] < kz_lo || col2.k[2] > kz_hi {
                        continue;
                    }
                    let xi2 = h.xi_of(col2.k);
                    let w = match opts.symbol.weight(xi1, xi2, opts.signs) {
                        Some(w) if w != 0.0 => w,
                        _ => continue,
                    };
                    let k0 = [kx0, col1.k[1] + col2.k[1], col1.k[2] + col2.k[2]];
                    let mut lo = col1.first_tau() + col2.first_tau();
                    let mut hi = col1.last_tau() + col2.last_tau();
                    if let Some(r) = region {
                        let win = r.tau_window(h.xi_of(k0));
                        if win.is_empty() {
                            continue;
                        }
                        // One step of slack: membership is re-checked exactly below.
                        if win.lo.is_finite() {
                            lo = lo.max((win.lo / h.tau).ceil() as i64 - 1);
                        }
                        if win.hi.is_finite() {
                            hi = hi.min((win.hi / h.tau).floor() as i64 + 1);
                        }
                        if lo > hi {
                            continue;
                        }
                    }
                    let a = acc.entry([k0[1], k0[2]]).or_insert_with(|| Acc::new(lo, hi));
                    a.ensure(lo, hi);
                    for (t1, v1) in col1.taus.iter().zip(&col1.coeffs) {
                        let s = col2.taus.partition_point(|t| *t < lo - t1);
                        let e = col2.taus.partition_point(|t| *t <= hi - t1);
                        let vw = v1 * w;
                        for j in s..e {
                            a.buf[(t1 + col2.taus[j] - a.lo) as usize] += vw * col2.coeffs[j];
                        }
                    }
                }
            }
        }
        if i % progress_every == 0 {
            log::debug!("bilinear product: plane {}/{}", i + 1, n_out);
        }
        let mut keys: Vec<[i64; 2]> = acc.keys().copied().collect();
        keys.sort_unstable();
        keys.into_iter()
            .filter_map(|key| {
                let a = acc.remove(&key)?;
                let k = [kx0, key[0], key[1]];
                let mut col = Column { k, taus: Vec::new(), coeffs: Vec::new() };
                for (j, v) in a.buf.into_iter().enumerate() {
                    if v == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let t = a.lo + j as i64;
                    if region.map_or(true, |r| r.contains_spacetime(h.point(t, k))) {
                        col.taus.push(t);
                        col.coeffs.push(v * cell);
                    }
                }
                (!col.is_empty()).then_some(col)
            })
            .collect()
    };

    let columns = opts.exec.map(n_out, plane).into_iter().flatten().collect();
    Ok(SparseField::from_columns(h, columns))
}

/// h_τ²h_ξ⁶ Σ_{k₁+k₂=k₀} conj(û₀(k₀))·û₁(k₁)·û₂(k₂), without materialising
/// the product. Equals ⟨u₁u₂, u₀⟩ for the plain product.
pub fn trilinear_form(u0: &SparseField, u1: &SparseField, u2: &SparseField) -> Result<Complex64> {
    trilinear_form_with(u0, u1, u2, Exec::default())
}

pub fn trilinear_form_with(u0: &SparseField, u1: &SparseField, u2: &SparseField, exec: Exec) -> Result<Complex64> {
    u0.check_spacing(u1)?;
    u0.check_spacing(u2)?;
    let zero = Complex64::new(0.0, 0.0);
    if u0.is_empty() || u1.is_empty() || u2.is_empty() {
        return Ok(zero);
    }
    let h = u0.spacing();
    let (c0, c1, c2) = (u0.columns(), u1.columns(), u2.columns());
    let (p0, p1, p2) = (planes(c0), planes(c1), planes(c2));
    let lookup: FxHashMap<[i64; 3], usize> = c0.iter().enumerate().map(|(i, c)| (c.k, i)).collect();

    let per_plane = |i: usize| -> Complex64 {
        let (kx1, a0, a1) = p1[i];
        let mut s = zero;
        for &(kx0, ..) in &p0 {
            let Some((b0, b1)) = find_plane(&p2, kx0 - kx1) else { continue };
            for col1 in &c1[a0..a1] {
                for col2 in &c2[b0..b1] {
                    let k0 = [kx0, col1.k[1] + col2.k[1], col1.k[2] + col2.k[2]];
                    let Some(&j0) = lookup.get(&k0) else { continue };
                    let col0 = &c0[j0];
                    let (lo, hi) = (col0.first_tau(), col0.last_tau());
                    for (t1, v1) in col1.taus.iter().zip(&col1.coeffs) {
                        let st = col2.taus.partition_point(|t| *t < lo - t1);
                        let en = col2.taus.partition_point(|t| *t <= hi - t1);
                        for j in st..en {
                            if let Ok(m) = col0.taus.binary_search(&(t1 + col2.taus[j])) {
                                s += col0.coeffs[m].conj() * v1 * col2.coeffs[j];
                            }
                        }
                    }
                }
            }
        }
        s
    };
    let parts = exec.map(p1.len(), per_plane);
    let total: Complex64 = parts.into_iter().fold(zero, |a, b| a + b);
    Ok(total * h.cell() * h.cell())
}
