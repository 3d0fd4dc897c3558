use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::exec::{chunk_rng, Exec};
use crate::geometry::{Dim, Interval, Region, SpacetimePoint, Vec3};

/// Default cap on lattice points produced by [`populate_region`].
pub const DEFAULT_POINT_CAP: u64 = 2_000_000;

/// Lattice steps in τ and in each ξ coordinate.
///
/// The τ step is independent because the cone supports are thin in τ
/// (thickness L) but wide in ξ (size N).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spacing {
    pub tau: f64,
    pub xi: f64,
}

impl Spacing {
    pub fn uniform(h: f64) -> Self {
        Spacing { tau: h, xi: h }
    }

    pub fn new(tau: f64, xi: f64) -> Result<Self> {
        let s = Spacing { tau, xi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.tau > 0.0 && self.xi > 0.0 && self.tau.is_finite() && self.xi.is_finite(),
            Domain,
            "lattice spacing must be positive and finite, got {self:?}"
        );
        Ok(())
    }

    /// Volume of one lattice cell, h_τ·h_ξ³.
    pub fn cell(&self) -> f64 {
        self.tau * self.xi.powi(3)
    }

    pub fn xi_of(&self, k: [i64; 3]) -> Vec3 {
        Vec3::new(k[0] as f64, k[1] as f64, k[2] as f64) * self.xi
    }

    pub fn point(&self, kt: i64, k: [i64; 3]) -> SpacetimePoint {
        SpacetimePoint::new(kt as f64 * self.tau, self.xi_of(k))
    }

    /// Integer range of k with k·h ∈ `iv`.
    pub(crate) fn tau_range(&self, iv: Interval) -> Option<(i64, i64)> {
        index_range(iv, self.tau)
    }
}

pub(crate) fn index_range(iv: Interval, h: f64) -> Option<(i64, i64)> {
    if iv.is_empty() || !iv.lo.is_finite() || !iv.hi.is_finite() {
        return None;
    }
    let lo = (iv.lo / h).ceil() as i64;
    let hi = (iv.hi / h).floor() as i64;
    (lo <= hi).then_some((lo, hi))
}

/// All entries sharing one spatial lattice point, sorted by τ index.
#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub k: [i64; 3],
    pub taus: Vec<i64>,
    pub coeffs: Vec<Complex64>,
}

impl Column {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub(crate) fn first_tau(&self) -> i64 {
        self.taus[0]
    }

    pub(crate) fn last_tau(&self) -> i64 {
        self.taus[self.taus.len() - 1]
    }
}

/// Discrete Fourier-side field: coefficients on the lattice h_τℤ × h_ξℤ³.
///
/// Columns are sorted by spatial index and hold no empty columns and no
/// zero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseField {
    spacing: Spacing,
    columns: Vec<Column>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FillMode {
    Ones,
    Gaussian { seed: u64 },
}

impl SparseField {
    pub fn empty(spacing: Spacing) -> Self {
        SparseField { spacing, columns: Vec::new() }
    }

    /// Builds a field from (τ index, ξ index, coefficient) triples. Repeated
    /// indices are summed; zeros are dropped.
    pub fn from_entries(
        spacing: Spacing,
        entries: impl IntoIterator<Item = (i64, [i64; 3], Complex64)>,
    ) -> Result<Self> {
        spacing.validate()?;
        let mut all: Vec<([i64; 3], i64, Complex64)> = entries.into_iter().map(|(t, k, c)| (k, t, c)).collect();
        all.sort_by_key(|a| (a.0, a.1));
        let mut columns: Vec<Column> = Vec::new();
        for (k, t, c) in all {
            ensure!(c.re.is_finite() && c.im.is_finite(), Domain, "non-finite coefficient at {k:?}, {t}");
            match columns.last_mut() {
                Some(col) if col.k == k => {
                    if *col.taus.last().unwrap() == t {
                        *col.coeffs.last_mut().unwrap() += c;
                    } else {
                        col.taus.push(t);
                        col.coeffs.push(c);
                    }
                }
                _ => columns.push(Column { k, taus: vec![t], coeffs: vec![c] }),
            }
        }
        Ok(Self::from_columns(spacing, columns))
    }

    /// Takes sorted columns, dropping zero coefficients and empty columns.
    pub(crate) fn from_columns(spacing: Spacing, columns: Vec<Column>) -> Self {
        let columns = columns
            .into_iter()
            .filter_map(|mut col| {
                if col.coeffs.iter().any(|c| *c == Complex64::new(0.0, 0.0)) {
                    let (t, c): (Vec<_>, Vec<_>) = col
                        .taus
                        .iter()
                        .zip(&col.coeffs)
                        .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
                        .map(|(t, c)| (*t, *c))
                        .unzip();
                    col.taus = t;
                    col.coeffs = c;
                }
                (!col.is_empty()).then_some(col)
            })
            .collect();
        SparseField { spacing, columns }
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.iter().map(Column::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// (τ index, ξ index, coefficient) in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (i64, [i64; 3], Complex64)> + '_ {
        self.columns.iter().flat_map(|col| col.taus.iter().zip(&col.coeffs).map(move |(t, c)| (*t, col.k, *c)))
    }

    /// Physical frequencies with coefficients.
    pub fn points(&self) -> impl Iterator<Item = (SpacetimePoint, Complex64)> + '_ {
        let h = self.spacing;
        self.entries().map(move |(t, k, c)| (h.point(t, k), c))
    }

    pub fn scale(&self, lambda: Complex64) -> SparseField {
        let columns = self
            .columns
            .iter()
            .map(|col| Column {
                k: col.k,
                taus: col.taus.clone(),
                coeffs: col.coeffs.iter().map(|c| c * lambda).collect(),
            })
            .collect();
        Self::from_columns(self.spacing, columns)
    }

    /// Σ|c|² times the cell volume, i.e. ‖u‖².
    pub fn norm_sqr(&self) -> f64 {
        // Folding from +0 keeps the norm of an empty field at +0.
        self.spacing.cell() * self.columns.iter().map(Column::mass).fold(0.0, |a, b| a + b)
    }

    /// Coefficient at a lattice point, zero if absent.
    pub fn get(&self, t: i64, k: [i64; 3]) -> Complex64 {
        match self.columns.binary_search_by(|c| c.k.cmp(&k)) {
            Ok(i) => {
                let col = &self.columns[i];
                col.taus.binary_search(&t).map(|j| col.coeffs[j]).unwrap_or_default()
            }
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub(crate) fn check_spacing(&self, other: &SparseField) -> Result<()> {
        ensure!(self.spacing == other.spacing, Usage, "spacing mismatch: {:?} vs {:?}", self.spacing, other.spacing);
        Ok(())
    }
}

/// ‖u‖ by Plancherel: √(h_τh_ξ³ Σ|c|²).
pub fn l2_norm(u: &SparseField) -> f64 {
    u.norm_sqr().sqrt()
}

/// ⟨a, b⟩ = h_τh_ξ³ Σ a·conj(b).
pub fn inner(a: &SparseField, b: &SparseField) -> Result<Complex64> {
    a.check_spacing(b)?;
    let mut s = Complex64::new(0.0, 0.0);
    for col in a.columns() {
        if let Ok(j) = b.columns.binary_search_by(|c| c.k.cmp(&col.k)) {
            let other = &b.columns[j];
            for (t, c) in col.taus.iter().zip(&col.coeffs) {
                if let Ok(i) = other.taus.binary_search(t) {
                    s += c * other.coeffs[i].conj();
                }
            }
        }
    }
    Ok(s * a.spacing.cell())
}

/// Keeps exactly the entries whose physical frequency lies in `region`.
pub fn project(u: &SparseField, region: &Region) -> SparseField {
    let h = u.spacing;
    let columns = u
        .columns
        .iter()
        .filter_map(|col| {
            let xi = h.xi_of(col.k);
            let window = region.tau_window(xi);
            if window.is_empty() {
                return None;
            }
            let mut out = Column { k: col.k, taus: Vec::new(), coeffs: Vec::new() };
            for (t, c) in col.taus.iter().zip(&col.coeffs) {
                let p = h.point(*t, col.k);
                if region.contains_spacetime(p) {
                    out.taus.push(*t);
                    out.coeffs.push(*c);
                }
            }
            (!out.is_empty()).then_some(out)
        })
        .collect();
    SparseField { spacing: h, columns }
}

/// Lattice points of a bounded region with unit or complex Gaussian
/// coefficients. Fails with the exact count when it exceeds `cap`.
pub fn populate_region(region: &Region, spacing: Spacing, mode: FillMode, cap: u64) -> Result<SparseField> {
    populate_region_with(region, spacing, mode, cap, Exec::default())
}

pub fn populate_region_with(
    region: &Region,
    spacing: Spacing,
    mode: FillMode,
    cap: u64,
    exec: Exec,
) -> Result<SparseField> {
    spacing.validate()?;
    region.validate()?;
    let b = region.bounds();
    if b.is_empty() {
        return Ok(SparseField::empty(spacing));
    }
    ensure!(
        region.dim() == Dim::Spacetime && region.is_bounded(),
        Domain,
        "populate_region needs a region bounded in tau and xi"
    );
    // Index ranges are padded by one so rounding at a closed boundary never
    // loses a point; membership is decided by `contains_spacetime`.
    let pad = |r: Option<(i64, i64)>| r.map(|(a, b)| (a - 1, b + 1));
    let ranges: Vec<_> = b.xi.iter().map(|iv| pad(index_range(*iv, spacing.xi))).collect();
    let (Some(rx), Some(ry), Some(rz)) = (ranges[0], ranges[1], ranges[2]) else {
        return Ok(SparseField::empty(spacing));
    };
    let planes = (rx.1 - rx.0 + 1) as usize;

    // One plane of constant k_x per work item; `fill` = false only counts.
    let plane = |i: usize, fill: bool| -> (u64, Vec<Column>) {
        let kx = rx.0 + i as i64;
        let mut rng = chunk_rng(if let FillMode::Gaussian { seed } = mode { seed } else { 0 }, kx as u64);
        let mut count = 0u64;
        let mut cols = Vec::new();
        for ky in ry.0..=ry.1 {
            for kz in rz.0..=rz.1 {
                let k = [kx, ky, kz];
                let xi = spacing.xi_of(k);
                let Some((t0, t1)) = pad(spacing.tau_range(region.tau_window(xi).intersect(b.tau))) else {
                    continue;
                };
                let mut col = Column { k, taus: Vec::new(), coeffs: Vec::new() };
                for t in t0..=t1 {
                    if region.contains_spacetime(SpacetimePoint::new(t as f64 * spacing.tau, xi)) {
                        count += 1;
                        if fill {
                            let c = match mode {
                                FillMode::Ones => Complex64::new(1.0, 0.0),
                                FillMode::Gaussian { .. } => {
                                    let re: f64 = rng.sample(StandardNormal);
                                    let im: f64 = rng.sample(StandardNormal);
                                    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                                }
                            };
                            col.taus.push(t);
                            col.coeffs.push(c);
                        }
                    }
                }
                if !col.is_empty() {
                    cols.push(col);
                }
            }
        }
        (count, cols)
    };

    let total: u64 = exec.map(planes, |i| plane(i, false).0).into_iter().sum();
    if total > cap {
        return Err(Error::Resource(format!("region has {total} lattice points, cap is {cap}")));
    }
    let columns = exec.map(planes, |i| plane(i, true).1).into_iter().flatten().collect();
    Ok(SparseField::from_columns(spacing, columns))
}
