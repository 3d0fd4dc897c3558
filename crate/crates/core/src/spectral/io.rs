//! Field serialization.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! ```text
//! magic      4 bytes  "RLSF"
//! version    u32      1
//! h_tau      f64
//! h_xi       f64
//! columns    u64
//! per column:
//!   k        3 × i64  spatial lattice index
//!   runs     u32
//!   per run:
//!     start  i64      first τ index
//!     len    u32      consecutive τ indices in the run
//!     len × (re f64, im f64)
//! ```
//!
//! The JSON debug form is `{"spacing": {"tau", "xi"}, "entries": [{"k": [t, x, y, z], "re", "im"}]}`.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{Column, Spacing, SparseField};
use crate::error::{ensure, Error, Result};

const MAGIC: &[u8; 4] = b"RLSF";
const VERSION: u32 = 1;

pub fn write_binary(u: &SparseField, mut w: impl Write) -> Result<()> {
    let h = u.spacing();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&h.tau.to_le_bytes())?;
    w.write_all(&h.xi.to_le_bytes())?;
    w.write_all(&(u.columns().len() as u64).to_le_bytes())?;
    for col in u.columns() {
        for k in col.k {
            w.write_all(&k.to_le_bytes())?;
        }
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for (i, t) in col.taus.iter().enumerate() {
            match runs.last_mut() {
                Some((s, n)) if col.taus[*s] + *n as i64 == *t => *n += 1,
                _ => runs.push((i, 1)),
            }
        }
        w.write_all(&(runs.len() as u32).to_le_bytes())?;
        for (s, n) in runs {
            w.write_all(&col.taus[s].to_le_bytes())?;
            w.write_all(&(n as u32).to_le_bytes())?;
            for c in &col.coeffs[s..s + n] {
                w.write_all(&c.re.to_le_bytes())?;
                w.write_all(&c.im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

fn take<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_binary(mut r: impl Read) -> Result<SparseField> {
    ensure!(&take::<4>(&mut r)? == MAGIC, Usage, "not a field file (bad magic)");
    let version = u32::from_le_bytes(take(&mut r)?);
    ensure!(version == VERSION, Usage, "unsupported field format version {version}");
    let spacing = Spacing::new(f64::from_le_bytes(take(&mut r)?), f64::from_le_bytes(take(&mut r)?))?;
    let n_cols = u64::from_le_bytes(take(&mut r)?);
    let mut columns = Vec::new();
    let mut prev: Option<[i64; 3]> = None;
    for _ in 0..n_cols {
        let k =
            [i64::from_le_bytes(take(&mut r)?), i64::from_le_bytes(take(&mut r)?), i64::from_le_bytes(take(&mut r)?)];
        ensure!(prev.map_or(true, |p| p < k), Usage, "columns out of order at {k:?}");
        prev = Some(k);
        let mut col = Column { k, taus: Vec::new(), coeffs: Vec::new() };
        let runs = u32::from_le_bytes(take(&mut r)?);
        for _ in 0..runs {
            let start = i64::from_le_bytes(take(&mut r)?);
            let n = u32::from_le_bytes(take(&mut r)?);
            ensure!(col.taus.last().map_or(true, |t| *t < start), Usage, "runs out of order in column {k:?}");
            for j in 0..n as i64 {
                let re = f64::from_le_bytes(take(&mut r)?);
                let im = f64::from_le_bytes(take(&mut r)?);
                col.taus.push(start + j);
                col.coeffs.push(Complex64::new(re, im));
            }
        }
        columns.push(col);
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Usage(format!("{} trailing bytes after field", rest.len())));
    }
    Ok(SparseField::from_columns(spacing, columns))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEntry {
    k: [i64; 4],
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonField {
    spacing: Spacing,
    entries: Vec<JsonEntry>,
}

pub fn to_json(u: &SparseField) -> Result<String> {
    let entries = u.entries().map(|(t, k, c)| JsonEntry { k: [t, k[0], k[1], k[2]], re: c.re, im: c.im }).collect();
    Ok(serde_json::to_string_pretty(&JsonField { spacing: u.spacing(), entries })?)
}

pub fn from_json(text: &str) -> Result<SparseField> {
    let f: JsonField = serde_json::from_str(text)?;
    SparseField::from_entries(
        f.spacing,
        f.entries.into_iter().map(|e| (e.k[0], [e.k[1], e.k[2], e.k[3]], Complex64::new(e.re, e.im))),
    )
}
