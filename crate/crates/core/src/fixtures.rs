//! Calibrated constants standing in for the unstated absolute constants.
//!
//! Upper constants are 1.1× the largest value seen in a calibration run,
//! lower constants the smallest value divided by 1.1, and windows widen both
//! ends the same way. Calibration uses [`CALIBRATION_SEED`], which no check
//! uses.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Environment variable naming a fixtures file that replaces the built-in one.
pub const FIXTURES_ENV: &str = "RESTRICTION_LAB_FIXTURES";
pub const CALIBRATION_SEED: u64 = 0xca11_b4a7e;
pub const MARGIN: f64 = 1.1;
pub const FORMAT_VERSION: u32 = 1;

const BUILTIN: &str = include_str!("../fixtures/fixtures.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixtures {
    pub version: u32,
    pub calibration_seed: u64,
    pub net: NetFixtures,
    pub measure: MeasureFixtures,
    pub weights: WeightFixtures,
    pub estimates: EstimateFixtures,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetFixtures {
    /// [A, B] with A/γ² ≤ |Ω(γ)| ≤ B/γ² for γ ≤ π/4.
    pub cardinality: [f64; 2],
    /// C(M): longest separated decomposition list (m = 3, γ* = 1).
    pub separated_pairs: f64,
    /// Hyperplane overlap count ≤ C·(γ′/γ + d/(Nγ²)).
    pub overlap: f64,
    /// Sector K±_{N,L,γ,ω} ⊂ H_{c·max(L, Nγ²)}(ω).
    pub sector: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFixtures {
    /// |S_δ(r) ∩ (ξ₀ + S_Δ(R))| ≤ C·rRδΔ/|ξ₀|.
    pub sphere_sphere: f64,
    /// |E| ≤ C·min(applicable cone-cone bounds).
    pub cone_cone: f64,
    /// |E| ≤ C·rNL² for the cone cut by a ball.
    pub cone_ball: f64,
    /// In-regime quadric area ≤ C·Rδ.
    pub quadric: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightFixtures {
    /// max|𝔥ⱼ| ≥ c·(min- or product-type comparator), one c for both.
    pub lower: f64,
    /// |𝔥₀| / comparator window on the dominant-output subsample.
    pub output: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateFixtures {
    pub bilinear_input: f64,
    pub bilinear_output: f64,
    pub bilinear_symmetric: f64,
    pub low_output_tube: f64,
    /// ‖u‖_{N,r}/‖u‖ window for radial coefficients.
    pub tube_norm: [f64; 2],
    /// Extremizer ratio windows.
    pub null_caps: [f64; 2],
    pub null_form_tube: [f64; 2],
    pub null_form_ball: [f64; 2],
}

/// Upper constant from calibration maxima.
pub fn upper(max: f64) -> f64 {
    max * MARGIN
}

/// Lower constant from calibration minima.
pub fn lower(min: f64) -> f64 {
    min / MARGIN
}

pub fn window(min: f64, max: f64) -> [f64; 2] {
    [lower(min), upper(max)]
}

pub fn in_window(w: [f64; 2], x: f64) -> bool {
    w[0] <= x && x <= w[1]
}

impl Fixtures {
    pub fn builtin() -> Result<Fixtures> {
        Fixtures::from_json(BUILTIN)
    }

    pub fn from_json(text: &str) -> Result<Fixtures> {
        let f: Fixtures = serde_json::from_str(text)?;
        if f.version != FORMAT_VERSION {
            return Err(Error::Usage(format!("fixtures format version {} is not {FORMAT_VERSION}", f.version)));
        }
        Ok(f)
    }

    pub fn load(path: &Path) -> Result<Fixtures> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read fixtures {}: {e}", path.display())))?;
        Fixtures::from_json(&text)
    }

    /// An explicit path, else the environment override, else the built-in set.
    pub fn resolve(path: Option<&Path>) -> Result<Fixtures> {
        if let Some(p) = path {
            return Fixtures::load(p);
        }
        match std::env::var_os(FIXTURES_ENV) {
            Some(p) if !p.is_empty() => Fixtures::load(Path::new(&p)),
            _ => Fixtures::builtin(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("fixtures serialize");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
