//! Verification suites shared by the acceptance tests and the command line.
//!
//! Each suite first observes raw statistics for a seed, then judges them
//! against fixed bounds and the calibrated [`Fixtures`]. Calibration runs
//! the same observers on [`CALIBRATION_SEED`](crate::fixtures::CALIBRATION_SEED).

pub mod estimates;
pub mod measure;
pub mod net;
pub mod weights;

mod calibrate;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

pub use calibrate::calibrate;

use crate::fixtures::Fixtures;

/// Seed used by the acceptance run and the command-line defaults.
pub const DEFAULT_SEED: u64 = 1;

/// One pass/fail assertion with the number it was decided on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    /// Human-readable form of the bound, e.g. "<= 25".
    pub limit: String,
}

/// Six decimals, or scientific notation where that would hide the value.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

impl Check {
    pub fn at_most(name: impl Into<String>, observed: f64, limit: f64) -> Check {
        Check { name: name.into(), passed: observed <= limit, observed, limit: format!("<= {}", num(limit)) }
    }

    pub fn at_least(name: impl Into<String>, observed: f64, limit: f64) -> Check {
        Check { name: name.into(), passed: observed >= limit, observed, limit: format!(">= {}", num(limit)) }
    }

    pub fn below(name: impl Into<String>, observed: f64, limit: f64) -> Check {
        Check { name: name.into(), passed: observed < limit, observed, limit: format!("< {}", num(limit)) }
    }

    pub fn within(name: impl Into<String>, observed: f64, w: [f64; 2]) -> Check {
        Check {
            name: name.into(),
            passed: w[0] <= observed && observed <= w[1],
            observed,
            limit: format!("in [{}, {}]", num(w[0]), num(w[1])),
        }
    }

    /// A count of violations that must be zero.
    pub fn none(name: impl Into<String>, violations: u64) -> Check {
        Check { name: name.into(), passed: violations == 0, observed: violations as f64, limit: "== 0".into() }
    }
}

/// One measured quantity for the CSV output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub op: String,
    pub params: BTreeMap<String, f64>,
    pub value: f64,
    pub stderr: f64,
    pub bound: f64,
    pub ratio: f64,
}

impl Row {
    pub fn new(op: &str, params: &[(&str, f64)], value: f64, stderr: f64, bound: f64) -> Row {
        Row {
            op: op.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            value,
            stderr,
            bound,
            ratio: if bound > 0.0 { value / bound } else { f64::NAN },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Named summary numbers (maxima, fitted slopes, ...).
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<Row>,
    /// Wall time; kept out of the JSON so reports are reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            seed,
            checks: Vec::new(),
            metrics: BTreeMap::new(),
            rows: Vec::new(),
            seconds: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn metric(&mut self, name: &str, v: f64) {
        self.metrics.insert(name.to_string(), v);
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.checks.extend(other.checks);
        self.metrics.extend(other.metrics);
        self.rows.extend(other.rows);
    }

    /// Failed checks, or "all N checks" when everything passed.
    pub fn summary(&self) -> String {
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} = {:.6} not {}", c.name, c.observed, c.limit))
            .collect();
        if failed.is_empty() {
            format!("all {} checks", self.checks.len())
        } else {
            failed.join("; ")
        }
    }

    pub fn rows_csv(&self) -> String {
        let mut s = String::from("op,params,value,stderr,bound,ratio\n");
        for r in &self.rows {
            let p: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            s.push_str(&format!("{},{},{},{},{},{}\n", r.op, p.join(";"), r.value, r.stderr, r.bound, r.ratio));
        }
        s
    }
}

/// Times `f` and records the elapsed seconds in its report.
pub fn timed(f: impl FnOnce() -> crate::Result<SuiteReport>) -> crate::Result<SuiteReport> {
    let t = Instant::now();
    let mut r = f()?;
    r.seconds = t.elapsed().as_secs_f64();
    Ok(r)
}

/// The eleven acceptance criteria, by number.
pub const CRITERIA: [&str; 11] = [
    "net covering and local counts",
    "slab-sphere exactness",
    "sphere-sphere boundedness",
    "cone-cone bounds and L scaling",
    "quadric area and its failure for R >> a",
    "bilinear estimates",
    "sharpness of the anisotropic slab estimate",
    "null form windows",
    "slab concentration improvement",
    "low output with the tube norm",
    "weight geometry",
];

/// Runs acceptance criterion `i` (1-based) with the given seed.
pub fn criterion(i: usize, fx: &Fixtures, seed: u64) -> crate::Result<SuiteReport> {
    timed(|| match i {
        1 => net::criterion(seed),
        2 => measure::slab_sphere(seed),
        3 => measure::sphere_sphere(fx),
        4 => measure::cone_cone(fx, seed),
        5 => measure::quadric(fx),
        6 => estimates::bilinear(fx, seed),
        7 => estimates::anisotropic_slab(fx, seed),
        8 => estimates::null_forms(fx, seed),
        9 => estimates::slab_improvement(seed),
        10 => estimates::low_output(fx, seed),
        11 => weights::criterion(fx, seed),
        _ => Err(crate::Error::Usage(format!("no acceptance criterion {i}"))),
    })
}
