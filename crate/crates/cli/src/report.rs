//! The report envelope written by every command.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use restriction_lab::suites::SuiteReport;
use serde::Serialize;

/// Bumped whenever a field of [`Report`] changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything a run depended on. Two runs with equal configs produce equal
/// reports apart from [`Timestamp`].
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub format: Format,
    pub jobs: usize,
    /// The fixture file, or "builtin".
    pub fixtures: String,
    pub fixture_hash: String,
    /// Resolved command parameters.
    pub params: serde_json::Value,
}

/// The only nondeterministic part of a report.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Timestamp {
    pub unix: u64,
    pub seconds: BTreeMap<String, f64>,
}

impl Timestamp {
    pub fn now() -> Self {
        let unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Timestamp { unix, seconds: BTreeMap::new() }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp: Timestamp,
    pub config: RunConfig,
    pub passed: bool,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(config: RunConfig, timestamp: Timestamp, passed: bool, body: T) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: "restriction-lab",
            version: restriction_lab::VERSION,
            timestamp,
            config,
            passed,
            body,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[derive(Debug, Serialize)]
pub struct Suites {
    pub suites: Vec<SuiteReport>,
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One table holding checks, metrics and measured rows, told apart by `record`.
pub fn suites_csv(suites: &[SuiteReport]) -> String {
    let mut s = String::from("suite,record,name,params,value,stderr,bound,ratio,limit,passed\n");
    for r in suites {
        let suite = field(&r.suite);
        for c in &r.checks {
            s.push_str(&format!(
                "{suite},check,{},,{},,,,{},{}\n",
                field(&c.name),
                c.observed,
                field(&c.limit),
                c.passed
            ));
        }
        for (k, v) in &r.metrics {
            s.push_str(&format!("{suite},metric,{},,{v},,,,,\n", field(k)));
        }
        for row in &r.rows {
            let p: Vec<String> = row.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            s.push_str(&format!(
                "{suite},row,{},{},{},{},{},{},,\n",
                field(&row.op),
                field(&p.join(";")),
                row.value,
                row.stderr,
                row.bound,
                row.ratio
            ));
        }
    }
    s
}

/// Writes to `out`, or stdout when there is none.
pub fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(text.as_bytes())?;
            o.flush()
        }
    }
}
