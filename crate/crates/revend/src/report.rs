//! Serializable result documents: a versioned JSON schema for
//! classification runs and diffusion experiments, plus a flat CSV
//! rendering for external plotting tools.

use crate::classify::ClassifierCfg;
use crate::criteria::ConformalReport;
use crate::error::{Error, Result};
use crate::geometry::Kappa;
use crate::stochastic::{DiffusionCfg, HitStats};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Bumped on any backwards-incompatible change to the document layout.
pub const SCHEMA_VERSION: u32 = 1;

pub fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Top-level output of `classify` and `table`: the classifier
/// configuration that produced the verdicts, one report per end, and
/// optional wall-clock timings (omitted under `--no-timings` so reruns
/// are byte-identical).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: ClassifierCfg,
    pub ends: Vec<ConformalReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl ReportDocument {
    pub fn new(config: ClassifierCfg, ends: Vec<ConformalReport>) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool_version: tool_version().to_string(),
            config,
            ends,
            timings_ms: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(src: &str) -> Result<ReportDocument> {
        from_json(src)
    }

    /// One row per end. Fields containing the separator are quoted
    /// CSV-style; floats use the shortest round-trip decimal.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "end,kappa,verdict,fired,parabolicity,parabolicity_rule,\
             parabolicity_value,parabolicity_error,sufficient,sufficient_rule,\
             stochastic,stochastic_rule,checks\n",
        );
        for end in &self.ends {
            let fired: Vec<String> =
                end.fired.iter().map(|f| f.criterion.clone()).collect();
            let checks: Vec<String> = end
                .consistency
                .iter()
                .map(|c| format!("{}={}", c.id, c.status))
                .collect();
            let (pv, pe) = match &end.integrals.parabolicity.value {
                Some(b) => (fmt_f64(b.value), fmt_f64(b.error)),
                None => (String::new(), String::new()),
            };
            let row = [
                end.end_name.clone(),
                kappa_csv(end.kappa).to_string(),
                end.verdict.to_string(),
                fired.join(";"),
                format!("{:?}", end.integrals.parabolicity.kind),
                end.integrals.parabolicity.rule.clone(),
                pv,
                pe,
                format!("{:?}", end.integrals.sufficient.kind),
                end.integrals.sufficient.rule.clone(),
                format!("{:?}", end.integrals.stochastic.kind),
                end.integrals.stochastic.rule.clone(),
                checks.join(";"),
            ];
            let quoted: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
            out.push_str(&quoted.join(","));
            out.push('\n');
        }
        out
    }
}

/// Output of `simulate`: the diffusion configuration, the exact hitting
/// split from the scale function, and the empirical counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationDocument {
    pub schema_version: u32,
    pub tool_version: String,
    pub end_name: String,
    pub rho: f64,
    pub big_r: f64,
    pub x0: f64,
    pub config: DiffusionCfg,
    pub exact_inner: f64,
    pub exact_outer: f64,
    pub stats: HitStats,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl SimulationDocument {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(src: &str) -> Result<SimulationDocument> {
        from_json(src)
    }
}

fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| Error::Io(format!("serializing report: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn from_json<T: for<'de> Deserialize<'de>>(src: &str) -> Result<T> {
    serde_json::from_str(src).map_err(|e| Error::Parse {
        offset: byte_offset(src, e.line(), e.column()),
        msg: format!("report document: {e}"),
    })
}

/// serde_json reports 1-based line/column; recover the byte offset.
fn byte_offset(src: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut seen = 1usize;
    let mut at = 0usize;
    for (i, b) in src.bytes().enumerate() {
        if seen == line {
            at = i;
            break;
        }
        if b == b'\n' {
            seen += 1;
            at = i + 1;
        }
    }
    (at + column.saturating_sub(1)).min(src.len())
}

fn kappa_csv(kappa: Kappa) -> &'static str {
    match kappa {
        Kappa::Hyperbolic => "-1",
        Kappa::Euclidean => "0",
        Kappa::Spherical => "1",
    }
}

/// Shortest decimal that parses back to the same f64 (std's `{}`).
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}
