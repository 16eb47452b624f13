//! Machine-readable verification reports.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    SkippedCap,
}

/// Report of one check. Numbers that may exceed 64 bits are stored as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub payload: BTreeMap<String, Value>,
    pub elapsed_ms: u64,
    pub certificate_hash: Option<String>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> VerificationReport {
        VerificationReport {
            check: check.into(),
            params: BTreeMap::new(),
            verdict: Verdict::Pass,
            payload: BTreeMap::new(),
            elapsed_ms: 0,
            certificate_hash: None,
        }
    }

    pub fn param(mut self, key: &str, v: impl Serialize) -> Self {
        self.params.insert(key.to_string(), to_value(v));
        self
    }

    pub fn put(mut self, key: &str, v: impl Serialize) -> Self {
        self.payload.insert(key.to_string(), to_value(v));
        self
    }

    pub fn verdict(mut self, v: Verdict) -> Self {
        self.verdict = v;
        self
    }

    /// Sets the verdict to `Fail` if `ok` is false (never upgrades a failure).
    pub fn require(mut self, ok: bool) -> Self {
        if !ok && self.verdict == Verdict::Pass {
            self.verdict = Verdict::Fail;
        }
        self
    }

    pub fn hash_of(mut self, v: impl Serialize) -> Self {
        self.certificate_hash = Some(sha256_json(&v));
        self
    }

    pub fn with_hash(mut self, h: String) -> Self {
        self.certificate_hash = Some(h);
        self
    }

    pub fn finish(mut self, start: Instant) -> Self {
        self.elapsed_ms = start.elapsed().as_millis() as u64;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// A copy with the timing field zeroed, for drift comparisons.
    pub fn without_timing(&self) -> VerificationReport {
        VerificationReport {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    /// File name used for golden storage: check name plus sorted parameters.
    pub fn golden_name(&self) -> String {
        let mut name = self.check.clone();
        for (k, v) in &self.params {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let v: String = v
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
                .collect();
            name.push_str(&format!("__{k}-{v}"));
        }
        name.push_str(".json");
        name
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("value serializes")
}

/// Hex SHA-256 of the canonical (sorted-key) JSON encoding of `v`.
pub fn sha256_json(v: impl Serialize) -> String {
    // serde_json maps are BTreeMap-backed, so key order is already canonical.
    let canonical = serde_json::to_vec(&to_value(v)).expect("value serializes");
    hex::encode(Sha256::digest(&canonical))
}

/// Outcome of comparing a report against a stored golden file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoldenOutcome {
    Match,
    Created,
    Drift(String),
}

/// Compares `report` (ignoring timing) with `dir/<golden_name>`, creating the
/// file when absent.
pub fn golden_compare(dir: &Path, report: &VerificationReport) -> Result<GoldenOutcome> {
    let path = dir.join(report.golden_name());
    let io = |e: std::io::Error| Error::InvalidArgument(format!("{}: {e}", path.display()));
    if !path.exists() {
        std::fs::create_dir_all(dir).map_err(io)?;
        let text = serde_json::to_string_pretty(&report.without_timing()).expect("report serializes");
        std::fs::write(&path, text + "\n").map_err(io)?;
        return Ok(GoldenOutcome::Created);
    }
    let text = std::fs::read_to_string(&path).map_err(io)?;
    let stored: VerificationReport = serde_json::from_str(&text).map_err(|e| Error::Parse {
        offset: e.column(),
        message: format!("{}: {e}", path.display()),
    })?;
    if stored.without_timing() == report.without_timing() {
        Ok(GoldenOutcome::Match)
    } else {
        Ok(GoldenOutcome::Drift(format!(
            "stored {} differs from current {}",
            serde_json::to_string(&stored.without_timing()).expect("report serializes"),
            report.without_timing().to_json_line()
        )))
    }
}
