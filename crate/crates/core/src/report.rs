//! Machine-readable verification reports.
//!
//! Every suite produces a list of [`Check`] records: a stable identifier,
//! the worst residual observed, the tolerance it was held to, and the
//! witness parameters that produced the worst case. Reports are
//! deterministic for a fixed config and seed; the only runtime-dependent
//! field is `runtime_ms`, which consumers must ignore when diffing.

use serde::Serialize;

use crate::C64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    /// Stable machine-readable identifier, e.g. `r.unitarity`.
    pub anchor: String,
    /// Human-readable description of what was checked.
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Parameters of the worst sample (always present on failure).
    pub witness: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Collapse per-sample residuals into one record keeping the worst
    /// witness.
    pub fn from_samples(
        anchor: impl Into<String>,
        name: impl Into<String>,
        tolerance: f64,
        samples: impl IntoIterator<Item = (f64, serde_json::Value)>,
    ) -> Self {
        let mut max_residual = 0.0f64;
        let mut witness = serde_json::Value::Null;
        for (r, w) in samples {
            if r >= max_residual {
                max_residual = r;
                witness = w;
            }
        }
        Check {
            anchor: anchor.into(),
            name: name.into(),
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
            witness,
            note: None,
        }
    }

    pub fn scalar(anchor: impl Into<String>, name: impl Into<String>, tolerance: f64, residual: f64) -> Self {
        Check::from_samples(anchor, name, tolerance, [(residual, serde_json::Value::Null)])
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub config: serde_json::Value,
    pub seed: u64,
    pub capacity_cap: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Wall-clock milliseconds; not covered by determinism guarantees.
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn new(config: serde_json::Value, seed: u64, checks: Vec<Check>, runtime_ms: u64) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            config,
            seed,
            capacity_cap: crate::tensor::capacity_cap(),
            passed,
            checks,
            runtime_ms,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// JSON encoding of a complex number as `[re, im]`.
pub fn cjson(z: C64) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}

/// Witness object for a single spectral point.
pub fn witness_u(u: C64) -> serde_json::Value {
    serde_json::json!({ "u": cjson(u) })
}

/// Witness object for a pair of spectral points.
pub fn witness_uv(u: C64, v: C64) -> serde_json::Value {
    serde_json::json!({ "u": cjson(u), "v": cjson(v) })
}
