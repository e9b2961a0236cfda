//! Machine-readable reports emitted by the CLI: command echo, input digest,
//! per-check status, and wall time. Every numeric result in `results`
//! carries its tolerance where one applies.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::time::Instant;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: String, // "pass" | "fail"
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: "pass".into(),
            detail: None,
            tolerance: None,
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: "fail".into(),
            detail: Some(detail.into()),
            tolerance: None,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// A numeric value paired with the tolerance it was computed under.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct Toleranced {
    pub value: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    pub inputs_digest: String,
    pub results: serde_json::Value,
    pub checks: Vec<Check>,
    pub wall_ms: u128,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
}

/// Builder tracking wall time from construction.
pub struct ReportBuilder {
    command: String,
    digest: Sha256,
    checks: Vec<Check>,
    results: serde_json::Value,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(command: impl Into<String>) -> Self {
        ReportBuilder {
            command: command.into(),
            digest: Sha256::new(),
            checks: Vec::new(),
            results: serde_json::Value::Null,
            started: Instant::now(),
        }
    }

    pub fn digest_input(&mut self, bytes: &[u8]) {
        self.digest.update(bytes);
    }

    pub fn push_check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn set_results(&mut self, results: serde_json::Value) {
        self.results = results;
    }

    pub fn finish(self) -> Report {
        Report {
            schema_version: SCHEMA_VERSION.into(),
            command: self.command,
            inputs_digest: hex(&self.digest.finalize()),
            results: self.results,
            checks: self.checks,
            wall_ms: self.started.elapsed().as_millis(),
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_roundtrip() {
        let mut b = ReportBuilder::new("verify quick");
        b.digest_input(b"fixture");
        b.push_check(Check::pass("axioms"));
        b.push_check(Check::fail("norm", "off by 0.1").with_tolerance(1e-9));
        b.set_results(serde_json::json!({"norm": {"value": 0.7071, "tol": 1e-9}}));
        let r = b.finish();
        assert!(!r.all_passed());
        let text = serde_json::to_string(&r).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back.checks, r.checks);
        assert_eq!(back.inputs_digest, r.inputs_digest);
        assert_eq!(back.schema_version, SCHEMA_VERSION);
    }
}
