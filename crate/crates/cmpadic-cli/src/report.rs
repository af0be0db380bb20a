//! JSON verification reports.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    /// module-level identifier of the identity being checked
    pub anchor: String,
    pub lhs: Value,
    pub rhs: Value,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub inputs: BTreeMap<String, Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: &str) -> Self {
        Check { name: name.into(), anchor: anchor.into(), lhs: Value::Null, rhs: Value::Null, error: 0.0, tolerance: 0.0, pass: false, inputs: BTreeMap::new() }
    }
    pub fn input(mut self, k: &str, v: impl Serialize) -> Self {
        self.inputs.insert(k.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }
    /// Exact comparison: error 0 or 1, tolerance 0.
    pub fn exact(mut self, lhs: impl Serialize, rhs: impl Serialize, equal: bool) -> Self {
        self.lhs = serde_json::to_value(lhs).unwrap_or(Value::Null);
        self.rhs = serde_json::to_value(rhs).unwrap_or(Value::Null);
        self.error = if equal { 0.0 } else { 1.0 };
        self.tolerance = 0.0;
        self.pass = equal;
        self
    }
    /// Numeric comparison with error ≤ tolerance.
    pub fn numeric(mut self, lhs: Value, rhs: Value, error: f64, tolerance: f64) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.error = error;
        self.tolerance = tolerance;
        self.pass = error.is_finite() && error <= tolerance;
        self
    }
    /// p-adic comparison: error p^{−agreement}, tolerance p^{−digits}.
    pub fn padic(mut self, lhs: String, rhs: String, p: u64, agreement: i32, digits: u32) -> Self {
        self.lhs = Value::String(lhs);
        self.rhs = Value::String(rhs);
        self.error = (p as f64).powi(-agreement);
        self.tolerance = (p as f64).powi(-(digits as i32));
        self.pass = agreement >= digits as i32;
        self.inputs.insert("agreement_digits".into(), json!(agreement));
        self
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub subcommand: String,
    pub scenario_hash: String,
    pub scenario: BTreeMap<String, Value>,
    pub environment: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub summary: Summary,
    pub data: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(subcommand: &str, scenario: BTreeMap<String, Value>, environment: BTreeMap<String, Value>) -> Self {
        let canon = serde_json::to_string(&scenario).unwrap_or_default();
        let hash = Sha256::digest(canon.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        Report {
            schema_version: SCHEMA_VERSION,
            subcommand: subcommand.into(),
            scenario_hash: hash,
            scenario,
            environment,
            checks: Vec::new(),
            summary: Summary { total: 0, passed: 0, failed: 0 },
            data: BTreeMap::new(),
        }
    }
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }
    pub fn finish(&mut self) {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        self.summary = Summary { total: self.checks.len(), passed, failed: self.checks.len() - passed };
    }
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
