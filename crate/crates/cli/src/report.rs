use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// How a check's value is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: value <= tolerance,
            value,
            relation: Relation::AtMost,
            tolerance,
        }
    }

    /// Passes when `value > tolerance`.
    pub fn above(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: value > tolerance,
            value,
            relation: Relation::Above,
            tolerance,
        }
    }

    pub fn override_tolerance(&mut self, tolerance: f64) {
        self.tolerance = tolerance;
        self.passed = match self.relation {
            Relation::AtMost => self.value <= tolerance,
            Relation::Above => self.value > tolerance,
        };
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: String,
    pub kind: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputRecord>,
    pub seed: Option<u64>,
    pub tolerance_overrides: BTreeMap<String, f64>,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub summary: serde_json::Value,
    pub artifacts: Vec<String>,
    pub elapsed_ms: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        framekit::io::to_json_string(self)
    }
}
