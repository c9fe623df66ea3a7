//! Serializable output records.
//!
//! Values that may carry more than 15 significant digits are decimal strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<R> {
    pub schema_version: u32,
    pub command: String,
    pub config: Config,
    pub results: Vec<R>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub digits: u32,
    pub guard: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    /// Subcommand flags as given.
    #[serde(default)]
    pub options: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub label: String,
    pub as_printed: bool,
    pub form: String,
    pub digits_agree: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRecord {
    pub id: String,
    /// `exact` or `approx`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_digits: Option<u32>,
    pub decimal_digits: u32,
    pub guard_digits: u32,
    pub digits_agree: f64,
    pub passed: bool,
    pub flagged: bool,
    pub selected: String,
    pub selected_form: String,
    pub lhs: String,
    pub rhs: String,
    pub wall_time: f64,
    pub candidates: Vec<CandidateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub spec: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitRecord {
    pub f: String,
    pub alpha: String,
    pub s: i32,
    pub value: String,
    pub nearest: String,
    pub nearness_digits: f64,
    pub integer_nearness_digits: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub advisory: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub n: u64,
    pub value: String,
    /// Estimate divided by the exact value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationRecord {
    /// `relation` or `no-relation`.
    pub status: String,
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched: Option<String>,
    #[serde(default)]
    pub flagged: bool,
}

/// Rounds to `places` decimals so the JSON number stays short.
pub fn round_to(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (x * scale).round() / scale
}
