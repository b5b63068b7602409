//! On-disk scenario format.
//!
//! ```toml
//! name = "three_agent"
//! description = "two stubborn agents feeding one receiver"
//!
//! [network]
//! dimensions = [3, 3]
//! weights = [          # row-major, weights[l][k] = a_lk
//!   [1.0, 0.0, 0.1],
//!   [0.0, 1.0, 0.2],
//!   [0.0, 0.0, 0.7],
//! ]
//!
//! [states]
//! names = ["theta1", "theta2", "theta3"]
//!
//! [likelihoods.1]      # keyed by agent label
//! signals = ["H", "T"]
//! rows = [[0.10, 0.90], [0.35, 0.65], [0.45, 0.55]]   # one row per state
//!
//! [truth]
//! agents = ["theta1", "theta2", "theta3"]
//!
//! [priors]             # optional; uniform when absent
//! beliefs = [[...], ...]
//!
//! [awareness]          # optional
//! gamma = [0.4, 0.4, 0.1]
//! ```
//!
//! Instead of per-agent `[likelihoods.<label>]` tables, a `[likelihood_matrix]`
//! section may give one `states x agents` table per signal, the layout used
//! when every agent shares a signal space. One signal may be left out and is
//! filled in as the complement. Any number may be written as a `"p/q"` string.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Number {
    pub fn value(&self) -> Result<f64, String> {
        match self {
            Number::Float(x) => Ok(*x),
            Number::Int(i) => Ok(*i as f64),
            Number::Text(s) => parse_number(s),
        }
    }
}

impl From<f64> for Number {
    fn from(x: f64) -> Self {
        Number::Float(x)
    }
}

/// Parses a decimal or a `p/q` fraction.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in `{s}`"))?;
            let q: f64 = q
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in `{s}`"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            p / q
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if parsed.is_finite() {
        Ok(parsed)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub network: Network,
    pub states: States,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub likelihoods: BTreeMap<String, AgentTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub likelihood_matrix: Option<SharedTable>,
    pub truth: Truth,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Priors>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub awareness: Option<Awareness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Network {
    pub dimensions: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub weights: Vec<Vec<Number>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct States {
    pub names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentTable {
    pub signals: Vec<String>,
    pub rows: Vec<Vec<Number>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharedTable {
    pub signals: Vec<String>,
    /// Signal name -> `states x agents` table.
    pub tables: BTreeMap<String, Vec<Vec<Number>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truth {
    pub agents: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Priors {
    pub beliefs: Vec<Vec<Number>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Awareness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<Number>>,
    /// One row of per-agent factors per step, last row repeating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<Vec<Number>>>,
}
