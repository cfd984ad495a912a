use serde::{Deserialize, Serialize};

use super::{rank, Weights};
use crate::error::Result;

/// Scores for one region over the scoring window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityScore {
    pub region_id: String,
    /// Period-integrated spatial distance.
    pub s_raw: f64,
    pub t_raw: f64,
    pub c_raw: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub rank: u32,
}

/// Half-open `[from, to)` in UNIX seconds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub from: i64,
    pub to: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoresDoc {
    pub metric: String,
    pub weights: Weights,
    pub window: Window,
    /// In rank order.
    pub segments: Vec<QualityScore>,
}

impl ScoresDoc {
    /// Canonical encoding: object keys sorted, shortest round-trip floats,
    /// trailing newline. Identical documents always give identical bytes.
    pub fn to_json(&self) -> Result<String> {
        // serde_json::Value keeps object keys in a BTreeMap, so this sorts them
        let value = serde_json::to_value(self)?;
        let mut s = serde_json::to_string(&value)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Same segments re-ranked under new weights.
    pub fn reweighted(&self, weights: Weights) -> ScoresDoc {
        ScoresDoc {
            metric: self.metric.clone(),
            weights,
            window: self.window,
            segments: rank(self.segments.clone(), weights),
        }
    }
}
