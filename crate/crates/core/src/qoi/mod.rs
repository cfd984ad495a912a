//! Normalization, period integration, the weighted unified score, ranking,
//! filtering, and the end-to-end scoring pipeline.

pub mod filter;
pub mod pipeline;
pub mod report;
pub mod scores;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use filter::{filter, filter_with, FilterSpec, FilterStats, Filtered, Weekday};
pub use pipeline::{score_pipeline, window_from_bounds, QualityParams, ScoreParams};
pub use scores::{QualityScore, ScoresDoc, Window};

use crate::error::{Error, Result};

pub const MAX_WEIGHT: u8 = 5;

/// Importance of the spatial, temporal and content attributes, each 0..=5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weights {
    pub alpha: u8,
    pub beta: u8,
    pub gamma: u8,
}

impl Weights {
    pub fn new(alpha: i64, beta: i64, gamma: i64) -> Result<Self> {
        let check = |w: i64| {
            if (0..=MAX_WEIGHT as i64).contains(&w) {
                Ok(w as u8)
            } else {
                Err(Error::WeightOutOfRange(w))
            }
        };
        Ok(Weights {
            alpha: check(alpha)?,
            beta: check(beta)?,
            gamma: check(gamma)?,
        })
    }

    pub fn as_array(&self) -> [u8; 3] {
        [self.alpha, self.beta, self.gamma]
    }
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            alpha: 1,
            beta: 1,
            gamma: 1,
        }
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.alpha, self.beta, self.gamma)
    }
}

impl FromStr for Weights {
    type Err = Error;

    /// Parses `a,b,g`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Invalid(format!("weights must be three integers a,b,g, got {s:?}")));
        }
        let mut v = [0i64; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::Invalid(format!("weight {p:?} is not an integer")))?;
        }
        Weights::new(v[0], v[1], v[2])
    }
}

impl Serialize for Weights {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Weights {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, g] = <[i64; 3]>::deserialize(d)?;
        Weights::new(a, b, g).map_err(serde::de::Error::custom)
    }
}

/// `1 - d / d_max`; all-perfect inputs (d_max = 0) score 1.
pub fn normalize_spatial(distances: &[f64]) -> Vec<f64> {
    let max = distances.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return vec![1.0; distances.len()];
    }
    distances.iter().map(|d| 1.0 - d / max).collect()
}

/// `raw / max(raw)`; an all-zero input stays zero.
pub fn normalize_max(raws: &[f64]) -> Vec<f64> {
    let max = raws.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return vec![0.0; raws.len()];
    }
    raws.iter().map(|r| r / max).collect()
}

/// Trapezoid-rule integral over days `0..D-1`, divided by `D - 1` to stay on
/// the daily scale. A single day returns its own value.
pub fn period_score(daily: &[f64]) -> f64 {
    match daily.len() {
        0 => 0.0,
        1 => daily[0],
        n => {
            // integrate deviations from the first day so constant series come back exactly
            let base = daily[0];
            let area: f64 = daily.windows(2).map(|w| 0.5 * ((w[0] - base) + (w[1] - base))).sum();
            base + area / (n - 1) as f64
        }
    }
}

pub fn unified(s: f64, t: f64, c: f64, weights: Weights) -> f64 {
    weights.alpha as f64 * s + weights.beta as f64 * t + weights.gamma as f64 * c
}

/// Recompute Q under `weights`, sort by descending Q then region id, and
/// assign competition ranks (equal Q shares the smaller rank).
pub fn rank(scores: Vec<QualityScore>, weights: Weights) -> Vec<QualityScore> {
    let [a, b, g] = weights.as_array();
    rank_by(scores, [a as f64, b as f64, g as f64])
}

/// As [`rank`] with arbitrary non-negative coefficients for S, T and C.
pub fn rank_by(mut scores: Vec<QualityScore>, coefficients: [f64; 3]) -> Vec<QualityScore> {
    let [a, b, g] = coefficients;
    for s in &mut scores {
        s.q = a * s.s + b * s.t + g * s.c;
    }
    scores.sort_by(|a, b| b.q.total_cmp(&a.q).then_with(|| a.region_id.cmp(&b.region_id)));
    let mut prev: Option<(f64, u32)> = None;
    for (i, s) in scores.iter_mut().enumerate() {
        let r = match prev {
            Some((q, r)) if q == s.q => r,
            _ => i as u32 + 1,
        };
        s.rank = r;
        prev = Some((s.q, r));
    }
    scores
}
