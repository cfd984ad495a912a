//! Revisit statistics per street cell and the temporal quality sum.
//!
//! A cell visited `n > 1` times at distinct timestamps contributes `n / u`,
//! where `u` is its dominant inter-sample interval in seconds. Frequent,
//! regular revisits therefore score high.

use serde::{Deserialize, Serialize};

pub const DEFAULT_BIN_WIDTH_S: f64 = 60.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RevisitStats {
    pub cell_id: u32,
    pub n: usize,
    pub intervals_s: Vec<i64>,
    pub u_s: f64,
}

/// How the dominant interval enters the per-cell contribution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateReading {
    /// `n / interval`: more frequent revisits score higher.
    #[default]
    Interval,
    /// `n * interval`: treats `u` as a frequency, so `1/u` is the interval.
    Frequency,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemporalOptions {
    pub bin_width_s: f64,
    pub reading: RateReading,
}

impl Default for TemporalOptions {
    fn default() -> Self {
        TemporalOptions {
            bin_width_s: DEFAULT_BIN_WIDTH_S,
            reading: RateReading::Interval,
        }
    }
}

/// Revisit statistics for one cell. `timestamps` must be sorted ascending;
/// repeated timestamps count once. Returns `None` for fewer than two
/// distinct visits.
pub fn revisit_stats(cell_id: u32, timestamps: &[i64], bin_width_s: f64) -> Option<RevisitStats> {
    debug_assert!(timestamps.windows(2).all(|w| w[0] <= w[1]));
    let mut distinct = timestamps.to_vec();
    distinct.dedup();
    if distinct.len() < 2 {
        return None;
    }
    let intervals_s: Vec<i64> = distinct.windows(2).map(|w| w[1] - w[0]).collect();
    let u_s = dominant_interval(&intervals_s, bin_width_s);
    Some(RevisitStats {
        cell_id,
        n: distinct.len(),
        intervals_s,
        u_s,
    })
}

/// Median of the intervals in the most populated bin. Bins are centred on
/// multiples of `bin_width_s`; equally populated bins resolve to the
/// shorter one.
pub fn dominant_interval(intervals_s: &[i64], bin_width_s: f64) -> f64 {
    assert!(!intervals_s.is_empty(), "dominant_interval needs at least one interval");
    let width = if bin_width_s > 0.0 { bin_width_s } else { DEFAULT_BIN_WIDTH_S };
    let mut keyed: Vec<(i64, i64)> = intervals_s
        .iter()
        .map(|&v| (((v as f64 / width) + 0.5).floor() as i64, v))
        .collect();
    keyed.sort_unstable();

    let (mut best_bin, mut best_range) = (keyed[0].0, 0..0);
    let mut start = 0;
    for i in 1..=keyed.len() {
        if i == keyed.len() || keyed[i].0 != keyed[start].0 {
            if i - start > best_range.len() {
                best_bin = keyed[start].0;
                best_range = start..i;
            }
            start = i;
        }
    }
    debug_assert!(keyed[best_range.clone()].iter().all(|(b, _)| *b == best_bin));
    let members: Vec<i64> = keyed[best_range].iter().map(|&(_, v)| v).collect();
    let m = members.len();
    if m % 2 == 1 {
        members[m / 2] as f64
    } else {
        (members[m / 2 - 1] as f64 + members[m / 2] as f64) / 2.0
    }
}

pub fn cell_contribution(stats: &RevisitStats, reading: RateReading) -> f64 {
    match reading {
        RateReading::Interval => stats.n as f64 / stats.u_s,
        RateReading::Frequency => stats.n as f64 * stats.u_s,
    }
}

/// Temporal quality of one slice: `cells` yields `(cell_id, sorted timestamps)`
/// in ascending cell order. Cells visited at most once contribute nothing.
pub fn temporal_raw<'a, I>(cells: I, opts: &TemporalOptions) -> f64
where
    I: IntoIterator<Item = (u32, &'a [i64])>,
{
    cells
        .into_iter()
        .filter_map(|(cell, ts)| revisit_stats(cell, ts, opts.bin_width_s))
        .map(|s| cell_contribution(&s, opts.reading))
        .sum()
}
