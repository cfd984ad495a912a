use log::warn;
use rayon::prelude::*;

use super::scores::{QualityScore, ScoresDoc, Window};
use super::{normalize_max, normalize_spatial, period_score, rank, Weights};
use crate::content::{content_raw, DEFAULT_BRIGHTNESS_THRESHOLD};
use crate::error::{Error, Result};
use crate::ingest::{Index, RegionIndex, StoredRecord};
use crate::spatial::{observed_histogram, reference_uniform, spatial_distance, Distribution, Metric, SpatialOptions};
use crate::temporal::{temporal_raw, TemporalOptions};

/// Settings shared by every per-region, per-day attribute computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityParams {
    pub metric: Metric,
    pub spatial: SpatialOptions,
    pub temporal: TemporalOptions,
    pub brightness_threshold: f64,
}

impl Default for QualityParams {
    fn default() -> Self {
        QualityParams {
            metric: Metric::Jsd,
            spatial: SpatialOptions::default(),
            temporal: TemporalOptions::default(),
            brightness_threshold: DEFAULT_BRIGHTNESS_THRESHOLD,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScoreParams {
    pub quality: QualityParams,
    pub weights: Weights,
    /// Defaults to the whole days spanned by the index.
    pub window: Option<Window>,
}

/// Raw attributes of one region on one day.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct DayAttributes {
    pub distance: f64,
    pub t_raw: f64,
    pub c_raw: f64,
}

/// `records` must be one region's records for one day, in (cell, ts) order.
pub(crate) fn day_attributes(
    region: &RegionIndex,
    reference: &Distribution,
    records: &[&StoredRecord],
    params: &QualityParams,
) -> Result<DayAttributes> {
    let observed = observed_histogram(records.iter().map(|r| r.cell), &region.grid);
    let distance = spatial_distance(reference, &observed, params.metric, &region.grid, &params.spatial)?.distance;

    let mut runs: Vec<(u32, Vec<i64>)> = Vec::new();
    for r in records {
        match runs.last_mut() {
            Some((cell, ts)) if *cell == r.cell => ts.push(r.ts),
            _ => runs.push((r.cell, vec![r.ts])),
        }
    }
    let t_raw = temporal_raw(runs.iter().map(|(c, ts)| (*c, ts.as_slice())), &params.temporal);
    let c_raw = content_raw(records.iter().copied(), params.brightness_threshold).c_raw;
    Ok(DayAttributes { distance, t_raw, c_raw })
}

/// Records of `region` inside `window`, bucketed by day offset from
/// `first_day`. Bucket order follows the region's (cell, ts) order.
pub(crate) fn day_buckets(
    region: &RegionIndex,
    window: Window,
    first_day: i64,
    days: usize,
) -> Vec<Vec<&StoredRecord>> {
    let mut buckets = vec![Vec::new(); days];
    for r in &region.records {
        if r.ts >= window.from && r.ts < window.to {
            let d = (r.day - first_day) as usize;
            if d < days {
                buckets[d].push(r);
            }
        }
    }
    buckets
}

/// Window from optional bounds; a missing bound falls back to the edge of
/// the index's day range. `None` when neither bound is given.
pub fn window_from_bounds(index: &Index, from: Option<i64>, to: Option<i64>) -> Result<Option<Window>> {
    if from.is_none() && to.is_none() {
        return Ok(None);
    }
    let whole = resolve_window(index, None);
    let pick = |bound: Option<i64>, edge: fn(&Window) -> i64| match bound {
        Some(b) => Ok(b),
        None => whole.as_ref().map(edge).map_err(|_| Error::EmptyWindow),
    };
    let w = Window {
        from: pick(from, |w| w.from)?,
        to: pick(to, |w| w.to)?,
    };
    if w.from >= w.to {
        return Err(Error::EmptyWindow);
    }
    Ok(Some(w))
}

fn resolve_window(index: &Index, window: Option<Window>) -> Result<Window> {
    let w = match window {
        Some(w) => w,
        None => {
            let (lo, hi) = index.day_range().ok_or(Error::EmptyWindow)?;
            Window {
                from: index.config.day_start(lo),
                to: index.config.day_start(hi + 1),
            }
        }
    };
    if w.from >= w.to {
        return Err(Error::EmptyWindow);
    }
    Ok(w)
}

/// Daily spatial, temporal and content attributes per region, integrated
/// over the window, normalized across regions and ranked. Regions without
/// street cells are left out. Output is independent of thread count.
pub fn score_pipeline(index: &Index, params: &ScoreParams) -> Result<ScoresDoc> {
    let window = resolve_window(index, params.window)?;
    let in_window = index
        .records()
        .any(|(_, r)| r.ts >= window.from && r.ts < window.to);
    if !in_window {
        return Err(Error::EmptyWindow);
    }
    let first_day = index.config.day_of(window.from);
    let last_day = index.config.day_of(window.to - 1);
    let days = (last_day - first_day + 1) as usize;

    let scored: Vec<&RegionIndex> = index
        .regions
        .iter()
        .filter(|r| {
            if r.grid.is_empty() {
                warn!("region {} has no street cells; not scored", r.region_id());
            }
            !r.grid.is_empty()
        })
        .collect();

    let raws: Vec<(f64, f64, f64)> = scored
        .par_iter()
        .map(|region| {
            let reference = reference_uniform(&region.grid)?;
            let buckets = day_buckets(region, window, first_day, days);
            let daily: Vec<DayAttributes> = buckets
                .par_iter()
                .map(|b| day_attributes(region, &reference, b, &params.quality))
                .collect::<Result<_>>()?;
            let series = |f: fn(&DayAttributes) -> f64| period_score(&daily.iter().map(f).collect::<Vec<_>>());
            Ok((series(|d| d.distance), series(|d| d.t_raw), series(|d| d.c_raw)))
        })
        .collect::<Result<_>>()?;

    let s = normalize_spatial(&raws.iter().map(|r| r.0).collect::<Vec<_>>());
    let t = normalize_max(&raws.iter().map(|r| r.1).collect::<Vec<_>>());
    let c = normalize_max(&raws.iter().map(|r| r.2).collect::<Vec<_>>());
    let segments = scored
        .iter()
        .enumerate()
        .map(|(i, region)| QualityScore {
            region_id: region.region_id().to_string(),
            s_raw: raws[i].0,
            t_raw: raws[i].1,
            c_raw: raws[i].2,
            s: s[i],
            t: t[i],
            c: c[i],
            q: 0.0,
            rank: 0,
        })
        .collect();

    Ok(ScoresDoc {
        metric: params.quality.metric.as_str().to_string(),
        weights: params.weights,
        window,
        segments: rank(segments, params.weights),
    })
}
