//! Quality-predicate filtering over an index.
//!
//! Record-level predicates (region, time, weekday, hour, brightness, bbox)
//! apply first. Quality predicates then keep or drop whole region-days,
//! scored on the records that survived the record-level predicates:
//!
//! * `S = 1 - d / d_cap`, where `d_cap` is the metric's maximum for the
//!   region (1 bit for JSD, the grid diameter for Wasserstein);
//! * `T` and `C` are max-normalized over the surviving region-days.
//!
//! Dropping region-days can only lower the T/C maxima, so a second pass
//! with the same spec keeps the same records.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pipeline::{day_attributes, QualityParams};
use crate::error::{Error, Result};
use crate::ingest::{Index, RegionIndex, StoredRecord};
use crate::spatial::{reference_uniform, Metric};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weekday {
    #[serde(alias = "sunday")]
    Sun,
    #[serde(alias = "monday")]
    Mon,
    #[serde(alias = "tuesday")]
    Tue,
    #[serde(alias = "wednesday")]
    Wed,
    #[serde(alias = "thursday")]
    Thu,
    #[serde(alias = "friday")]
    Fri,
    #[serde(alias = "saturday")]
    Sat,
}

impl Weekday {
    pub const ALL: [Weekday; 7] = [
        Weekday::Sun,
        Weekday::Mon,
        Weekday::Tue,
        Weekday::Wed,
        Weekday::Thu,
        Weekday::Fri,
        Weekday::Sat,
    ];

    /// 0 = Sunday.
    pub fn index(self) -> u8 {
        self as u8
    }
}

impl FromStr for Weekday {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        const FULL: [&str; 7] = ["sunday", "monday", "tuesday", "wednesday", "thursday", "friday", "saturday"];
        let lower = s.to_ascii_lowercase();
        Weekday::ALL
            .into_iter()
            .zip(FULL)
            .find(|(d, full)| lower == d.to_string() || lower == *full)
            .map(|(d, _)| d)
            .ok_or_else(|| Error::Invalid(format!("unknown weekday {s:?}")))
    }
}

impl fmt::Display for Weekday {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = ["sun", "mon", "tue", "wed", "thu", "fri", "sat"][*self as usize];
        f.write_str(s)
    }
}

/// Conjunctive predicates. Absent fields do not constrain.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_ids: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub days_of_week: Option<Vec<Weekday>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hours_of_day: Option<Vec<u8>>,
    /// Images without a brightness measurement pass.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_brightness: Option<f64>,
    /// `[min_lon, min_lat, max_lon, max_lat]`, inclusive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<[f64; 4]>,
    #[serde(rename = "min_S", default, skip_serializing_if = "Option::is_none")]
    pub min_s: Option<f64>,
    #[serde(rename = "min_T", default, skip_serializing_if = "Option::is_none")]
    pub min_t: Option<f64>,
    #[serde(rename = "min_C", default, skip_serializing_if = "Option::is_none")]
    pub min_c: Option<f64>,
    /// Spatial measure for `min_S`; defaults to JSD.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
}

impl FilterSpec {
    pub fn validate(&self) -> Result<()> {
        if let (Some(a), Some(b)) = (self.from, self.to) {
            if a >= b {
                return Err(Error::Invalid(format!("time range [{a}, {b}) is empty")));
            }
        }
        if let Some(h) = self.hours_of_day.as_ref().and_then(|h| h.iter().find(|&&h| h > 23)) {
            return Err(Error::Invalid(format!("hour {h} outside 0..23")));
        }
        let unit = |name: &str, v: Option<f64>| match v {
            Some(x) if !(0.0..=1.0).contains(&x) => Err(Error::Invalid(format!("{name} {x} outside [0, 1]"))),
            _ => Ok(()),
        };
        unit("min_brightness", self.min_brightness)?;
        unit("min_S", self.min_s)?;
        unit("min_T", self.min_t)?;
        unit("min_C", self.min_c)?;
        if let Some(b) = self.bbox {
            if !(b[0] <= b[2] && b[1] <= b[3]) {
                return Err(Error::Invalid(format!("bbox {b:?} has min > max")));
            }
        }
        Ok(())
    }

    fn has_quality(&self) -> bool {
        self.min_s.is_some() || self.min_t.is_some() || self.min_c.is_some()
    }

    fn keeps_record(&self, index: &Index, region: &RegionIndex, r: &StoredRecord) -> bool {
        let cfg = &index.config;
        self.region_ids
            .as_ref()
            .is_none_or(|ids| ids.iter().any(|id| id == region.region_id()))
            && self.from.is_none_or(|f| r.ts >= f)
            && self.to.is_none_or(|t| r.ts < t)
            && self
                .days_of_week
                .as_ref()
                .is_none_or(|d| d.iter().any(|w| w.index() == cfg.weekday_of(r.ts)))
            && self
                .hours_of_day
                .as_ref()
                .is_none_or(|h| h.contains(&cfg.hour_of(r.ts)))
            && self
                .min_brightness
                .is_none_or(|m| r.brightness.is_none_or(|b| b >= m))
            && self
                .bbox
                .is_none_or(|b| r.lon >= b[0] && r.lat >= b[1] && r.lon <= b[2] && r.lat <= b[3])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterStats {
    pub input_count: u64,
    pub kept_count: u64,
    pub reduction_pct: f64,
}

impl FilterStats {
    pub fn new(input_count: u64, kept_count: u64) -> Self {
        let reduction_pct = if input_count == 0 {
            0.0
        } else {
            100.0 * (1.0 - kept_count as f64 / input_count as f64)
        };
        FilterStats {
            input_count,
            kept_count,
            reduction_pct,
        }
    }
}

/// A lazily evaluated filter result over a borrowed index.
pub struct Filtered<'a> {
    index: &'a Index,
    spec: FilterSpec,
    /// (region position, day) pairs passing the quality predicates.
    passing_days: Option<HashSet<(usize, i64)>>,
}

impl<'a> Filtered<'a> {
    pub fn iter(&self) -> impl Iterator<Item = (&'a RegionIndex, &'a StoredRecord)> + '_ {
        self.index.regions.iter().enumerate().flat_map(move |(ri, region)| {
            region
                .records
                .iter()
                .filter(move |r| self.spec.keeps_record(self.index, region, r))
                .filter(move |r| {
                    self.passing_days
                        .as_ref()
                        .is_none_or(|days| days.contains(&(ri, r.day)))
                })
                .map(move |r| (region, r))
        })
    }

    pub fn stats(&self) -> FilterStats {
        FilterStats::new(self.index.record_count() as u64, self.iter().count() as u64)
    }

    /// Materialize the kept records as an index sharing the source grids.
    pub fn to_index(&self) -> Index {
        let mut out = Index::empty(self.index.config);
        out.regions = self
            .index
            .regions
            .iter()
            .map(|r| RegionIndex {
                region: r.region.clone(),
                grid: r.grid.clone(),
                records: Vec::new(),
            })
            .collect();
        for (region, rec) in self.iter() {
            let pos = out
                .regions
                .binary_search_by(|r| r.region_id().cmp(region.region_id()))
                .expect("same regions");
            out.regions[pos].records.push(rec.clone());
        }
        out.stats.accepted = out.record_count() as u64;
        out
    }
}

pub fn filter<'a>(index: &'a Index, spec: &FilterSpec) -> Result<Filtered<'a>> {
    let params = QualityParams {
        metric: spec.metric.unwrap_or(Metric::Jsd),
        ..QualityParams::default()
    };
    filter_with(index, spec, &params)
}

/// As [`filter`], with explicit scoring settings for the quality
/// predicates. `spec.metric`, when set, overrides `params.metric`.
pub fn filter_with<'a>(index: &'a Index, spec: &FilterSpec, params: &QualityParams) -> Result<Filtered<'a>> {
    spec.validate()?;
    let mut params = *params;
    if let Some(m) = spec.metric {
        params.metric = m;
    }
    let passing_days = if spec.has_quality() {
        Some(quality_days(index, spec, &params)?)
    } else {
        None
    };
    Ok(Filtered {
        index,
        spec: spec.clone(),
        passing_days,
    })
}

/// (region position, day, S, t_raw, c_raw)
type DayQuality = (usize, i64, f64, f64, f64);

fn quality_days(index: &Index, spec: &FilterSpec, params: &QualityParams) -> Result<HashSet<(usize, i64)>> {
    let per_region: Vec<Vec<DayQuality>> = index
        .regions
        .par_iter()
        .enumerate()
        .map(|(ri, region)| {
            let mut by_day: Vec<(i64, Vec<&StoredRecord>)> = Vec::new();
            let days: BTreeSet<i64> = region.records.iter().map(|r| r.day).collect();
            for d in days {
                by_day.push((d, Vec::new()));
            }
            for r in region.records.iter().filter(|r| spec.keeps_record(index, region, r)) {
                let slot = by_day.binary_search_by_key(&r.day, |(d, _)| *d).expect("day present");
                by_day[slot].1.push(r);
            }
            by_day.retain(|(_, recs)| !recs.is_empty());
            if by_day.is_empty() {
                return Ok(Vec::new());
            }
            let reference = reference_uniform(&region.grid)?;
            let cap = match params.metric {
                Metric::Jsd => 1.0,
                _ => region.grid.diameter(),
            };
            by_day
                .iter()
                .map(|(day, recs)| {
                    let a = day_attributes(region, &reference, recs, params)?;
                    let s = if cap > 0.0 { (1.0 - a.distance / cap).clamp(0.0, 1.0) } else { 1.0 };
                    Ok((ri, *day, s, a.t_raw, a.c_raw))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let all: Vec<(usize, i64, f64, f64, f64)> = per_region.into_iter().flatten().collect();
    let t_max = all.iter().map(|x| x.3).fold(0.0, f64::max);
    let c_max = all.iter().map(|x| x.4).fold(0.0, f64::max);
    let norm = |v: f64, max: f64| if max > 0.0 { v / max } else { 0.0 };
    Ok(all
        .into_iter()
        .filter(|&(_, _, s, t, c)| {
            spec.min_s.is_none_or(|m| s >= m)
                && spec.min_t.is_none_or(|m| norm(t, t_max) >= m)
                && spec.min_c.is_none_or(|m| norm(c, c_max) >= m)
        })
        .map(|(ri, day, ..)| (ri, day))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weekday_parsing() {
        assert_eq!("fri".parse::<Weekday>().unwrap(), Weekday::Fri);
        assert_eq!("Friday".parse::<Weekday>().unwrap(), Weekday::Fri);
        assert!("fr".parse::<Weekday>().is_err());
        let spec: FilterSpec = serde_json::from_str(r#"{"days_of_week":["fri","saturday"]}"#).unwrap();
        assert_eq!(spec.days_of_week, Some(vec![Weekday::Fri, Weekday::Sat]));
    }

    #[test]
    fn spec_validation() {
        let bad_hour: FilterSpec = serde_json::from_str(r#"{"hours_of_day":[25]}"#).unwrap();
        assert!(bad_hour.validate().is_err());
        let bad_range = FilterSpec {
            from: Some(10),
            to: Some(10),
            ..Default::default()
        };
        assert!(bad_range.validate().is_err());
        assert!(serde_json::from_str::<FilterSpec>(r#"{"bogus":1}"#).is_err());
        let q: FilterSpec = serde_json::from_str(r#"{"min_S":0.5,"min_T":0.1}"#).unwrap();
        assert_eq!((q.min_s, q.min_t), (Some(0.5), Some(0.1)));
    }

    #[test]
    fn reduction_arithmetic() {
        assert_eq!(FilterStats::new(0, 0).reduction_pct, 0.0);
        assert_eq!(FilterStats::new(10, 10).reduction_pct, 0.0);
        assert!((FilterStats::new(7, 1).reduction_pct - 600.0 / 7.0).abs() < 1e-12);
    }
}
