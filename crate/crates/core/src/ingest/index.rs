use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::parse::{DetectedObject, DetectionSet, ImageRecord};
use crate::error::{Error, Result};
use crate::geo::{
    assign_region, build_grid, Region, RegionSet, SnapIndex, StreetGrid, StreetNetwork, DEFAULT_CELL_LENGTH_M,
    DEFAULT_SNAP_RADIUS_M,
};

pub const SECONDS_PER_DAY: i64 = 86_400;
/// Day buckets default to UTC-5.
pub const DEFAULT_DAY_OFFSET_S: i64 = -5 * 3600;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexConfig {
    pub cell_length_m: f64,
    pub snap_radius_m: f64,
    /// Fixed offset added to UTC timestamps before cutting calendar days.
    pub day_offset_s: i64,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            cell_length_m: DEFAULT_CELL_LENGTH_M,
            snap_radius_m: DEFAULT_SNAP_RADIUS_M,
            day_offset_s: DEFAULT_DAY_OFFSET_S,
        }
    }
}

impl IndexConfig {
    pub fn day_of(&self, ts: i64) -> i64 {
        (ts + self.day_offset_s).div_euclid(SECONDS_PER_DAY)
    }

    /// 0 = Sunday .. 6 = Saturday, in the shifted local day.
    pub fn weekday_of(&self, ts: i64) -> u8 {
        // day 0 (1970-01-01) was a Thursday
        (self.day_of(ts) + 4).rem_euclid(7) as u8
    }

    pub fn hour_of(&self, ts: i64) -> u8 {
        ((ts + self.day_offset_s).rem_euclid(SECONDS_PER_DAY) / 3600) as u8
    }

    /// First UTC timestamp of local day `day`.
    pub fn day_start(&self, day: i64) -> i64 {
        day * SECONDS_PER_DAY - self.day_offset_s
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub accepted: u64,
    pub outside_region: u64,
    pub unsnapped: u64,
    pub invalid: u64,
}

impl IngestStats {
    pub fn total(&self) -> u64 {
        self.accepted + self.outside_region + self.unsnapped + self.invalid
    }
}

/// An accepted record with its cell and day assignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoredRecord {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
    pub ts: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brightness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device_id: Option<String>,
    pub cell: u32,
    pub day: i64,
    /// `None` when no detector output exists for this image.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detections: Option<Vec<DetectedObject>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionIndex {
    pub region: Region,
    pub grid: StreetGrid,
    /// Sorted by (cell, ts, id).
    pub records: Vec<StoredRecord>,
}

impl RegionIndex {
    pub fn region_id(&self) -> &str {
        &self.region.region_id
    }

    pub fn day_range(&self) -> Option<(i64, i64)> {
        let min = self.records.iter().map(|r| r.day).min()?;
        let max = self.records.iter().map(|r| r.day).max()?;
        Some((min, max))
    }

    /// Sample count per cell over records passing `keep`.
    pub fn cell_counts<F: Fn(&StoredRecord) -> bool>(&self, keep: F) -> Vec<u64> {
        let mut counts = vec![0u64; self.grid.len()];
        for r in self.records.iter().filter(|r| keep(r)) {
            counts[r.cell as usize] += 1;
        }
        counts
    }
}

/// Immutable, region-partitioned collection of accepted records.
#[derive(Clone, Debug, PartialEq)]
pub struct Index {
    pub config: IndexConfig,
    pub stats: IngestStats,
    /// In region-id order.
    pub regions: Vec<RegionIndex>,
}

impl Index {
    pub fn empty(config: IndexConfig) -> Self {
        Index {
            config,
            stats: IngestStats::default(),
            regions: Vec::new(),
        }
    }

    pub fn region(&self, region_id: &str) -> Option<&RegionIndex> {
        self.regions
            .binary_search_by(|r| r.region_id().cmp(region_id))
            .ok()
            .map(|i| &self.regions[i])
    }

    pub fn record_count(&self) -> usize {
        self.regions.iter().map(|r| r.records.len()).sum()
    }

    pub fn day_range(&self) -> Option<(i64, i64)> {
        self.regions
            .iter()
            .filter_map(RegionIndex::day_range)
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    /// `[min_ts, max_ts]` over all records.
    pub fn ts_range(&self) -> Option<(i64, i64)> {
        let all = self.regions.iter().flat_map(|r| r.records.iter().map(|x| x.ts));
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        for t in all {
            lo = lo.min(t);
            hi = hi.max(t);
        }
        (lo <= hi).then_some((lo, hi))
    }

    pub fn records(&self) -> impl Iterator<Item = (&RegionIndex, &StoredRecord)> {
        self.regions.iter().flat_map(|r| r.records.iter().map(move |x| (r, x)))
    }
}

/// One grid per region from the partitioned street network, each in a
/// local frame centred on its region.
pub fn build_grids(networks: &[StreetNetwork], regions: &RegionSet, cell_length_m: f64) -> Result<Vec<StreetGrid>> {
    regions
        .regions()
        .par_iter()
        .map(|r| {
            let empty = StreetNetwork {
                region_id: r.region_id.clone(),
                segments: Vec::new(),
            };
            let net = networks.iter().find(|n| n.region_id == r.region_id).unwrap_or(&empty);
            build_grid(net, r.centroid(), cell_length_m)
        })
        .collect()
}

enum Placement {
    Accepted(usize, u32),
    Outside,
    Unsnapped,
}

/// Assign every record a region (point in polygon) and a cell (snap), join
/// detections, and sort. Output is independent of input order and thread
/// count. `grids` must hold one grid per region.
pub fn build_index(
    records: &[ImageRecord],
    detections: &BTreeMap<String, DetectionSet>,
    grids: &[StreetGrid],
    regions: &RegionSet,
    config: &IndexConfig,
) -> Result<Index> {
    let mut seen = HashSet::with_capacity(records.len());
    for r in records {
        if !seen.insert(r.id.as_str()) {
            return Err(Error::DuplicateId(r.id.clone()));
        }
    }
    drop(seen);

    let region_list = regions.regions();
    let grid_for: Vec<&StreetGrid> = region_list
        .iter()
        .map(|r| {
            grids
                .iter()
                .find(|g| g.region_id == r.region_id)
                .ok_or_else(|| Error::Invalid(format!("no grid for region {:?}", r.region_id)))
        })
        .collect::<Result<_>>()?;
    let snappers: Vec<SnapIndex> = grid_for.iter().map(|g| SnapIndex::new(g, config.snap_radius_m)).collect();

    let placements: Vec<Placement> = records
        .par_iter()
        .map(|r| {
            let Some(id) = assign_region(r.lat, r.lon, regions) else {
                return Placement::Outside;
            };
            let ri = region_list
                .binary_search_by(|x| x.region_id.as_str().cmp(id))
                .expect("region from set");
            let grid = grid_for[ri];
            match snappers[ri].snap(grid, grid.project(r.lat, r.lon)) {
                Some(cell) => Placement::Accepted(ri, cell),
                None => Placement::Unsnapped,
            }
        })
        .collect();

    let mut stats = IngestStats::default();
    let mut per_region: Vec<Vec<StoredRecord>> = vec![Vec::new(); region_list.len()];
    for (r, p) in records.iter().zip(placements) {
        match p {
            Placement::Outside => stats.outside_region += 1,
            Placement::Unsnapped => stats.unsnapped += 1,
            Placement::Accepted(ri, cell) => {
                stats.accepted += 1;
                per_region[ri].push(StoredRecord {
                    id: r.id.clone(),
                    lat: r.lat,
                    lon: r.lon,
                    ts: r.ts,
                    brightness: r.brightness,
                    device_id: r.device_id.clone(),
                    cell,
                    day: config.day_of(r.ts),
                    detections: detections.get(&r.id).map(|d| d.objects.clone()),
                });
            }
        }
    }
    per_region.par_iter_mut().for_each(|recs| {
        recs.sort_by(|a, b| (a.cell, a.ts, &a.id).cmp(&(b.cell, b.ts, &b.id)));
    });

    let regions = region_list
        .iter()
        .zip(grid_for)
        .zip(per_region)
        .map(|((region, grid), records)| RegionIndex {
            region: region.clone(),
            grid: grid.clone(),
            records,
        })
        .collect();
    Ok(Index {
        config: *config,
        stats,
        regions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::LatLon;

    fn square(id: &str, lon0: f64, lat0: f64, side: f64) -> Region {
        let ring = vec![
            LatLon::new(lat0, lon0),
            LatLon::new(lat0, lon0 + side),
            LatLon::new(lat0 + side, lon0 + side),
            LatLon::new(lat0 + side, lon0),
            LatLon::new(lat0, lon0),
        ];
        Region::new(id, vec![vec![ring]])
    }

    fn rec(id: &str, lat: f64, lon: f64, ts: i64) -> ImageRecord {
        ImageRecord {
            id: id.into(),
            lat,
            lon,
            ts,
            brightness: None,
            device_id: None,
        }
    }

    /// Region "A" is a 0.01 degree square at the equator with one street
    /// along its southern half-line lat = 0.005.
    fn fixture() -> (RegionSet, Vec<StreetGrid>) {
        let regions = RegionSet::new(vec![square("A", 0.0, 0.0, 0.01)]).unwrap();
        let nets = vec![StreetNetwork {
            region_id: "A".into(),
            segments: vec![vec![LatLon::new(0.005, 0.001), LatLon::new(0.005, 0.009)]],
        }];
        let grids = build_grids(&nets, &regions, 10.0).unwrap();
        (regions, grids)
    }

    #[test]
    fn five_record_fixture() {
        let (regions, grids) = fixture();
        let records = vec![
            rec("in1", 0.005, 0.002, 1_600_000_000),
            rec("out1", 0.02, 0.002, 1_600_000_000),
            rec("in2", 0.00501, 0.008, 1_600_000_100),
            rec("out2", -0.001, 0.005, 1_600_000_000),
            // inside the square but ~330 m from the street
            rec("far", 0.008, 0.005, 1_600_000_000),
        ];
        let idx = build_index(&records, &BTreeMap::new(), &grids, &regions, &IndexConfig::default()).unwrap();
        assert_eq!(idx.stats.accepted, 2);
        assert_eq!(idx.stats.outside_region, 2);
        assert_eq!(idx.stats.unsnapped, 1);
        assert_eq!(idx.stats.invalid, 0);
        assert_eq!(idx.stats.total(), 5);
        assert_eq!(idx.record_count(), 2);
    }

    #[test]
    fn empty_input() {
        let (regions, grids) = fixture();
        let idx = build_index(&[], &BTreeMap::new(), &grids, &regions, &IndexConfig::default()).unwrap();
        assert_eq!(idx.stats, IngestStats::default());
        assert_eq!(idx.record_count(), 0);
    }

    #[test]
    fn duplicate_id_named() {
        let (regions, grids) = fixture();
        let records = vec![
            rec("x", 0.005, 0.002, 1),
            rec("y", 0.005, 0.002, 1),
            rec("x", 0.005, 0.003, 2),
        ];
        let err = build_index(&records, &BTreeMap::new(), &grids, &regions, &IndexConfig::default()).unwrap_err();
        assert!(matches!(&err, Error::DuplicateId(id) if id == "x"));
        assert!(err.to_string().contains("\"x\""));
    }

    #[test]
    fn detections_joined() {
        let (regions, grids) = fixture();
        let mut det = BTreeMap::new();
        det.insert(
            "a".to_string(),
            DetectionSet {
                image_id: "a".into(),
                objects: vec![DetectedObject {
                    class: "car".into(),
                    confidence: 0.5,
                    bbox: None,
                }],
            },
        );
        let records = vec![rec("a", 0.005, 0.002, 10), rec("b", 0.005, 0.002, 20)];
        let idx = build_index(&records, &det, &grids, &regions, &IndexConfig::default()).unwrap();
        let recs = &idx.regions[0].records;
        assert_eq!(recs[0].detections.as_ref().unwrap().len(), 1);
        assert_eq!(recs[1].detections, None);
    }

    #[test]
    fn day_and_weekday() {
        let cfg = IndexConfig::default();
        // 2020-10-02 04:00 UTC is Thursday 23:00 at UTC-5
        let ts = 1_601_611_200;
        assert_eq!(cfg.weekday_of(ts), 4);
        assert_eq!(cfg.hour_of(ts), 23);
        assert_eq!(cfg.weekday_of(ts + 3600), 5);
        assert_eq!(cfg.day_start(cfg.day_of(ts)) + 23 * 3600, ts);
    }
}
