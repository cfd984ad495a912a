//! Deterministic synthetic cities for examples, tests and benchmarks.
//!
//! A [`City`] is a row of square regions, each crossed by a regular grid
//! of streets. [`generate`] drives image traffic over the street cells
//! according to a per-region [`Profile`].

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geo::{unproject, LatLon, NetworkLine, Region, RegionSet, StreetGrid, StreetNetwork, Xy};
use crate::ingest::{build_grids, build_index, detections_by_image, DetectedObject, DetectionSet, ImageRecord, Index, IndexConfig};

pub const BLOCK_M: f64 = 100.0;
pub const REGION_GAP_M: f64 = 200.0;
/// South-west corner of the first region.
pub const CITY_ORIGIN: LatLon = LatLon { lat: 40.70, lon: -74.00 };

#[derive(Clone, Debug, PartialEq)]
pub struct RegionLayout {
    pub region_id: String,
    /// South-west corner, meters east of [`CITY_ORIGIN`].
    pub x0_m: f64,
    /// Streets per axis; the region is `streets * BLOCK_M` on a side.
    pub streets: usize,
}

impl RegionLayout {
    pub fn side_m(&self) -> f64 {
        self.streets as f64 * BLOCK_M
    }

    fn at(&self, x: f64, y: f64) -> LatLon {
        unproject(Xy::new(self.x0_m + x, y), CITY_ORIGIN)
    }
}

#[derive(Clone, Debug)]
pub struct City {
    pub layouts: Vec<RegionLayout>,
    pub regions: RegionSet,
    pub lines: Vec<NetworkLine>,
}

impl City {
    /// Regions laid out west to east, `(region_id, streets per axis)`.
    pub fn new(spec: &[(&str, usize)]) -> City {
        let mut layouts = Vec::new();
        let mut x = 0.0;
        for &(id, streets) in spec {
            let l = RegionLayout {
                region_id: id.to_string(),
                x0_m: x,
                streets,
            };
            x += l.side_m() + REGION_GAP_M;
            layouts.push(l);
        }
        let regions = layouts
            .iter()
            .map(|l| {
                let s = l.side_m();
                let ring = vec![l.at(0.0, 0.0), l.at(s, 0.0), l.at(s, s), l.at(0.0, s), l.at(0.0, 0.0)];
                Region::new(l.region_id.clone(), vec![vec![ring]])
            })
            .collect();
        let regions = RegionSet::new(regions).expect("synthetic region ids are unique");
        let mut lines = Vec::new();
        for l in &layouts {
            let s = l.side_m();
            for k in 0..l.streets {
                let off = (k as f64 + 0.5) * BLOCK_M;
                lines.push(NetworkLine {
                    region_id: Some(l.region_id.clone()),
                    vertices: vec![l.at(0.0, off), l.at(s / 2.0, off), l.at(s, off)],
                });
                lines.push(NetworkLine {
                    region_id: Some(l.region_id.clone()),
                    vertices: vec![l.at(off, 0.0), l.at(off, s / 2.0), l.at(off, s)],
                });
            }
        }
        City {
            layouts,
            regions,
            lines,
        }
    }

    /// Street grids in region-id order.
    pub fn grids(&self, cell_length_m: f64) -> Result<Vec<StreetGrid>> {
        let networks = StreetNetwork::partition(&self.lines, &self.regions);
        build_grids(&networks, &self.regions, cell_length_m)
    }

    pub fn regions_geojson(&self) -> Value {
        let features: Vec<Value> = self
            .regions
            .regions()
            .iter()
            .map(|r| {
                let rings: Vec<Vec<[f64; 2]>> = r.polygons[0].iter().map(|ring| lonlat(ring)).collect();
                json!({
                    "type": "Feature",
                    "properties": { "region_id": r.region_id },
                    "geometry": { "type": "Polygon", "coordinates": rings },
                })
            })
            .collect();
        json!({ "type": "FeatureCollection", "features": features })
    }

    pub fn network_geojson(&self) -> Value {
        let features: Vec<Value> = self
            .lines
            .iter()
            .map(|l| {
                json!({
                    "type": "Feature",
                    "properties": { "region_id": l.region_id },
                    "geometry": { "type": "LineString", "coordinates": lonlat(&l.vertices) },
                })
            })
            .collect();
        json!({ "type": "FeatureCollection", "features": features })
    }

    /// Writes `regions.geojson` and `network.geojson` into `dir`.
    pub fn write_geojson(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let regions = dir.join("regions.geojson");
        let network = dir.join("network.geojson");
        fs::write(&regions, self.regions_geojson().to_string()).map_err(|e| Error::io(&regions, e))?;
        fs::write(&network, self.network_geojson().to_string()).map_err(|e| Error::io(&network, e))?;
        Ok((regions, network))
    }
}

fn lonlat(points: &[LatLon]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.lon, p.lat]).collect()
}

/// How one region is photographed each day.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profile {
    /// Fraction of street cells visited, taken from the start of the cell
    /// order so unvisited cells form contiguous holes.
    pub coverage: f64,
    /// Captures per visited cell per day.
    pub visits_per_cell: usize,
    pub revisit_s: i64,
    pub brightness: f64,
    /// Detector confidence of the single object per image; `None` means no
    /// detections.
    pub confidence: Option<f64>,
}

impl Profile {
    /// Every cell, revisited every 10 minutes, bright, confident detections.
    pub const THOROUGH: Profile = Profile {
        coverage: 1.0,
        visits_per_cell: 3,
        revisit_s: 600,
        brightness: 0.8,
        confidence: Some(0.9),
    };

    /// Half the cells, a single visit each, dim images.
    pub const SPARSE: Profile = Profile {
        coverage: 0.5,
        visits_per_cell: 1,
        revisit_s: 600,
        brightness: 0.05,
        confidence: Some(0.9),
    };
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Traffic {
    pub records: Vec<ImageRecord>,
    pub detections: Vec<DetectionSet>,
}

impl Traffic {
    /// Writes `records.jsonl` and `detections.jsonl` into `dir`.
    pub fn write_jsonl(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        use std::io::Write;
        let records = dir.join("records.jsonl");
        let detections = dir.join("detections.jsonl");
        let write = |path: &Path, lines: &mut dyn Iterator<Item = String>| -> Result<()> {
            let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
            let mut w = std::io::BufWriter::new(f);
            for l in lines {
                writeln!(w, "{l}").map_err(|e| Error::io(path, e))?;
            }
            w.flush().map_err(|e| Error::io(path, e))
        };
        write(
            &records,
            &mut self.records.iter().map(|r| serde_json::to_string(r).expect("record serializes")),
        )?;
        write(
            &detections,
            &mut self.detections.iter().map(|d| serde_json::to_string(d).expect("detections serialize")),
        )?;
        Ok((records, detections))
    }

    /// Builds an index in memory, as ingest would from the written files.
    pub fn index(&self, city: &City, config: &IndexConfig) -> Result<Index> {
        let grids = city.grids(config.cell_length_m)?;
        let detections = detections_by_image(self.detections.clone());
        build_index(&self.records, &detections, &grids, &city.regions, config)
    }
}

/// Traffic over `days` local days starting at `first_day`. `profiles` pairs
/// with `grids` by position. Each visited cell gets its first capture at a
/// random time between 08:00 and 16:00 local, then one every `revisit_s`.
pub fn generate(
    grids: &[StreetGrid],
    profiles: &[Profile],
    config: &IndexConfig,
    first_day: i64,
    days: usize,
    seed: u64,
) -> Traffic {
    assert_eq!(grids.len(), profiles.len(), "one profile per grid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Traffic::default();
    for (grid, p) in grids.iter().zip(profiles) {
        let visited = ((p.coverage * grid.len() as f64).ceil() as usize).min(grid.len());
        for d in 0..days as i64 {
            let day = first_day + d;
            let start = config.day_start(day) + 8 * 3600;
            for cell in &grid.cells[..visited] {
                let first = start + rng.gen_range(0..8 * 3600);
                for j in 0..p.visits_per_cell {
                    let id = format!("{}-{}-{}-{}", grid.region_id, day, cell.cell_id, j);
                    out.records.push(ImageRecord {
                        id: id.clone(),
                        lat: cell.centroid.lat,
                        lon: cell.centroid.lon,
                        ts: first + j as i64 * p.revisit_s,
                        brightness: Some(p.brightness),
                        device_id: None,
                    });
                    if let Some(c) = p.confidence {
                        out.detections.push(DetectionSet {
                            image_id: id,
                            objects: vec![DetectedObject {
                                class: "car".into(),
                                confidence: c,
                                bbox: None,
                            }],
                        });
                    }
                }
            }
        }
    }
    out
}
