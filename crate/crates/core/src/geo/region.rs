use serde::{Deserialize, Serialize};

use super::projection::LatLon;
use crate::error::{Error, Result};

/// A named area made of one or more polygons. Each polygon is a list of
/// closed rings; the first ring is the outer boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub region_id: String,
    pub polygons: Vec<Vec<Vec<LatLon>>>,
    #[serde(skip)]
    bbox: Option<[f64; 4]>,
}

impl Region {
    pub fn new(region_id: impl Into<String>, polygons: Vec<Vec<Vec<LatLon>>>) -> Self {
        let mut r = Region {
            region_id: region_id.into(),
            polygons,
            bbox: None,
        };
        r.bbox = Some(r.compute_bbox());
        r
    }

    fn compute_bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in self.polygons.iter().flatten().flatten() {
            b[0] = b[0].min(p.lon);
            b[1] = b[1].min(p.lat);
            b[2] = b[2].max(p.lon);
            b[3] = b[3].max(p.lat);
        }
        b
    }

    /// `[min_lon, min_lat, max_lon, max_lat]`
    pub fn bbox(&self) -> [f64; 4] {
        self.bbox.unwrap_or_else(|| self.compute_bbox())
    }

    /// Even-odd containment per polygon; points on any ring edge are inside.
    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        let b = self.bbox();
        if lon < b[0] || lon > b[2] || lat < b[1] || lat > b[3] {
            return false;
        }
        self.polygons.iter().any(|rings| {
            let mut inside = false;
            for ring in rings {
                match ring_test(ring, lat, lon) {
                    RingTest::Boundary => return true,
                    RingTest::Inside => inside = !inside,
                    RingTest::Outside => {}
                }
            }
            inside
        })
    }

    /// Area-weighted centroid of the outer rings in degree space; falls back to
    /// the bounding-box centre for degenerate geometry.
    pub fn centroid(&self) -> LatLon {
        let (mut a_sum, mut cx, mut cy) = (0.0, 0.0, 0.0);
        for rings in &self.polygons {
            let ring = &rings[0];
            let (mut a, mut x, mut y) = (0.0, 0.0, 0.0);
            for w in ring.windows(2) {
                let cross = w[0].lon * w[1].lat - w[1].lon * w[0].lat;
                a += cross;
                x += (w[0].lon + w[1].lon) * cross;
                y += (w[0].lat + w[1].lat) * cross;
            }
            a *= 0.5;
            if a != 0.0 {
                a_sum += a;
                cx += x / 6.0;
                cy += y / 6.0;
            }
        }
        if a_sum.abs() > 1e-15 {
            LatLon::new(cy / a_sum, cx / a_sum)
        } else {
            let b = self.bbox();
            LatLon::new((b[1] + b[3]) / 2.0, (b[0] + b[2]) / 2.0)
        }
    }
}

enum RingTest {
    Inside,
    Outside,
    Boundary,
}

fn on_segment(a: &LatLon, b: &LatLon, lat: f64, lon: f64) -> bool {
    let cross = (b.lon - a.lon) * (lat - a.lat) - (b.lat - a.lat) * (lon - a.lon);
    let scale = (b.lon - a.lon).abs().max((b.lat - a.lat).abs()).max(1e-300);
    if cross.abs() > 1e-12 * scale {
        return false;
    }
    lon >= a.lon.min(b.lon) && lon <= a.lon.max(b.lon) && lat >= a.lat.min(b.lat) && lat <= a.lat.max(b.lat)
}

fn ring_test(ring: &[LatLon], lat: f64, lon: f64) -> RingTest {
    let mut inside = false;
    for w in ring.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if on_segment(a, b, lat, lon) {
            return RingTest::Boundary;
        }
        if (a.lat > lat) != (b.lat > lat) {
            let x = a.lon + (lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
            if lon < x {
                inside = !inside;
            }
        }
    }
    if inside {
        RingTest::Inside
    } else {
        RingTest::Outside
    }
}

/// Regions sorted by id, ids unique.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionSet {
    regions: Vec<Region>,
}

impl RegionSet {
    pub fn new(mut regions: Vec<Region>) -> Result<Self> {
        regions.sort_by(|a, b| a.region_id.cmp(&b.region_id));
        if let Some(w) = regions.windows(2).find(|w| w[0].region_id == w[1].region_id) {
            return Err(Error::GeoJson(format!("duplicate region_id {:?}", w[0].region_id)));
        }
        for r in &mut regions {
            r.bbox = Some(r.compute_bbox());
        }
        Ok(RegionSet { regions })
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn get(&self, region_id: &str) -> Option<&Region> {
        self.regions
            .binary_search_by(|r| r.region_id.as_str().cmp(region_id))
            .ok()
            .map(|i| &self.regions[i])
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

/// Region containing the point. Overlaps resolve to the lexicographically
/// lowest id.
pub fn assign_region(lat: f64, lon: f64, regions: &RegionSet) -> Option<&str> {
    regions
        .regions
        .iter()
        .find(|r| r.contains(lat, lon))
        .map(|r| r.region_id.as_str())
}
