use std::collections::HashMap;

use log::warn;
use serde::{Deserialize, Serialize};

use super::geojson::NetworkLine;
use super::projection::{project, unproject, LatLon, Xy};
use super::region::{assign_region, RegionSet};
use crate::error::{Error, Result};

pub const DEFAULT_CELL_LENGTH_M: f64 = 10.0;
pub const DEFAULT_SNAP_RADIUS_M: f64 = 25.0;

/// The streets of one region.
#[derive(Clone, Debug, PartialEq)]
pub struct StreetNetwork {
    pub region_id: String,
    pub segments: Vec<Vec<LatLon>>,
}

impl StreetNetwork {
    /// Groups network lines by region. A line without an explicit
    /// `region_id` goes to the region containing its middle vertex; lines
    /// that match no region are dropped. Every region gets a network, possibly
    /// empty, in region-id order.
    pub fn partition(lines: &[NetworkLine], regions: &RegionSet) -> Vec<StreetNetwork> {
        let mut out: Vec<StreetNetwork> = regions
            .regions()
            .iter()
            .map(|r| StreetNetwork {
                region_id: r.region_id.clone(),
                segments: Vec::new(),
            })
            .collect();
        let mut dropped = 0usize;
        for l in lines {
            let id = match &l.region_id {
                Some(id) => regions.get(id).map(|r| r.region_id.as_str()),
                None => {
                    let mid = l.vertices[l.vertices.len() / 2];
                    assign_region(mid.lat, mid.lon, regions)
                }
            };
            match id.and_then(|id| out.iter().position(|n| n.region_id == id)) {
                Some(i) => out[i].segments.push(l.vertices.clone()),
                None => dropped += 1,
            }
        }
        if dropped > 0 {
            warn!("{dropped} street lines outside every region were dropped");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub cell_id: u32,
    pub segment_index: u32,
    /// Arc-length offset of the cell start along its segment.
    pub arc_start_m: f64,
    pub length_m: f64,
    pub centroid_xy: Xy,
    pub centroid: LatLon,
}

/// A region's street network cut into fixed-length cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreetGrid {
    pub region_id: String,
    pub cell_length_m: f64,
    pub origin: LatLon,
    pub segments: Vec<Vec<LatLon>>,
    pub cells: Vec<Cell>,
}

impl StreetGrid {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn centroids(&self) -> Vec<Xy> {
        self.cells.iter().map(|c| c.centroid_xy).collect()
    }

    pub fn project(&self, lat: f64, lon: f64) -> Xy {
        project(lat, lon, self.origin)
    }

    pub fn segment_xy(&self, segment_index: usize) -> Vec<Xy> {
        self.segments[segment_index]
            .iter()
            .map(|p| project(p.lat, p.lon, self.origin))
            .collect()
    }

    /// Contiguous cell-id ranges per segment, in segment order. Segments that
    /// produced no cells are absent.
    pub fn segment_ranges(&self) -> Vec<(u32, std::ops::Range<usize>)> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.cells.len() {
            if i == self.cells.len() || self.cells[i].segment_index != self.cells[start].segment_index {
                out.push((self.cells[start].segment_index, start..i));
                start = i;
            }
        }
        out
    }

    /// Sub-polyline of `segment_index` between two arc-length offsets.
    pub fn sub_polyline(&self, segment_index: usize, from_m: f64, to_m: f64) -> Vec<LatLon> {
        let xy = self.segment_xy(segment_index);
        let mut pts = vec![point_at(&xy, from_m)];
        let mut acc = 0.0;
        for w in xy.windows(2) {
            acc += w[0].dist(&w[1]);
            if acc > from_m && acc < to_m {
                pts.push(w[1]);
            }
        }
        pts.push(point_at(&xy, to_m));
        pts.into_iter().map(|p| unproject(p, self.origin)).collect()
    }

    /// Largest distance between two cell centroids.
    pub fn diameter(&self) -> f64 {
        let hull = convex_hull(&self.centroids());
        let mut best: f64 = 0.0;
        for (i, a) in hull.iter().enumerate() {
            for b in &hull[i + 1..] {
                best = best.max(a.dist2(b));
            }
        }
        best.sqrt()
    }
}

pub(crate) fn point_at(xy: &[Xy], s: f64) -> Xy {
    let mut acc = 0.0;
    for w in xy.windows(2) {
        let len = w[0].dist(&w[1]);
        if len > 0.0 && acc + len >= s {
            let t = ((s - acc) / len).clamp(0.0, 1.0);
            return Xy::new(w[0].x + t * (w[1].x - w[0].x), w[0].y + t * (w[1].y - w[0].y));
        }
        acc += len;
    }
    *xy.last().expect("polyline has vertices")
}

fn convex_hull(points: &[Xy]) -> Vec<Xy> {
    let mut pts: Vec<Xy> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &Xy, a: &Xy, b: &Xy| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut hull: Vec<Xy> = Vec::with_capacity(2 * pts.len());
    for p in pts.iter().chain(pts.iter().rev().skip(1)) {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    // collinear input collapses to its two extremes
    if hull.len() < 2 {
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

/// Cuts every polyline into cells of at most `cell_length_m` by arc length.
/// Cell ids run segment by segment, then along each segment.
pub fn build_grid(network: &StreetNetwork, origin: LatLon, cell_length_m: f64) -> Result<StreetGrid> {
    if !(cell_length_m > 0.0 && cell_length_m.is_finite()) {
        return Err(Error::Invalid(format!("cell length must be positive, got {cell_length_m}")));
    }
    let mut cells = Vec::new();
    for (si, seg) in network.segments.iter().enumerate() {
        let xy: Vec<Xy> = seg.iter().map(|p| project(p.lat, p.lon, origin)).collect();
        let total: f64 = xy.windows(2).map(|w| w[0].dist(&w[1])).sum();
        if total <= 0.0 {
            warn!("region {}: segment {si} has zero length, skipped", network.region_id);
            continue;
        }
        let n = ((total / cell_length_m) - 1e-9).ceil().max(1.0) as usize;
        for k in 0..n {
            let start = k as f64 * cell_length_m;
            let end = if k + 1 == n { total } else { start + cell_length_m };
            let c = point_at(&xy, (start + end) / 2.0);
            cells.push(Cell {
                cell_id: cells.len() as u32,
                segment_index: si as u32,
                arc_start_m: start,
                length_m: end - start,
                centroid_xy: c,
                centroid: unproject(c, origin),
            });
        }
    }
    Ok(StreetGrid {
        region_id: network.region_id.clone(),
        cell_length_m,
        origin,
        segments: network.segments.clone(),
        cells,
    })
}

/// Nearest cell centroid within `radius_m` (inclusive); ties go to the lower id.
pub fn snap(point: Xy, grid: &StreetGrid, radius_m: f64) -> Option<u32> {
    nearest(point, grid.cells.iter(), radius_m * radius_m)
}

fn nearest<'a>(point: Xy, cells: impl Iterator<Item = &'a Cell>, r2: f64) -> Option<u32> {
    let mut best: Option<(f64, u32)> = None;
    for c in cells {
        let d2 = point.dist2(&c.centroid_xy);
        if d2 > r2 {
            continue;
        }
        best = match best {
            Some((bd, bid)) if bd < d2 || (bd == d2 && bid < c.cell_id) => Some((bd, bid)),
            _ => Some((d2, c.cell_id)),
        };
    }
    best.map(|(_, id)| id)
}

/// Bucketed lookup giving the same answers as [`snap`] for a fixed radius.
pub struct SnapIndex {
    radius_m: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
}

impl SnapIndex {
    pub fn new(grid: &StreetGrid, radius_m: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        let size = radius_m.max(1e-6);
        for c in &grid.cells {
            let key = ((c.centroid_xy.x / size).floor() as i64, (c.centroid_xy.y / size).floor() as i64);
            buckets.entry(key).or_default().push(c.cell_id);
        }
        SnapIndex { radius_m: size, buckets }
    }

    pub fn snap(&self, grid: &StreetGrid, point: Xy) -> Option<u32> {
        let bx = (point.x / self.radius_m).floor() as i64;
        let by = (point.y / self.radius_m).floor() as i64;
        let ids = (bx - 1..=bx + 1)
            .flat_map(|x| (by - 1..=by + 1).map(move |y| (x, y)))
            .filter_map(|k| self.buckets.get(&k))
            .flatten()
            .map(|&id| &grid.cells[id as usize]);
        nearest(point, ids, self.radius_m * self.radius_m)
    }
}

/// Share of cells with at least one sample.
pub fn coverage_fraction(grid: &StreetGrid, counts_per_cell: &[u64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if counts_per_cell.len() != grid.len() {
        return Err(Error::LengthMismatch {
            left: grid.len(),
            right: counts_per_cell.len(),
        });
    }
    let covered = counts_per_cell.iter().filter(|&&c| c >= 1).count();
    Ok(covered as f64 / grid.len() as f64)
}
