use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::grid::StreetGrid;
use super::projection::{unproject, LatLon};

pub const DEFAULT_MIN_RUN_CELLS: usize = 2;

/// A maximal run of unsampled cells along one segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageHole {
    pub region_id: String,
    pub segment_index: u32,
    pub cell_id_start: u32,
    pub cell_id_end: u32,
    pub length_m: f64,
    pub centroid: LatLon,
}

impl CoverageHole {
    pub fn cells(&self) -> u32 {
        self.cell_id_end - self.cell_id_start + 1
    }
}

/// Maximal zero-count runs of at least `min_run_cells` cells, longest first
/// (ties by starting cell id).
pub fn find_holes(grid: &StreetGrid, counts_per_cell: &[u64], min_run_cells: usize) -> Vec<CoverageHole> {
    let min_run = min_run_cells.max(1);
    let mut holes = Vec::new();
    for (segment_index, range) in grid.segment_ranges() {
        let mut i = range.start;
        while i < range.end {
            if counts_per_cell[i] != 0 {
                i += 1;
                continue;
            }
            let start = i;
            while i < range.end && counts_per_cell[i] == 0 {
                i += 1;
            }
            if i - start >= min_run {
                holes.push(make_hole(grid, segment_index, start, i - 1));
            }
        }
    }
    holes.sort_by(|a, b| {
        b.length_m
            .total_cmp(&a.length_m)
            .then(a.cell_id_start.cmp(&b.cell_id_start))
    });
    holes
}

fn make_hole(grid: &StreetGrid, segment_index: u32, first: usize, last: usize) -> CoverageHole {
    let from = grid.cells[first].arc_start_m;
    let to = grid.cells[last].arc_start_m + grid.cells[last].length_m;
    let xy = grid.segment_xy(segment_index as usize);
    let mid = super::grid::point_at(&xy, (from + to) / 2.0);
    CoverageHole {
        region_id: grid.region_id.clone(),
        segment_index,
        cell_id_start: first as u32,
        cell_id_end: last as u32,
        length_m: grid.cells[first..=last].iter().map(|c| c.length_m).sum(),
        centroid: unproject(mid, grid.origin),
    }
}

/// GeoJSON FeatureCollection of holes as LineStrings.
pub fn holes_geojson(grid: &StreetGrid, holes: &[CoverageHole]) -> Value {
    let features: Vec<Value> = holes
        .iter()
        .map(|h| {
            let from = grid.cells[h.cell_id_start as usize].arc_start_m;
            let last = &grid.cells[h.cell_id_end as usize];
            let line = grid.sub_polyline(h.segment_index as usize, from, last.arc_start_m + last.length_m);
            json!({
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": line.iter().map(|p| vec![p.lon, p.lat]).collect::<Vec<_>>(),
                },
                "properties": {
                    "region_id": h.region_id,
                    "length_m": h.length_m,
                    "cells": h.cells(),
                    "cell_id_start": h.cell_id_start,
                    "cell_id_end": h.cell_id_end,
                },
            })
        })
        .collect();
    json!({"type": "FeatureCollection", "features": features})
}
