//! Street networks, regions, the local metric frame, street cells, snapping
//! and coverage holes.

pub mod geojson;
pub mod grid;
pub mod holes;
pub mod projection;
pub mod region;

pub use geojson::{load_network, load_regions, NetworkLine};
pub use grid::{
    build_grid, coverage_fraction, snap, Cell, SnapIndex, StreetGrid, StreetNetwork, DEFAULT_CELL_LENGTH_M,
    DEFAULT_SNAP_RADIUS_M,
};
pub use holes::{find_holes, holes_geojson, CoverageHole, DEFAULT_MIN_RUN_CELLS};
pub use projection::{project, unproject, LatLon, Xy, EARTH_RADIUS_M};
pub use region::{assign_region, Region, RegionSet};
