//! Parsing image metadata and detections, and building the region/cell/day
//! index that every scoring path reads from.

pub mod index;
pub mod parse;
pub mod store;

use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;

pub use index::{
    build_grids, build_index, Index, IndexConfig, IngestStats, RegionIndex, StoredRecord, DEFAULT_DAY_OFFSET_S,
    SECONDS_PER_DAY,
};
pub use parse::{
    detections_by_image, parse_detections, parse_records, DetectedObject, DetectionSet, Format, ImageRecord,
    LineIssue, ParseMode, Parsed,
};
pub use store::{open_index, persist_index, region_file_name, INDEX_VERSION, MANIFEST_FILE};

use crate::error::{Error, Result};
use crate::geo::{load_network, load_regions, StreetNetwork};

/// Input files for [`ingest_files`].
#[derive(Clone, Copy, Debug)]
pub struct IngestPaths<'a> {
    pub records: &'a Path,
    pub detections: Option<&'a Path>,
    pub network: &'a Path,
    pub regions: &'a Path,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

/// Read all inputs from disk and build the index. Lines skipped in lenient
/// mode are counted as `invalid`.
pub fn ingest_files(paths: IngestPaths<'_>, config: &IndexConfig, mode: ParseMode) -> Result<Index> {
    let regions_text = fs::read_to_string(paths.regions).map_err(|e| Error::io(paths.regions, e))?;
    let regions = load_regions(&regions_text)?;
    let network_text = fs::read_to_string(paths.network).map_err(|e| Error::io(paths.network, e))?;
    let lines = load_network(&network_text)?;
    let networks = StreetNetwork::partition(&lines, &regions);
    let grids = build_grids(&networks, &regions, config.cell_length_m)?;

    let parsed = parse_records(open(paths.records)?, Format::from_path(paths.records), mode)?;
    let detections = match paths.detections {
        Some(p) => detections_by_image(parse_detections(open(p)?, mode)?.items),
        None => Default::default(),
    };
    let mut index = build_index(&parsed.items, &detections, &grids, &regions, config)?;
    index.stats.invalid = parsed.skipped.len() as u64;
    Ok(index)
}
