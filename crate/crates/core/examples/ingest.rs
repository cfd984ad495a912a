//! Writes a synthetic city to disk, ingests it into an index directory and
//! reopens it.
//!
//!     cargo run --example ingest [OUT_DIR]

use std::path::PathBuf;

use svqoi::ingest::{ingest_files, open_index, persist_index, IndexConfig, IngestPaths, ParseMode};
use svqoi::synth::{generate, City, Profile};

fn main() -> svqoi::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("svqoi-ingest"));
    std::fs::create_dir_all(&out).map_err(|e| svqoi::Error::Invalid(e.to_string()))?;

    let city = City::new(&[("10021", 3), ("10037", 3), ("10128", 2)]);
    let config = IndexConfig::default();
    let grids = city.grids(config.cell_length_m)?;
    let profiles = [
        Profile::THOROUGH,
        Profile::SPARSE,
        Profile { coverage: 0.8, visits_per_cell: 2, revisit_s: 900, brightness: 0.4, confidence: Some(0.6) },
    ];
    let traffic = generate(&grids, &profiles, &config, 18_600, 7, 1);
    let (regions, network) = city.write_geojson(&out)?;
    let (records, detections) = traffic.write_jsonl(&out)?;

    let paths = IngestPaths {
        records: &records,
        detections: Some(&detections),
        network: &network,
        regions: &regions,
    };
    let index = ingest_files(paths, &config, ParseMode::Strict)?;
    let index_dir = out.join("index");
    persist_index(&index, &index_dir)?;

    let reopened = open_index(&index_dir)?;
    assert_eq!(reopened, index);
    println!("index written to {}", index_dir.display());
    println!("{:?}", reopened.stats);
    for r in &reopened.regions {
        println!(
            "{:>6}: {:4} cells, {:6} records, days {:?}",
            r.region_id(),
            r.grid.len(),
            r.records.len(),
            r.day_range()
        );
    }
    Ok(())
}
