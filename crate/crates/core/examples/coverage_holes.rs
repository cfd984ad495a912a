//! Finds runs of unvisited street cells and prints them as GeoJSON.
//!
//!     cargo run --example coverage_holes [MIN_RUN]

use svqoi::geo::{coverage_fraction, find_holes, holes_geojson};
use svqoi::ingest::IndexConfig;
use svqoi::synth::{generate, City, Profile};

fn main() -> svqoi::Result<()> {
    let min_run: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let city = City::new(&[("A", 3)]);
    let config = IndexConfig::default();
    let grids = city.grids(config.cell_length_m)?;
    let profile = Profile { coverage: 0.7, ..Profile::THOROUGH };
    let index = generate(&grids, &[profile], &config, 18_600, 2, 4).index(&city, &config)?;

    let region = index.region("A").expect("region A");
    let counts = region.cell_counts(|_| true);
    let holes = find_holes(&region.grid, &counts, min_run);
    println!(
        "coverage {:.1}% of {} cells, {} holes of at least {min_run} cells",
        100.0 * coverage_fraction(&region.grid, &counts)?,
        region.grid.len(),
        holes.len()
    );
    for h in &holes {
        println!(
            "  segment {} cells {}..={} ({:.0} m) around {:.5},{:.5}",
            h.segment_index, h.cell_id_start, h.cell_id_end, h.length_m, h.centroid.lat, h.centroid.lon
        );
    }
    println!("{:#}", holes_geojson(&region.grid, &holes));
    Ok(())
}
