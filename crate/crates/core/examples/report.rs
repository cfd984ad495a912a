//! Renders a scores document as CSV and an SVG bar chart.
//!
//!     cargo run --example report [OUT_DIR]

use std::path::PathBuf;

use svqoi::ingest::IndexConfig;
use svqoi::qoi::report::{to_csv, to_svg};
use svqoi::qoi::{score_pipeline, ScoreParams};
use svqoi::synth::{generate, City, Profile};

fn main() -> svqoi::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("svqoi-report"));
    std::fs::create_dir_all(&out).map_err(|e| svqoi::Error::Invalid(e.to_string()))?;

    let city = City::new(&[("10021", 2), ("10037", 2), ("10128", 2)]);
    let config = IndexConfig::default();
    let grids = city.grids(config.cell_length_m)?;
    let profiles = [Profile::THOROUGH, Profile::SPARSE, Profile { coverage: 0.8, ..Profile::SPARSE }];
    let index = generate(&grids, &profiles, &config, 18_600, 3, 5).index(&city, &config)?;
    let doc = score_pipeline(&index, &ScoreParams::default())?;

    let csv = to_csv(&doc)?;
    print!("{csv}");
    let svg_path = out.join("scores.svg");
    std::fs::write(&svg_path, to_svg(&doc)).map_err(|e| svqoi::Error::Invalid(e.to_string()))?;
    println!("chart written to {}", svg_path.display());
    Ok(())
}
