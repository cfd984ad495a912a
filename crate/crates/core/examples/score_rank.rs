//! Scores a synthetic city and ranks its regions under several weight
//! vectors, one ranking per project as in a weight-customized table.
//!
//!     cargo run --example score_rank [jsd|emd|sliced]

use svqoi::ingest::IndexConfig;
use svqoi::qoi::report::to_table;
use svqoi::qoi::{score_pipeline, ScoreParams, Weights};
use svqoi::synth::{generate, City, Profile};

fn main() -> svqoi::Result<()> {
    let metric = std::env::args().nth(1).unwrap_or_else(|| "jsd".into()).parse()?;

    let city = City::new(&[("10021", 2), ("10037", 2), ("10128", 2), ("10280", 2)]);
    let config = IndexConfig::default();
    let grids = city.grids(config.cell_length_m)?;
    let profiles = [
        Profile::THOROUGH,
        Profile::SPARSE,
        Profile { coverage: 1.0, visits_per_cell: 1, ..Profile::THOROUGH },
        Profile { coverage: 0.6, revisit_s: 120, brightness: 0.1, ..Profile::THOROUGH },
    ];
    let index = generate(&grids, &profiles, &config, 18_600, 5, 2).index(&city, &config)?;

    let mut params = ScoreParams::default();
    params.quality.metric = metric;
    let doc = score_pipeline(&index, &params)?;
    print!("{}", to_table(&doc));

    // reweighting reuses the normalized attributes; no rescoring needed
    for (project, w) in [("mapping", (5, 1, 1)), ("traffic", (1, 5, 2)), ("object survey", (1, 1, 5))] {
        let ranked = doc.reweighted(Weights::new(w.0, w.1, w.2)?);
        let order: Vec<String> = ranked
            .segments
            .iter()
            .map(|s| format!("{}#{} Q={:.3}", s.region_id, s.rank, s.q))
            .collect();
        println!("{project:>14} {}: {}", ranked.weights, order.join("  "));
    }
    println!("\n{}", doc.to_json()?);
    Ok(())
}
