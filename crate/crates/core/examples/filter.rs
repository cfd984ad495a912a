//! Filters a synthetic week by weekday, hour and region-day quality.
//!
//!     cargo run --example filter

use svqoi::ingest::IndexConfig;
use svqoi::qoi::{filter, FilterSpec, Weekday};
use svqoi::synth::{generate, City, Profile};

fn main() -> svqoi::Result<()> {
    let city = City::new(&[("A", 2), ("B", 2), ("C", 2)]);
    let config = IndexConfig::default();
    let grids = city.grids(config.cell_length_m)?;
    let profiles = [Profile::THOROUGH, Profile::SPARSE, Profile { coverage: 0.75, ..Profile::THOROUGH }];
    let index = generate(&grids, &profiles, &config, 18_600, 7, 3).index(&city, &config)?;

    let specs = [
        ("everything", FilterSpec::default()),
        (
            "fridays",
            FilterSpec {
                days_of_week: Some(vec![Weekday::Fri]),
                ..FilterSpec::default()
            },
        ),
        (
            "mornings",
            FilterSpec {
                hours_of_day: Some((8..12).collect()),
                ..FilterSpec::default()
            },
        ),
        (
            "good coverage",
            FilterSpec {
                min_s: Some(0.9),
                ..FilterSpec::default()
            },
        ),
        (
            "frequent revisits",
            FilterSpec {
                min_t: Some(0.5),
                ..FilterSpec::default()
            },
        ),
    ];
    for (name, spec) in specs {
        let subset = filter(&index, &spec)?;
        let s = subset.stats();
        let regions: std::collections::BTreeSet<&str> = subset.iter().map(|(r, _)| r.region_id()).collect();
        println!(
            "{name:>18}: kept={} input={} reduction={:.3}%  regions {:?}",
            s.kept_count, s.input_count, s.reduction_pct, regions
        );
    }
    Ok(())
}
