//! Compares the three spatial measures on a region's uniform reference and
//! increasingly lopsided observations.
//!
//!     cargo run --example transport_distances

use svqoi::spatial::{emd_exact, jsd, reference_uniform, sliced_wasserstein, Distribution, DEFAULT_EXACT_LIMIT};
use svqoi::synth::City;

fn main() -> svqoi::Result<()> {
    let city = City::new(&[("A", 2)]);
    let grid = &city.grids(10.0)?[0];
    let centroids = grid.centroids();
    let reference = reference_uniform(grid)?;
    println!("{} cells, diameter {:.1} m", grid.len(), grid.diameter());
    println!("{:>9} {:>8} {:>10} {:>10}", "covered", "jsd", "exact m", "sliced m");
    for covered in [grid.len(), 3 * grid.len() / 4, grid.len() / 2, grid.len() / 4, 1] {
        let counts: Vec<u64> = (0..grid.len()).map(|i| u64::from(i < covered)).collect();
        let observed = Distribution::from_counts("A", &counts);
        let (p, q) = (&reference.mass, &observed.mass);
        println!(
            "{:>8}% {:>8.4} {:>10.2} {:>10.2}",
            100 * covered / grid.len(),
            jsd(p, q)?,
            emd_exact(p, q, &centroids, DEFAULT_EXACT_LIMIT)?,
            sliced_wasserstein(p, q, &centroids, 256, 0)?
        );
    }
    Ok(())
}
