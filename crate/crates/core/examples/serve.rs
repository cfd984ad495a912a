//! Serves the HTTP API over a synthetic city.
//!
//!     cargo run --example serve [PORT]
//!     curl 'localhost:8080/api/scores?weights=1,2,3&metric=sliced'

use std::sync::Arc;

use svqoi::ingest::IndexConfig;
use svqoi::synth::{generate, City, Profile};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let port: u16 = std::env::args().nth(1).map(|p| p.parse()).transpose()?.unwrap_or(8080);
    let city = City::new(&[("A", 3), ("B", 3)]);
    let config = IndexConfig::default();
    let grids = city.grids(config.cell_length_m)?;
    let index = generate(&grids, &[Profile::THOROUGH, Profile::SPARSE], &config, 18_600, 7, 6).index(&city, &config)?;
    println!("http://localhost:{port}/api/regions");
    svqoi::service::serve(Arc::new(index), None, port).await?;
    Ok(())
}
