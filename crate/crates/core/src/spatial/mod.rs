//! Spatial quality: distance between the uniform reference distribution over
//! a region's street cells and the observed distribution of samples.

pub mod distribution;
pub mod emd;
pub mod jsd;
pub mod sliced;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use distribution::{observed_histogram, reference_uniform, Distribution};
pub use emd::{emd_exact, DEFAULT_EXACT_LIMIT};
pub use jsd::jsd;
pub use sliced::{sliced_wasserstein, DEFAULT_PROJECTIONS, DEFAULT_SEED};

use crate::error::{Error, Result};
use crate::geo::StreetGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Jsd,
    WassersteinExact,
    WassersteinSliced,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Jsd => "jsd",
            Metric::WassersteinExact => "wasserstein_exact",
            Metric::WassersteinSliced => "wasserstein_sliced",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsd" => Ok(Metric::Jsd),
            "emd" | "exact" | "wasserstein_exact" => Ok(Metric::WassersteinExact),
            "sliced" | "wasserstein_sliced" => Ok(Metric::WassersteinSliced),
            other => Err(Error::Invalid(format!("unknown metric {other:?} (expected jsd|emd|sliced)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialOptions {
    pub exact_limit: usize,
    pub projections: usize,
    pub seed: u64,
}

impl Default for SpatialOptions {
    fn default() -> Self {
        SpatialOptions {
            exact_limit: DEFAULT_EXACT_LIMIT,
            projections: DEFAULT_PROJECTIONS,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialResult {
    pub region_id: String,
    pub metric: Metric,
    /// Meters for the Wasserstein variants, bits for JSD.
    pub distance: f64,
}

/// Distance between `reference` and `observed` under `metric`. An empty
/// observation scores the metric's maximum: 1 bit for JSD, the grid
/// diameter for Wasserstein.
pub fn spatial_distance(
    reference: &Distribution,
    observed: &Distribution,
    metric: Metric,
    grid: &StreetGrid,
    opts: &SpatialOptions,
) -> Result<SpatialResult> {
    if metric == Metric::WassersteinExact && grid.len() > opts.exact_limit {
        return Err(Error::SizeLimit {
            cells: grid.len(),
            limit: opts.exact_limit,
        });
    }
    let distance = if observed.is_empty() {
        match metric {
            Metric::Jsd => 1.0,
            _ => grid.diameter(),
        }
    } else {
        match metric {
            Metric::Jsd => jsd(&reference.mass, &observed.mass)?,
            Metric::WassersteinExact => {
                emd_exact(&reference.mass, &observed.mass, &grid.centroids(), opts.exact_limit)?
            }
            Metric::WassersteinSliced => sliced_wasserstein(
                &reference.mass,
                &observed.mass,
                &grid.centroids(),
                opts.projections,
                opts.seed,
            )?,
        }
    };
    Ok(SpatialResult {
        region_id: grid.region_id.clone(),
        metric,
        distance,
    })
}
