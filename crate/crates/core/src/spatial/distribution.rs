use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::StreetGrid;

/// Normalized mass over a region's cells. An all-zero histogram is kept as
/// `empty` rather than normalized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub region_id: String,
    pub mass: Vec<f64>,
    pub empty: bool,
}

impl Distribution {
    pub fn from_counts(region_id: impl Into<String>, counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let mass = if total == 0 {
            vec![0.0; counts.len()]
        } else {
            counts.iter().map(|&c| c as f64 / total as f64).collect()
        };
        Distribution {
            region_id: region_id.into(),
            mass,
            empty: total == 0,
        }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }
}

/// Per-cell sample counts for the records of one region slice, normalized.
pub fn observed_histogram<I>(cell_ids: I, grid: &StreetGrid) -> Distribution
where
    I: IntoIterator<Item = u32>,
{
    let mut counts = vec![0u64; grid.len()];
    for c in cell_ids {
        counts[c as usize] += 1;
    }
    Distribution::from_counts(grid.region_id.clone(), &counts)
}

/// Uniform mass on every cell of the grid.
pub fn reference_uniform(grid: &StreetGrid) -> Result<Distribution> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(Distribution {
        region_id: grid.region_id.clone(),
        mass: vec![1.0 / grid.len() as f64; grid.len()],
        empty: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_counts() {
        assert_eq!(Distribution::from_counts("r", &[2, 2]).mass, vec![0.5, 0.5]);
        assert_eq!(Distribution::from_counts("r", &[1, 3]).mass, vec![0.25, 0.75]);
        let e = Distribution::from_counts("r", &[0, 0]);
        assert!(e.is_empty());
        assert_eq!(e.mass, vec![0.0, 0.0]);
    }
}
