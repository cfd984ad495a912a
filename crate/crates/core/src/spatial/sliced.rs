use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geo::Xy;

pub const DEFAULT_PROJECTIONS: usize = 128;
pub const DEFAULT_SEED: u64 = 0;

/// Mean 1D W1 over `k` seeded random directions, rescaled by pi/2 so that
/// a pure translation has the exact planar distance as its expectation.
pub fn sliced_wasserstein(p: &[f64], q: &[f64], centroids: &[Xy], k: usize, seed: u64) -> Result<f64> {
    if p.len() != q.len() || p.len() != centroids.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len().min(centroids.len()),
        });
    }
    if k == 0 {
        return Err(Error::Invalid("at least one projection direction required".into()));
    }
    let support: Vec<(f64, Xy)> = p
        .iter()
        .zip(q)
        .zip(centroids)
        .filter(|((a, b), _)| **a != 0.0 || **b != 0.0)
        .map(|((a, b), c)| (a - b, *c))
        .collect();
    if support.iter().all(|(d, _)| *d == 0.0) {
        return Ok(0.0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect();
    let per_direction: Vec<f64> = angles
        .par_iter()
        .map(|&theta| projected_w1(&support, theta.cos(), theta.sin()))
        .collect();
    let sum: f64 = per_direction.iter().sum();
    Ok(sum / k as f64 * std::f64::consts::FRAC_PI_2)
}

/// W1 between the two projected measures, given per-point mass differences.
fn projected_w1(support: &[(f64, Xy)], ux: f64, uy: f64) -> f64 {
    let mut proj: Vec<(f64, f64)> = support
        .iter()
        .map(|(d, c)| (c.x * ux + c.y * uy, *d))
        .collect();
    proj.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cdf = 0.0;
    let mut w = 0.0;
    for pair in proj.windows(2) {
        cdf += pair[0].1;
        w += cdf.abs() * (pair[1].0 - pair[0].0);
    }
    w
}
