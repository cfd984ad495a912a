//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use svqoi::geo::Xy;

/// Random histogram of `n` cells summing to 1, with roughly `zero_p` of the
/// cells empty (never all of them).
pub fn histogram<R: Rng>(rng: &mut R, n: usize, zero_p: f64) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(zero_p) { 0.0 } else { rng.gen_range(0.01..1.0) })
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            return raw.iter().map(|v| v / total).collect();
        }
    }
}

/// 1D transport cost between histograms on sorted positions: the integral
/// of the absolute CDF difference.
pub fn w1_collinear(p: &[f64], q: &[f64], xs: &[f64]) -> f64 {
    let mut cdf = 0.0;
    let mut total = 0.0;
    for i in 0..xs.len() - 1 {
        cdf += p[i] - q[i];
        total += cdf.abs() * (xs[i + 1] - xs[i]);
    }
    total
}

/// Minimizes `c.x` subject to `a x = b`, `x >= 0` with `b >= 0`, using a
/// two-phase dense tableau simplex and Bland's rule.
pub fn lp_min(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> f64 {
    const EPS: f64 = 1e-12;
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    let rhs = n + m;
    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = vec![0.0; width];
            row[..n].copy_from_slice(&a[i]);
            row[n + i] = 1.0;
            row[rhs] = b[i];
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, col: usize) {
        let pv = t[r][col];
        for v in t[r].iter_mut() {
            *v /= pv;
        }
        let prow = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && row[col] != 0.0 {
                let f = row[col];
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                }
            }
        }
        basis[r] = col;
    }

    let solve = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, cost: &[f64], cols: usize| loop {
        let entering = (0..cols).find(|&j| {
            let reduced = cost[j] - (0..m).map(|i| cost[basis[i]] * t[i][j]).sum::<f64>();
            reduced < -EPS && !basis.contains(&j)
        });
        let Some(j) = entering else { return };
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..m {
            if t[i][j] > EPS {
                let ratio = t[i][rhs] / t[i][j];
                let better = match best {
                    None => true,
                    Some((r, _, bi)) => ratio < r - EPS || (ratio <= r + EPS && basis[i] < bi),
                };
                if better {
                    best = Some((ratio, i, basis[i]));
                }
            }
        }
        let (_, r, _) = best.expect("bounded problem");
        pivot(t, basis, r, j);
    };

    let mut phase1 = vec![0.0; n + m];
    for v in &mut phase1[n..] {
        *v = 1.0;
    }
    solve(&mut t, &mut basis, &phase1, n + m);
    let infeasibility: f64 = (0..m).filter(|&i| basis[i] >= n).map(|i| t[i][rhs]).sum();
    assert!(infeasibility < 1e-9, "infeasible LP ({infeasibility})");
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[i][j].abs() > 1e-9) {
                pivot(&mut t, &mut basis, i, j);
            }
        }
    }
    let mut phase2 = c.to_vec();
    phase2.extend(std::iter::repeat_n(0.0, m));
    solve(&mut t, &mut basis, &phase2, n);
    (0..m).map(|i| phase2[basis[i]] * t[i][rhs]).sum()
}

/// Transport cost as a dense LP over all `n * n` flows. The last column
/// constraint is implied by balance and dropped.
pub fn emd_by_lp(p: &[f64], q: &[f64], pts: &[Xy]) -> f64 {
    let n = p.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        let mut row = vec![0.0; n * n];
        for j in 0..n {
            row[i * n + j] = 1.0;
        }
        a.push(row);
        b.push(p[i]);
    }
    for j in 0..n - 1 {
        let mut row = vec![0.0; n * n];
        for i in 0..n {
            row[i * n + j] = 1.0;
        }
        a.push(row);
        b.push(q[j]);
    }
    let c: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            ((pts[i].x - pts[j].x).powi(2) + (pts[i].y - pts[j].y).powi(2)).sqrt()
        })
        .collect();
    lp_min(&a, &b, &c)
}

/// Temporal quality written out point by point: for each cell, distinct
/// visits, their gaps, the most common 60 s-wide bin of gaps (bins centred
/// on whole minutes, ties to the shorter bin), the median gap in that bin,
/// and the cell's visit count over it.
pub fn temporal_reference(cells: &BTreeMap<u32, Vec<i64>>, bin_width: i64) -> f64 {
    let mut total = 0.0;
    for visits in cells.values() {
        let distinct: BTreeSet<i64> = visits.iter().copied().collect();
        if distinct.len() < 2 {
            continue;
        }
        let times: Vec<i64> = distinct.into_iter().collect();
        let mut gaps = Vec::new();
        for k in 1..times.len() {
            gaps.push(times[k] - times[k - 1]);
        }
        let mut bins: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
        for &g in &gaps {
            bins.entry((g + bin_width / 2).div_euclid(bin_width)).or_default().push(g);
        }
        let mut modal: &Vec<i64> = &Vec::new();
        for members in bins.values() {
            if members.len() > modal.len() {
                modal = members;
            }
        }
        let mut sorted = modal.clone();
        sorted.sort();
        let k = sorted.len();
        let u = if k % 2 == 1 {
            sorted[k / 2] as f64
        } else {
            (sorted[k / 2 - 1] as f64 + sorted[k / 2] as f64) / 2.0
        };
        total += times.len() as f64 / u;
    }
    total
}

/// Peak resident set size of this process in bytes, when available.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}
