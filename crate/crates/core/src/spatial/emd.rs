//! Exact earth mover's distance between two histograms on a shared set of
//! planar cell centroids, solved as an uncapacitated transportation problem
//! with the primal network simplex method.
//!
//! Mass common to both histograms at a cell stays in place (zero cost under
//! a metric ground distance), so only the surplus cells of `p` and the
//! deficit cells of `q` enter the bipartite network.

use crate::error::{Error, Result};
use crate::geo::Xy;

pub const DEFAULT_EXACT_LIMIT: usize = 1024;
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Optimal transport cost between `p` and `q` with Euclidean ground cost
/// between `centroids`.
pub fn emd_exact(p: &[f64], q: &[f64], centroids: &[Xy], limit: usize) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if p.len() != centroids.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: centroids.len(),
        });
    }
    if p.len() > limit {
        return Err(Error::SizeLimit {
            cells: p.len(),
            limit,
        });
    }
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    if (sp - sq).abs() > MASS_TOLERANCE {
        return Err(Error::Unbalanced(sp, sq));
    }

    let mut sources = Vec::new();
    let mut sinks = Vec::new();
    for (i, (&a, &b)) in p.iter().zip(q).enumerate() {
        let common = a.min(b);
        if a - common > 0.0 {
            sources.push((i, a - common));
        } else if b - common > 0.0 {
            sinks.push((i, b - common));
        }
    }
    if sources.is_empty() || sinks.is_empty() {
        return Ok(0.0);
    }

    let mut supply: Vec<f64> = sources.iter().map(|s| s.1).collect();
    supply.extend(sinks.iter().map(|s| -s.1));
    let mut arcs = Vec::with_capacity(sources.len() * sinks.len());
    for (a, &(i, _)) in sources.iter().enumerate() {
        for (b, &(j, _)) in sinks.iter().enumerate() {
            arcs.push((a, sources.len() + b, centroids[i].dist(&centroids[j])));
        }
    }
    let mut ns = NetworkSimplex::new(&supply, &arcs);
    ns.run()?;
    Ok(ns.total_cost())
}

const STATE_TREE: i8 = 0;
const STATE_LOWER: i8 = 1;
const DIR_UP: i8 = 1;
const DIR_DOWN: i8 = -1;
const NONE: usize = usize::MAX;

/// Spanning-tree network simplex on an uncapacitated min-cost flow problem,
/// using thread/successor-count tree storage and block-search pricing.
struct NetworkSimplex {
    node_num: usize,
    arc_num: usize,

    source: Vec<usize>,
    target: Vec<usize>,
    cost: Vec<f64>,
    flow: Vec<f64>,
    state: Vec<i8>,

    pi: Vec<f64>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    pred_dir: Vec<i8>,
    dirty_revs: Vec<usize>,

    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: f64,

    next_arc: usize,
    block_size: usize,
    eps: f64,
}

impl NetworkSimplex {
    fn new(supply: &[f64], arcs: &[(usize, usize, f64)]) -> Self {
        let node_num = supply.len();
        let arc_num = arcs.len();
        let all = arc_num + node_num;
        let root = node_num;

        let mut s = NetworkSimplex {
            node_num,
            arc_num,
            source: Vec::with_capacity(all),
            target: Vec::with_capacity(all),
            cost: Vec::with_capacity(all),
            flow: vec![0.0; all],
            state: vec![STATE_LOWER; all],
            pi: vec![0.0; node_num + 1],
            parent: vec![NONE; node_num + 1],
            pred: vec![NONE; node_num + 1],
            thread: vec![0; node_num + 1],
            rev_thread: vec![0; node_num + 1],
            succ_num: vec![0; node_num + 1],
            last_succ: vec![0; node_num + 1],
            pred_dir: vec![DIR_UP; node_num + 1],
            dirty_revs: Vec::new(),
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0.0,
            next_arc: 0,
            block_size: ((arc_num as f64).sqrt().ceil() as usize).max(10),
            eps: 0.0,
        };
        let mut max_cost: f64 = 0.0;
        for &(u, v, c) in arcs {
            s.source.push(u);
            s.target.push(v);
            s.cost.push(c);
            max_cost = max_cost.max(c);
        }
        let art_cost = (max_cost + 1.0) * node_num as f64;
        s.eps = art_cost * 1e-13;

        s.thread[root] = 0;
        s.rev_thread[0] = root;
        s.succ_num[root] = node_num + 1;
        s.last_succ[root] = root - 1;
        #[allow(clippy::needless_range_loop)]
        for u in 0..node_num {
            let e = arc_num + u;
            s.parent[u] = root;
            s.pred[u] = e;
            s.thread[u] = u + 1;
            s.rev_thread[u + 1] = u;
            s.succ_num[u] = 1;
            s.last_succ[u] = u;
            s.state[e] = STATE_TREE;
            if supply[u] >= 0.0 {
                s.pred_dir[u] = DIR_UP;
                s.pi[u] = 0.0;
                s.source.push(u);
                s.target.push(root);
                s.flow[e] = supply[u];
                s.cost.push(0.0);
            } else {
                s.pred_dir[u] = DIR_DOWN;
                s.pi[u] = art_cost;
                s.source.push(root);
                s.target.push(u);
                s.flow[e] = -supply[u];
                s.cost.push(art_cost);
            }
        }
        s
    }

    fn reduced_cost(&self, e: usize) -> f64 {
        self.state[e] as f64 * (self.cost[e] + self.pi[self.source[e]] - self.pi[self.target[e]])
    }

    fn find_entering_arc(&mut self) -> bool {
        let mut min = -self.eps;
        let mut found = false;
        let mut cnt = self.block_size;
        let order = (self.next_arc..self.arc_num).chain(0..self.next_arc);
        for e in order {
            let c = self.reduced_cost(e);
            if c < min {
                min = c;
                self.in_arc = e;
                found = true;
            }
            cnt -= 1;
            if cnt == 0 {
                if found {
                    self.next_arc = e + 1;
                    if self.next_arc == self.arc_num {
                        self.next_arc = 0;
                    }
                    return true;
                }
                cnt = self.block_size;
            }
        }
        found
    }

    fn find_join_node(&mut self) {
        let mut u = self.source[self.in_arc];
        let mut v = self.target[self.in_arc];
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    /// Returns false when the cycle is unbounded.
    fn find_leaving_arc(&mut self) -> bool {
        let (first, second) = if self.state[self.in_arc] == STATE_LOWER {
            (self.source[self.in_arc], self.target[self.in_arc])
        } else {
            (self.target[self.in_arc], self.source[self.in_arc])
        };
        self.delta = f64::INFINITY;
        let mut result = 0;

        let mut u = first;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.pred_dir[u] == DIR_UP {
                self.flow[e]
            } else {
                f64::INFINITY
            };
            if d < self.delta {
                self.delta = d;
                self.u_out = u;
                result = 1;
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.pred_dir[u] == DIR_DOWN {
                self.flow[e]
            } else {
                f64::INFINITY
            };
            if d <= self.delta {
                self.delta = d;
                self.u_out = u;
                result = 2;
            }
            u = self.parent[u];
        }

        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        result != 0
    }

    fn change_flow(&mut self) {
        if self.delta > 0.0 {
            let val = self.state[self.in_arc] as f64 * self.delta;
            self.flow[self.in_arc] += val;
            let mut u = self.source[self.in_arc];
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] -= self.pred_dir[u] as f64 * val;
                u = self.parent[u];
            }
            let mut u = self.target[self.in_arc];
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] += self.pred_dir[u] as f64 * val;
                u = self.parent[u];
            }
        }
        self.state[self.in_arc] = STATE_TREE;
        let out = self.pred[self.u_out];
        // uncapacitated: the blocking arc always drops to its lower bound
        self.flow[out] = 0.0;
        self.state[out] = STATE_LOWER;
    }

    fn update_tree_structure(&mut self) {
        let u_in = self.u_in;
        let v_in = self.v_in;
        let u_out = self.u_out;
        let in_arc = self.in_arc;
        let join = self.join;

        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source[in_arc] { DIR_UP } else { DIR_DOWN };

            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue = if old_rev_thread == v_in {
                self.thread[old_last_succ]
            } else {
                self.thread[v_in]
            };

            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);

                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;

                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;

                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;

            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }

            for i in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[i];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }

            let mut tmp_sc = 0usize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u];
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                // p was below u before the re-rooting, so this difference is positive
                tmp_sc += self.succ_num[u] - self.succ_num[p];
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source[in_arc] { DIR_UP } else { DIR_DOWN };
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in { join } else { NONE };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }

        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    fn update_potential(&mut self) {
        let sigma = self.pi[self.v_in] - self.pi[self.u_in] - self.pred_dir[self.u_in] as f64 * self.cost[self.in_arc];
        let end = self.thread[self.last_succ[self.u_in]];
        let mut u = self.u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }

    fn run(&mut self) -> Result<()> {
        let max_iter = 1000 * (self.arc_num + self.node_num).max(1000);
        let mut iter = 0usize;
        while self.find_entering_arc() {
            self.find_join_node();
            if !self.find_leaving_arc() {
                return Err(Error::Invalid("unbounded transport problem".into()));
            }
            self.change_flow();
            self.update_tree_structure();
            self.update_potential();
            iter += 1;
            if iter > max_iter {
                return Err(Error::Invalid("network simplex did not converge".into()));
            }
        }
        let residual: f64 = (self.arc_num..self.arc_num + self.node_num).map(|e| self.flow[e]).sum();
        if residual > MASS_TOLERANCE {
            return Err(Error::Invalid(format!("infeasible transport, residual {residual}")));
        }
        Ok(())
    }

    fn total_cost(&self) -> f64 {
        (0..self.arc_num).map(|e| self.flow[e] * self.cost[e]).sum()
    }
}
