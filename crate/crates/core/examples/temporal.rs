//! Revisit statistics and temporal quality for a few hand-written traces.
//!
//!     cargo run --example temporal

use svqoi::temporal::{revisit_stats, temporal_raw, TemporalOptions, DEFAULT_BIN_WIDTH_S};

fn main() {
    let traces: [(u32, &[i64]); 4] = [
        (0, &[100]),
        (1, &[0, 600, 1200, 1800]),
        (2, &[0, 60, 650, 1250, 1860]),
        (3, &[0, 0, 300, 300, 600]),
    ];
    for (cell, ts) in traces {
        match revisit_stats(cell, ts, DEFAULT_BIN_WIDTH_S) {
            Some(s) => println!("cell {cell}: n={} intervals {:?} u={} s", s.n, s.intervals_s, s.u_s),
            None => println!("cell {cell}: fewer than two distinct visits"),
        }
    }
    let t = temporal_raw(traces.iter().copied(), &TemporalOptions::default());
    println!("T_raw = {t:.6}");
}
