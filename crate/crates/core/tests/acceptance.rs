//! Acceptance suite. Runs each criterion in turn, prints one PASS/FAIL
//! line per criterion and exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use svqoi::geo::Xy;
use svqoi::ingest::{ingest_files, open_index, persist_index, Index, IndexConfig, IngestPaths, ParseMode};
use svqoi::qoi::{
    filter, normalize_spatial, period_score, rank, rank_by, score_pipeline, FilterSpec, QualityScore, ScoreParams,
    ScoresDoc, Weekday, Weights,
};
use svqoi::service::ScoreQuery;
use svqoi::spatial::{emd_exact, jsd, sliced_wasserstein, Metric, DEFAULT_EXACT_LIMIT};
use svqoi::synth::{generate, City, Profile};
use svqoi::temporal::{temporal_raw, TemporalOptions};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn exact_ot_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_1d: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=8);
        let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-500.0..500.0)).collect();
        xs.sort_by(f64::total_cmp);
        let pts: Vec<Xy> = xs.iter().map(|&x| Xy::new(x, 0.0)).collect();
        let p = common::histogram(&mut rng, n, 0.3);
        let q = common::histogram(&mut rng, n, 0.3);
        let got = emd_exact(&p, &q, &pts, DEFAULT_EXACT_LIMIT).map_err(|e| e.to_string())?;
        let want = common::w1_collinear(&p, &q, &xs);
        worst_1d = worst_1d.max((got - want).abs());
    }
    check(worst_1d <= 1e-9, || format!("collinear max error {worst_1d:e} > 1e-9"))?;

    let mut worst_2d: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let pts: Vec<Xy> = (0..n)
            .map(|_| Xy::new(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0)))
            .collect();
        let p = common::histogram(&mut rng, n, 0.25);
        let q = common::histogram(&mut rng, n, 0.25);
        let got = emd_exact(&p, &q, &pts, DEFAULT_EXACT_LIMIT).map_err(|e| e.to_string())?;
        let want = common::emd_by_lp(&p, &q, &pts);
        worst_2d = worst_2d.max((got - want).abs());
    }
    check(worst_2d <= 1e-7, || format!("2D max error {worst_2d:e} > 1e-7"))?;
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "200 collinear pairs max err {worst_1d:.1e}, 200 planar pairs vs LP max err {worst_2d:.1e}, {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn sliced_vs_exact() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let k = rng.gen_range(1..=5);
        let support: Vec<Xy> = (0..k)
            .map(|_| Xy::new(rng.gen_range(0.0..200.0), rng.gen_range(0.0..200.0)))
            .collect();
        let shift = Xy::new(rng.gen_range(-150.0..150.0), rng.gen_range(-150.0..150.0));
        let masses = common::histogram(&mut rng, k, 0.0);
        let mut pts = support.clone();
        pts.extend(support.iter().map(|s| Xy::new(s.x + shift.x, s.y + shift.y)));
        let mut p = masses.clone();
        p.extend(std::iter::repeat_n(0.0, k));
        let mut q = vec![0.0; k];
        q.extend(&masses);
        let exact = emd_exact(&p, &q, &pts, DEFAULT_EXACT_LIMIT).map_err(|e| e.to_string())?;
        let sliced = sliced_wasserstein(&p, &q, &pts, 1024, 0).map_err(|e| e.to_string())?;
        worst = worst.max((sliced - exact).abs() / exact);
    }
    check(worst <= 0.05, || format!("max relative error {:.2}% > 5%", worst * 100.0))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "20 translated pairs, K=1024, max relative error {:.2}%, {:.2} s",
        worst * 100.0,
        start.elapsed().as_secs_f64()
    ))
}

fn jsd_axioms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..1000 {
        let n = rng.gen_range(1..=64);
        let p = common::histogram(&mut rng, n, 0.3);
        let q = if i % 10 == 0 { p.clone() } else { common::histogram(&mut rng, n, 0.3) };
        let pq = jsd(&p, &q).map_err(|e| e.to_string())?;
        let qp = jsd(&q, &p).map_err(|e| e.to_string())?;
        let pp = jsd(&p, &p).map_err(|e| e.to_string())?;
        check((pq - qp).abs() <= 1e-12, || format!("asymmetric: {pq} vs {qp}"))?;
        check((0.0..=1.0).contains(&pq), || format!("out of range: {pq}"))?;
        check(pp.abs() <= 1e-12, || format!("jsd(p, p) = {pp}"))?;
        let equal = p.iter().zip(&q).all(|(a, b)| (a - b).abs() <= 1e-12);
        check(equal == (pq <= 1e-12), || format!("zero-iff-equal violated: equal={equal}, jsd={pq}"))?;
    }
    within(start.elapsed(), 1.0)?;
    Ok(format!("1000 pairs, {:.3} s", start.elapsed().as_secs_f64()))
}

fn temporal_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let gaps = [0i64, 30, 59, 60, 90, 120, 300, 570, 600, 610, 630, 1200, 3600];
    for trace in 0..50 {
        let mut cells: BTreeMap<u32, Vec<i64>> = BTreeMap::new();
        for _ in 0..rng.gen_range(0..8) {
            let cell = rng.gen_range(0..20);
            let mut t = rng.gen_range(0..86_400i64);
            let mut ts = vec![t];
            for _ in 0..rng.gen_range(0..10) {
                t += gaps[rng.gen_range(0..gaps.len())] + rng.gen_range(0..3);
                ts.push(t);
            }
            cells.entry(cell).or_default().extend(ts);
        }
        for ts in cells.values_mut() {
            ts.sort();
        }
        let got = temporal_raw(cells.iter().map(|(c, t)| (*c, t.as_slice())), &TemporalOptions::default());
        let want = common::temporal_reference(&cells, 60);
        check(got == want, || format!("trace {trace}: {got} != {want}"))?;
    }
    within(start.elapsed(), 1.0)?;
    Ok(format!("50 traces equal to reference, {:.3} s", start.elapsed().as_secs_f64()))
}

fn trapezoid() -> Outcome {
    for s in [0.0, 0.1, 1.0 / 3.0, 0.7, 2.5, 1e-300] {
        for d in 1..=30 {
            let got = period_score(&vec![s; d]);
            check(got == s, || format!("constant {s} over {d} days gave {got}"))?;
        }
    }
    let v = period_score(&[0.0, 1.0, 0.0]);
    check(v == 0.5, || format!("[0,1,0] gave {v}"))?;
    Ok("constant series exact for 1..30 days, [0,1,0] -> 0.5".into())
}

fn score(id: String, s: f64, t: f64, c: f64) -> QualityScore {
    QualityScore {
        region_id: id,
        s_raw: 0.0,
        t_raw: 0.0,
        c_raw: 0.0,
        s,
        t,
        c,
        q: 0.0,
        rank: 0,
    }
}

fn permutation(ranked: &[QualityScore]) -> Vec<(String, u32)> {
    ranked.iter().map(|s| (s.region_id.clone(), s.rank)).collect()
}

fn ranking_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // (a) S-ranking matches ascending distance, with shared ranks for ties
    for _ in 0..100 {
        let n = rng.gen_range(1..=20);
        let d: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.2) { 0.25 } else { rng.gen_range(0.0..1.0) })
            .collect();
        let s = normalize_spatial(&d);
        let scores: Vec<QualityScore> =
            (0..n).map(|i| score(format!("r{i:02}"), s[i], 0.0, 0.0)).collect();
        let ranked = rank(scores, Weights::new(1, 0, 0).unwrap());
        for r in &ranked {
            let i: usize = r.region_id[1..].parse().unwrap();
            let want = 1 + d.iter().filter(|&&x| x < d[i]).count() as u32;
            check(r.rank == want, || format!("(a) {} ranked {} want {want}", r.region_id, r.rank))?;
        }
        let mut by_distance: Vec<usize> = (0..n).collect();
        by_distance.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
        let order: Vec<usize> = ranked.iter().map(|r| r.region_id[1..].parse().unwrap()).collect();
        check(order == by_distance, || "(a) order differs from ascending distance".to_string())?;
    }
    // (b) positive rescaling of the weights keeps the permutation
    for _ in 0..100 {
        let n = rng.gen_range(1..=20);
        let scores: Vec<QualityScore> = (0..n)
            .map(|i| score(format!("r{i:02}"), rng.gen(), rng.gen(), rng.gen()))
            .collect();
        let w = [rng.gen_range(0..=5u8), rng.gen_range(0..=5u8), rng.gen_range(0..=5u8)];
        let base = permutation(&rank_by(scores.clone(), w.map(f64::from)));
        for k in [2.0, 10.0] {
            let scaled = permutation(&rank_by(scores.clone(), w.map(|v| v as f64 * k)));
            check(scaled == base, || format!("(b) weights {w:?} x{k} changed the ranking"))?;
        }
        if w.iter().all(|&v| v <= 2) {
            let doubled = Weights::new(2 * w[0] as i64, 2 * w[1] as i64, 2 * w[2] as i64).unwrap();
            let via_weights = permutation(&rank(scores.clone(), doubled));
            check(via_weights == base, || format!("(b) Weights {w:?} x2 changed the ranking"))?;
        }
    }
    // (c) ties resolve by region id, independent of input order
    let tied: Vec<QualityScore> = ["C", "A", "D", "B"]
        .iter()
        .zip([0.5, 0.5, 0.9, 0.2])
        .map(|(id, s)| score(id.to_string(), s, 0.0, 0.0))
        .collect();
    let want = vec![("D".into(), 1), ("A".into(), 2), ("C".into(), 2), ("B".into(), 4)];
    for _ in 0..20 {
        let mut shuffled = tied.clone();
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        let got = permutation(&rank(shuffled, Weights::new(1, 0, 0).unwrap()));
        check(got == want, || format!("(c) got {got:?}"))?;
    }
    Ok("(a) 100 distance vectors, (b) 100 score sets x {2, 10}, (c) ties by region id".into())
}

fn two_region_index(a: Profile, b: Profile) -> Result<Index, String> {
    let city = City::new(&[("A", 3), ("B", 3)]);
    let config = IndexConfig::default();
    let grids = city.grids(config.cell_length_m).map_err(|e| e.to_string())?;
    let traffic = generate(&grids, &[a, b], &config, 18_500, 3, 11);
    traffic.index(&city, &config).map_err(|e| e.to_string())
}

fn leaders(doc: &ScoresDoc) -> [String; 3] {
    let lead = |w: Weights| doc.reweighted(w).segments[0].region_id.clone();
    [
        lead(Weights::new(1, 0, 0).unwrap()),
        lead(Weights::new(0, 1, 0).unwrap()),
        lead(Weights::new(0, 0, 1).unwrap()),
    ]
}

fn forced_ordering() -> Outcome {
    let start = Instant::now();
    let params = ScoreParams::default();
    let doc = score_pipeline(&two_region_index(Profile::THOROUGH, Profile::SPARSE)?, &params)
        .map_err(|e| e.to_string())?;
    let a = |doc: &ScoresDoc| doc.segments.iter().find(|s| s.region_id == "A").cloned().unwrap();
    let b = |doc: &ScoresDoc| doc.segments.iter().find(|s| s.region_id == "B").cloned().unwrap();
    check(a(&doc).s > b(&doc).s && a(&doc).t > b(&doc).t && a(&doc).c > b(&doc).c, || {
        format!("A does not lead every attribute: {:?}", doc.segments)
    })?;
    check(a(&doc).t == 1.0 && b(&doc).t == 0.0, || "expected T = 1 for A and 0 for B".into())?;
    for w in 0..216i64 {
        let weights = Weights::new(w / 36, (w / 6) % 6, w % 6).unwrap();
        if w == 0 {
            continue;
        }
        let top = &doc.reweighted(weights).segments[0];
        check(top.region_id == "A" && top.rank == 1, || format!("weights {weights} put {} first", top.region_id))?;
    }

    let variants = [
        (
            "S",
            Profile { coverage: 0.5, ..Profile::THOROUGH },
            Profile { coverage: 1.0, ..Profile::SPARSE },
            ["B", "A", "A"],
        ),
        (
            "T",
            Profile { visits_per_cell: 1, ..Profile::THOROUGH },
            Profile { visits_per_cell: 3, ..Profile::SPARSE },
            ["A", "B", "A"],
        ),
        (
            "C",
            Profile { brightness: 0.05, ..Profile::THOROUGH },
            Profile { brightness: 0.8, ..Profile::SPARSE },
            ["A", "A", "B"],
        ),
    ];
    for (name, pa, pb, want) in variants {
        let doc = score_pipeline(&two_region_index(pa, pb)?, &params).map_err(|e| e.to_string())?;
        let got = leaders(&doc);
        check(got == want.map(String::from), || {
            format!("degraded {name}: leaders (S, T, C) = {got:?}, want {want:?}")
        })?;
    }
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "A leads S, T, C and Q for all 215 nonzero weights; S, T, C degradations flip only their attribute, {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn random_spec<R: Rng>(rng: &mut R) -> FilterSpec {
    let mut spec = FilterSpec::default();
    if rng.gen_bool(0.3) {
        spec.region_ids = Some(vec![["A", "B", "C"][rng.gen_range(0..3)].to_string()]);
    }
    if rng.gen_bool(0.4) {
        let days: Vec<Weekday> = Weekday::ALL.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
        spec.days_of_week = Some(days);
    }
    if rng.gen_bool(0.4) {
        spec.hours_of_day = Some((0..24).filter(|_| rng.gen_bool(0.5)).collect());
    }
    if rng.gen_bool(0.3) {
        spec.min_brightness = Some(rng.gen_range(0.0..1.0));
    }
    if rng.gen_bool(0.3) {
        spec.min_s = Some(rng.gen_range(0.0..1.0));
    }
    if rng.gen_bool(0.3) {
        spec.min_t = Some(rng.gen_range(0.0..1.0));
    }
    if rng.gen_bool(0.3) {
        spec.min_c = Some(rng.gen_range(0.0..1.0));
    }
    spec
}

fn filter_laws() -> Outcome {
    let city = City::new(&[("A", 2), ("B", 2), ("C", 2)]);
    let config = IndexConfig::default();
    let grids = city.grids(config.cell_length_m).map_err(|e| e.to_string())?;
    let profiles = [
        Profile::THOROUGH,
        Profile::SPARSE,
        Profile { coverage: 0.8, visits_per_cell: 2, revisit_s: 300, brightness: 0.5, confidence: Some(0.6) },
    ];
    // seven consecutive days with the same traffic each day
    let traffic = generate(&grids, &profiles, &config, 18_536, 7, 21);
    let index = traffic.index(&city, &config).map_err(|e| e.to_string())?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..60 {
        let spec = random_spec(&mut rng);
        let once = filter(&index, &spec).map_err(|e| e.to_string())?;
        let stats = once.stats();
        let dropped = index.records().count() as u64 - stats.kept_count;
        check(stats.kept_count <= stats.input_count && stats.kept_count + dropped == stats.input_count, || {
            format!("spec {i}: counts {stats:?}")
        })?;
        let first = once.to_index();
        let second = filter(&first, &spec).map_err(|e| e.to_string())?.to_index();
        check(first.regions == second.regions, || format!("spec {i} not idempotent: {spec:?}"))?;
    }

    let friday = FilterSpec {
        days_of_week: Some(vec![Weekday::Fri]),
        ..FilterSpec::default()
    };
    let stats = filter(&index, &friday).map_err(|e| e.to_string())?.stats();
    check(stats.input_count % 7 == 0 && stats.kept_count * 7 == stats.input_count, || {
        format!("Friday kept {} of {}", stats.kept_count, stats.input_count)
    })?;
    let want = 100.0 * (1.0 - 1.0 / 7.0);
    check((stats.reduction_pct - want).abs() < 1e-9, || format!("reduction {}", stats.reduction_pct))?;
    Ok(format!(
        "60 random specs idempotent and conserving; Friday keeps {}/{} (reduction {:.3}%)",
        stats.kept_count, stats.input_count, stats.reduction_pct
    ))
}

fn run_scoring(index: &Index, threads: usize, metric: Metric) -> Result<String, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())?;
    let query = ScoreQuery {
        metric,
        ..ScoreQuery::default()
    };
    pool.install(|| query.run(index)).map_err(|e| e.to_string())
}

fn determinism_and_scale() -> Outcome {
    const REGIONS: usize = 14;
    const DAYS: usize = 12;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ids: Vec<String> = (0..REGIONS).map(|i| format!("100{:02}", i + 10)).collect();
    let spec: Vec<(&str, usize)> = ids.iter().map(|id| (id.as_str(), 10)).collect();
    let city = City::new(&spec);
    let config = IndexConfig::default();
    let (regions_path, network_path) = city.write_geojson(dir.path()).map_err(|e| e.to_string())?;
    let (records_path, detections_path, n_records) = {
        let grids = city.grids(config.cell_length_m).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let profiles: Vec<Profile> = (0..REGIONS)
            .map(|_| Profile {
                coverage: rng.gen_range(0.6..=1.0),
                visits_per_cell: 3,
                revisit_s: [300, 600, 900][rng.gen_range(0..3)],
                brightness: rng.gen_range(0.05..0.9),
                confidence: Some(rng.gen_range(0.3..1.0)),
            })
            .collect();
        let total_cells: usize = grids.iter().map(|g| g.len()).sum();
        // top up coverage so the run has at least a million records
        let per_day: usize = grids
            .iter()
            .zip(&profiles)
            .map(|(g, p)| (p.coverage * g.len() as f64).ceil() as usize * p.visits_per_cell)
            .sum();
        let days = DAYS.max(1_000_000usize.div_ceil(per_day));
        let traffic = generate(&grids, &profiles, &config, 18_500, days, 8);
        let (r, d) = traffic.write_jsonl(dir.path()).map_err(|e| e.to_string())?;
        eprintln!("  scale fixture: {} records over {total_cells} cells, {days} days", traffic.records.len());
        (r, d, traffic.records.len())
    };
    check(n_records >= 1_000_000, || format!("only {n_records} records generated"))?;

    let index_dir = dir.path().join("index");
    let start = Instant::now();
    let paths = IngestPaths {
        records: &records_path,
        detections: Some(&detections_path),
        network: &network_path,
        regions: &regions_path,
    };
    let ingested = ingest_files(paths, &config, ParseMode::Strict).map_err(|e| e.to_string())?;
    persist_index(&ingested, &index_dir).map_err(|e| e.to_string())?;
    drop(ingested);
    let index = open_index(&index_dir).map_err(|e| e.to_string())?;
    let eight = run_scoring(&index, 8, Metric::Jsd)?;
    let elapsed = start.elapsed();
    let rss = common::peak_rss_bytes();

    let one = run_scoring(&index, 1, Metric::Jsd)?;
    let again = run_scoring(&index, 8, Metric::Jsd)?;
    check(eight == one, || "scores differ between 1 and 8 threads".into())?;
    check(eight == again, || "scores differ between repeated runs".into())?;
    let sliced_8 = run_scoring(&index, 8, Metric::WassersteinSliced)?;
    let sliced_1 = run_scoring(&index, 1, Metric::WassersteinSliced)?;
    check(sliced_8 == sliced_1, || "sliced scores differ between 1 and 8 threads".into())?;

    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let rss_gb = rss.map_or(f64::NAN, |b| b as f64 / (1u64 << 30) as f64);
    check(rss.is_none_or(|b| b < 2 << 30), || format!("peak memory {rss_gb:.2} GB"))?;
    within(elapsed, 60.0).map_err(|e| format!("{e} on {cores} core(s)"))?;
    Ok(format!(
        "{n_records} records, 14 regions: ingest+persist+open+score {:.1} s on {cores} core(s), peak RSS {rss_gb:.2} GB; \
         identical bytes for 1/8 threads and repeats (jsd and sliced)",
        elapsed.as_secs_f64()
    ))
}

fn keys(v: &Value) -> Vec<&str> {
    v.as_object().map_or(Vec::new(), |m| m.keys().map(|k| k.as_str()).collect())
}

fn schema_fidelity() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let city = City::new(&[("10021", 2), ("10037", 2), ("10128", 2)]);
    let config = IndexConfig::default();
    let grids = city.grids(config.cell_length_m).map_err(|e| e.to_string())?;
    let profiles = [
        Profile::THOROUGH,
        Profile::SPARSE,
        Profile { coverage: 0.7, visits_per_cell: 2, revisit_s: 900, brightness: 0.4, confidence: Some(0.5) },
    ];
    let traffic = generate(&grids, &profiles, &config, 18_500, 4, 31);
    let index = traffic.index(&city, &config).map_err(|e| e.to_string())?;
    let index_dir = dir.path().join("idx");
    persist_index(&index, &index_dir).map_err(|e| e.to_string())?;
    let index = Arc::new(open_index(&index_dir).map_err(|e| e.to_string())?);

    let runtime = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    let app = svqoi::service::router(index.clone(), None);
    let mut rows = 0;
    for (w, metric) in [("1,1,1", "jsd"), ("5,1,0", "sliced"), ("0,2,5", "emd"), ("3,3,3", "jsd")] {
        let out = dir.path().join(format!("scores-{metric}-{w}.json"));
        let code = svqoi::cli::run([
            "svqoi",
            "score",
            "--index",
            index_dir.to_str().unwrap(),
            "--metric",
            metric,
            "--weights",
            w,
            "--format",
            "json",
            "--out",
            out.to_str().unwrap(),
        ]);
        check(code == 0, || format!("cli score exited {code}"))?;
        let cli_bytes = std::fs::read(&out).map_err(|e| e.to_string())?;
        let api_bytes = runtime.block_on(api_get(app.clone(), &format!("/api/scores?weights={w}&metric={metric}")))?;
        check(cli_bytes == api_bytes, || format!("CLI and service bytes differ for {w} {metric}"))?;

        let v: Value = serde_json::from_slice(&cli_bytes).map_err(|e| e.to_string())?;
        check(keys(&v) == ["metric", "segments", "weights", "window"], || format!("top-level keys {:?}", keys(&v)))?;
        let weights: Vec<f64> = v["weights"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        for seg in v["segments"].as_array().unwrap() {
            check(
                keys(seg) == ["C", "Q", "S", "T", "c_raw", "rank", "region_id", "s_raw", "t_raw"],
                || format!("segment keys {:?}", keys(seg)),
            )?;
            let (s, t, c, q) = (seg["S"].as_f64().unwrap(), seg["T"].as_f64().unwrap(), seg["C"].as_f64().unwrap(), seg["Q"].as_f64().unwrap());
            check([s, t, c].iter().all(|x| (0.0..=1.0).contains(x)), || format!("attribute out of [0,1]: {seg}"))?;
            check(q == weights[0] * s + weights[1] * t + weights[2] * c, || format!("Q mismatch: {seg}"))?;
            check(seg["rank"].is_u64(), || "rank is not an integer".into())?;
            rows += 1;
        }
    }
    Ok(format!("{rows} segment rows over 4 weight/metric tuples; CLI and service bytes identical"))
}

async fn api_get(app: axum::Router, uri: &str) -> Result<Vec<u8>, String> {
    use http_body_util::BodyExt;
    use tower::ServiceExt;
    let req = axum::http::Request::get(uri).body(axum::body::Body::empty()).unwrap();
    let res = app.oneshot(req).await.map_err(|e| e.to_string())?;
    let status = res.status();
    let body = res.into_body().collect().await.map_err(|e| e.to_string())?.to_bytes().to_vec();
    if !status.is_success() {
        return Err(format!("{uri}: {status} {}", String::from_utf8_lossy(&body)));
    }
    Ok(body)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact OT oracle", exact_ot_oracle),
        ("sliced Wasserstein vs exact", sliced_vs_exact),
        ("JSD axioms", jsd_axioms),
        ("temporal oracle", temporal_oracle),
        ("trapezoid", trapezoid),
        ("ranking invariants", ranking_invariants),
        ("end-to-end forced ordering", forced_ordering),
        ("filter laws", filter_laws),
        ("determinism and scale", determinism_and_scale),
        ("schema fidelity", schema_fidelity),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
