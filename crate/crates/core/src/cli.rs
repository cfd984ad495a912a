//! Command-line front end. [`run`] returns the process exit code: 0 on
//! success, 1 on usage errors, 2 on data errors.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::content::DEFAULT_BRIGHTNESS_THRESHOLD;
use crate::error::{Error, Result};
use crate::geo::{find_holes, holes_geojson, DEFAULT_CELL_LENGTH_M, DEFAULT_MIN_RUN_CELLS, DEFAULT_SNAP_RADIUS_M};
use crate::ingest::{ingest_files, open_index, persist_index, IndexConfig, IngestPaths, ParseMode};
use crate::qoi::report::{to_csv, to_svg, to_table};
use crate::qoi::{
    filter_with, score_pipeline, window_from_bounds, FilterSpec, QualityParams, ScoreParams, ScoresDoc, Weekday,
    Weights,
};
use crate::spatial::{Metric, SpatialOptions, DEFAULT_EXACT_LIMIT, DEFAULT_PROJECTIONS, DEFAULT_SEED};
use crate::temporal::{RateReading, TemporalOptions, DEFAULT_BIN_WIDTH_S};

#[derive(Debug, Parser)]
#[command(name = "svqoi", version, about = "Quality-of-information scoring for street-view image metadata")]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse records, detections, street network and regions into an index directory.
    Ingest(IngestArgs),
    /// Score and rank regions over a time window.
    Score(ScoreArgs),
    /// Re-rank an existing scores file under new weights.
    Rank(RankArgs),
    /// Keep records matching attribute and quality predicates.
    Filter(FilterArgs),
    /// Coverage holes of one region as GeoJSON.
    Holes(HolesArgs),
    /// Render a scores file as CSV, JSON, SVG or a text table.
    Report(ReportArgs),
    /// Serve the HTTP API and dashboard assets.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reading {
    Interval,
    Frequency,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Image records, JSONL or CSV (by extension).
    #[arg(long)]
    pub records: PathBuf,
    /// Detector output, JSONL.
    #[arg(long)]
    pub detections: Option<PathBuf>,
    /// Street network GeoJSON (LineString / MultiLineString).
    #[arg(long)]
    pub network: PathBuf,
    /// Region polygons GeoJSON with a `region_id` property.
    #[arg(long)]
    pub regions: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Street cell length in meters.
    #[arg(long, default_value_t = DEFAULT_CELL_LENGTH_M)]
    pub cell_len: f64,
    /// Maximum snapping distance in meters.
    #[arg(long, default_value_t = DEFAULT_SNAP_RADIUS_M)]
    pub snap_radius: f64,
    /// Offset from UTC in hours for day bucketing.
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub day_offset: f64,
    /// Skip malformed lines instead of failing.
    #[arg(long)]
    pub lenient: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct QualityArgs {
    /// Spatial measure: jsd, emd (exact Wasserstein) or sliced.
    #[arg(long, default_value = "jsd", value_parser = parse_metric)]
    pub metric: Metric,
    /// Sliced Wasserstein seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Sliced Wasserstein projection count.
    #[arg(long, default_value_t = DEFAULT_PROJECTIONS, value_parser = positive_count)]
    pub projections: usize,
    /// Largest grid the exact solver accepts.
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    pub exact_limit: usize,
    /// Images darker than this are ignored for content.
    #[arg(long, default_value_t = DEFAULT_BRIGHTNESS_THRESHOLD)]
    pub brightness_threshold: f64,
    /// Histogram bin width in seconds for the dominant revisit interval.
    #[arg(long, default_value_t = DEFAULT_BIN_WIDTH_S)]
    pub bin_width: f64,
    /// Whether the dominant interval divides or multiplies revisit counts.
    #[arg(long, value_enum, default_value_t = Reading::Interval)]
    pub rate_reading: Reading,
}

impl QualityArgs {
    fn params(&self) -> QualityParams {
        QualityParams {
            metric: self.metric,
            spatial: SpatialOptions {
                exact_limit: self.exact_limit,
                projections: self.projections,
                seed: self.seed,
            },
            temporal: TemporalOptions {
                bin_width_s: self.bin_width,
                reading: match self.rate_reading {
                    Reading::Interval => RateReading::Interval,
                    Reading::Frequency => RateReading::Frequency,
                },
            },
            brightness_threshold: self.brightness_threshold,
        }
    }
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[command(flatten)]
    pub quality: QualityArgs,
    /// Importance weights a,b,g for S, T and C, each in 0..5.
    #[arg(long, default_value = "1,1,1", value_parser = parse_weights)]
    pub weights: Weights,
    /// Window start, UNIX seconds (inclusive).
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<i64>,
    /// Window end, UNIX seconds (exclusive).
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<i64>,
    /// Write the scores JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long, value_parser = parse_weights)]
    pub weights: Weights,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// Keep only these regions.
    #[arg(long = "region")]
    pub regions: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<i64>,
    /// Local weekday, e.g. fri or friday. Repeatable.
    #[arg(long = "dow", value_parser = parse_weekday)]
    pub days: Vec<Weekday>,
    /// Local hour 0..23. Repeatable.
    #[arg(long = "hod", value_parser = clap::value_parser!(u8).range(0..24))]
    pub hours: Vec<u8>,
    #[arg(long)]
    pub min_brightness: Option<f64>,
    /// Minimum region-day spatial score.
    #[arg(long = "min-S")]
    pub min_s: Option<f64>,
    /// Minimum region-day temporal score.
    #[arg(long = "min-T")]
    pub min_t: Option<f64>,
    /// Minimum region-day content score.
    #[arg(long = "min-C")]
    pub min_c: Option<f64>,
    #[command(flatten)]
    pub quality: QualityArgs,
    /// Kept records as JSONL.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

impl FilterArgs {
    fn spec(&self) -> FilterSpec {
        FilterSpec {
            region_ids: some_vec(&self.regions),
            from: self.from,
            to: self.to,
            days_of_week: some_vec(&self.days),
            hours_of_day: some_vec(&self.hours),
            min_brightness: self.min_brightness,
            bbox: None,
            min_s: self.min_s,
            min_t: self.min_t,
            min_c: self.min_c,
            metric: None,
        }
    }
}

#[derive(Debug, Args)]
pub struct HolesArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub region: String,
    /// Shortest run of empty cells reported.
    #[arg(long, default_value_t = DEFAULT_MIN_RUN_CELLS, value_parser = positive_count)]
    pub min_run: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long, env = "PORT", default_value_t = 8080)]
    pub port: u16,
    /// Dashboard assets served from `/`.
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
}

fn some_vec<T: Clone>(v: &[T]) -> Option<Vec<T>> {
    if v.is_empty() {
        None
    } else {
        Some(v.to_vec())
    }
}

fn positive_count(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

fn parse_weights(s: &str) -> std::result::Result<Weights, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_weekday(s: &str) -> std::result::Result<Weekday, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(|| execute(cli.command)),
            Err(e) => Err(Error::Invalid(e.to_string())),
        },
        None => execute(cli.command),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::WeightOutOfRange(_) | Error::Invalid(_) => 1,
                _ => 2,
            }
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Ingest(a) => ingest(a),
        Command::Score(a) => score(a),
        Command::Rank(a) => rank(a),
        Command::Filter(a) => filter(a),
        Command::Holes(a) => holes(a),
        Command::Report(a) => report(a),
        Command::Serve(a) => serve(a),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn print(s: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(s.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::io("<stdout>", e))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{name} must be positive, got {v}")))
    }
}

fn ingest(a: IngestArgs) -> Result<()> {
    positive("--cell-len", a.cell_len)?;
    positive("--snap-radius", a.snap_radius)?;
    if !(-24.0..=24.0).contains(&a.day_offset) {
        return Err(Error::Invalid(format!("--day-offset {} outside -24..24 hours", a.day_offset)));
    }
    let config = IndexConfig {
        cell_length_m: a.cell_len,
        snap_radius_m: a.snap_radius,
        day_offset_s: (a.day_offset * 3600.0).round() as i64,
    };
    let paths = IngestPaths {
        records: &a.records,
        detections: a.detections.as_deref(),
        network: &a.network,
        regions: &a.regions,
    };
    let mode = if a.lenient { ParseMode::Lenient } else { ParseMode::Strict };
    let index = ingest_files(paths, &config, mode)?;
    persist_index(&index, &a.out)?;
    let s = index.stats;
    match a.format {
        OutputFormat::Json => {
            let v = json!({ "stats": s, "regions": index.regions.len(), "out": a.out });
            print(&format!("{v}\n"))
        }
        OutputFormat::Text => print(&format!(
            "accepted={} outside_region={} unsnapped={} invalid={} regions={}\n",
            s.accepted,
            s.outside_region,
            s.unsnapped,
            s.invalid,
            index.regions.len()
        )),
    }
}

fn quality_check(q: &QualityArgs) -> Result<()> {
    positive("--bin-width", q.bin_width)?;
    if !(0.0..=1.0).contains(&q.brightness_threshold) {
        return Err(Error::Invalid(format!(
            "--brightness-threshold {} outside [0, 1]",
            q.brightness_threshold
        )));
    }
    Ok(())
}

fn emit_scores(doc: &ScoresDoc, out: Option<&Path>, format: OutputFormat) -> Result<()> {
    let json = doc.to_json()?;
    if let Some(path) = out {
        write_file(path, &json)?;
    }
    match format {
        OutputFormat::Json if out.is_none() => print(&json),
        OutputFormat::Json => Ok(()),
        OutputFormat::Text => print(&to_table(doc)),
    }
}

fn score(a: ScoreArgs) -> Result<()> {
    quality_check(&a.quality)?;
    if let (Some(f), Some(t)) = (a.from, a.to) {
        if f >= t {
            return Err(Error::Invalid(format!("--from {f} must be before --to {t}")));
        }
    }
    let index = open_index(&a.index)?;
    let params = ScoreParams {
        quality: a.quality.params(),
        weights: a.weights,
        window: window_from_bounds(&index, a.from, a.to)?,
    };
    let doc = score_pipeline(&index, &params)?;
    emit_scores(&doc, a.out.as_deref(), a.format)
}

fn read_scores(path: &Path) -> Result<ScoresDoc> {
    ScoresDoc::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

fn rank(a: RankArgs) -> Result<()> {
    let doc = read_scores(&a.scores)?.reweighted(a.weights);
    emit_scores(&doc, a.out.as_deref(), a.format)
}

fn filter(a: FilterArgs) -> Result<()> {
    quality_check(&a.quality)?;
    let spec = a.spec();
    spec.validate()?;
    let index = open_index(&a.index)?;
    let filtered = filter_with(&index, &spec, &a.quality.params())?;

    let file = File::create(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let mut w = BufWriter::new(file);
    let mut kept = 0u64;
    for (region, rec) in filtered.iter() {
        let mut v = serde_json::to_value(rec)?;
        if let Value::Object(m) = &mut v {
            m.insert("region_id".into(), Value::String(region.region_id().to_string()));
        }
        writeln!(w, "{v}").map_err(|e| Error::io(&a.out, e))?;
        kept += 1;
    }
    w.flush().map_err(|e| Error::io(&a.out, e))?;

    let stats = crate::qoi::FilterStats::new(index.record_count() as u64, kept);
    eprintln!(
        "kept={} input={} reduction={:.3}%",
        stats.kept_count,
        stats.input_count,
        stats.reduction_pct
    );
    match a.format {
        OutputFormat::Json => print(&format!("{}\n", serde_json::to_string(&stats)?)),
        OutputFormat::Text => Ok(()),
    }
}

fn holes(a: HolesArgs) -> Result<()> {
    let index = open_index(&a.index)?;
    let region = index
        .region(&a.region)
        .ok_or_else(|| Error::UnknownRegion(a.region.clone()))?;
    let counts = region.cell_counts(|_| true);
    let found = find_holes(&region.grid, &counts, a.min_run);
    let geojson = format!("{}\n", holes_geojson(&region.grid, &found));
    if let Some(path) = &a.out {
        write_file(path, &geojson)?;
    }
    match a.format {
        OutputFormat::Json if a.out.is_none() => print(&geojson),
        OutputFormat::Json => Ok(()),
        OutputFormat::Text => {
            let mut s = format!("{} holes in region {}\n", found.len(), a.region);
            for h in &found {
                s.push_str(&format!(
                    "segment {} cells {}..={} length {:.1} m at {:.6},{:.6}\n",
                    h.segment_index, h.cell_id_start, h.cell_id_end, h.length_m, h.centroid.lat, h.centroid.lon
                ));
            }
            print(&s)
        }
    }
}

fn report(a: ReportArgs) -> Result<()> {
    let doc = read_scores(&a.scores)?;
    let rendered = match a.format {
        ReportFormat::Csv => to_csv(&doc)?,
        ReportFormat::Json => doc.to_json()?,
        ReportFormat::Svg => to_svg(&doc),
        ReportFormat::Text => to_table(&doc),
    };
    match &a.out {
        Some(path) => write_file(path, &rendered),
        None => print(&rendered),
    }
}

fn serve(a: ServeArgs) -> Result<()> {
    let index = Arc::new(open_index(&a.index)?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Error::io("<runtime>", e))?;
    eprintln!("serving {} regions on port {}", index.regions.len(), a.port);
    runtime
        .block_on(crate::service::serve(index, a.static_dir, a.port))
        .map_err(|e| Error::io(format!("0.0.0.0:{}", a.port), e))
}
