//! On-disk index layout: `manifest.json` plus one `region_<id>.jsonl` per
//! region, records sorted by (cell, ts, id).

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::{Index, IndexConfig, IngestStats, RegionIndex, StoredRecord};
use crate::error::{Error, Result};
use crate::geo::{Region, RegionSet, StreetGrid};

pub const INDEX_VERSION: &str = "1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Serialize, Deserialize)]
struct Manifest {
    version: String,
    config: IndexConfig,
    stats: IngestStats,
    day_range: Option<[i64; 2]>,
    regions: Vec<ManifestRegion>,
}

#[derive(Serialize, Deserialize)]
struct ManifestRegion {
    region_id: String,
    file: String,
    record_count: u64,
    bytes: u64,
    day_range: Option<[i64; 2]>,
    region: Region,
    grid: StreetGrid,
}

/// File name for a region, with bytes outside `[A-Za-z0-9._-]` hex-escaped.
pub fn region_file_name(region_id: &str) -> String {
    let mut s = String::from("region_");
    for b in region_id.bytes() {
        if b.is_ascii_alphanumeric() || b == b'-' || b == b'_' || b == b'.' {
            s.push(b as char);
        } else {
            s.push_str(&format!("%{b:02X}"));
        }
    }
    s.push_str(".jsonl");
    s
}

fn encode_records(records: &[StoredRecord]) -> Result<Vec<u8>> {
    let mut buf = Vec::with_capacity(records.len() * 96);
    for r in records {
        serde_json::to_writer(&mut buf, r)?;
        buf.push(b'\n');
    }
    Ok(buf)
}

pub fn persist_index(index: &Index, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("region_") && name.ends_with(".jsonl") {
            fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
        }
    }

    let encoded: Vec<Vec<u8>> = index
        .regions
        .par_iter()
        .map(|r| encode_records(&r.records))
        .collect::<Result<_>>()?;

    let mut regions = Vec::with_capacity(index.regions.len());
    for (r, bytes) in index.regions.iter().zip(encoded) {
        let file = region_file_name(r.region_id());
        let path = dir.join(&file);
        fs::write(&path, &bytes).map_err(|e| Error::io(&path, e))?;
        regions.push(ManifestRegion {
            region_id: r.region_id().to_string(),
            file,
            record_count: r.records.len() as u64,
            bytes: bytes.len() as u64,
            day_range: r.day_range().map(|(a, b)| [a, b]),
            region: r.region.clone(),
            grid: r.grid.clone(),
        });
    }
    let manifest = Manifest {
        version: INDEX_VERSION.to_string(),
        config: index.config,
        stats: index.stats,
        day_range: index.day_range().map(|(a, b)| [a, b]),
        regions,
    };
    let path = dir.join(MANIFEST_FILE);
    let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    w.write_all(b"\n").map_err(|e| Error::io(&path, e))?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(())
}

fn read_region(dir: &Path, m: &ManifestRegion) -> Result<Vec<StoredRecord>> {
    let corrupt = |detail: String| Error::CorruptRegion {
        region: m.region_id.clone(),
        detail,
    };
    let path = dir.join(&m.file);
    let f = File::open(&path).map_err(|e| corrupt(format!("{}: {e}", path.display())))?;
    let len = f.metadata().map_err(|e| Error::io(&path, e))?.len();
    if len != m.bytes {
        return Err(corrupt(format!("expected {} bytes, found {len}", m.bytes)));
    }
    let mut records = Vec::with_capacity(m.record_count as usize);
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| corrupt(format!("line {}: {e}", i + 1)))?;
        let rec: StoredRecord =
            serde_json::from_str(&line).map_err(|e| corrupt(format!("line {}: {e}", i + 1)))?;
        if rec.cell as usize >= m.grid.len() {
            return Err(corrupt(format!("line {}: cell {} outside grid", i + 1, rec.cell)));
        }
        records.push(rec);
    }
    if records.len() as u64 != m.record_count {
        return Err(corrupt(format!(
            "expected {} records, found {}",
            m.record_count,
            records.len()
        )));
    }
    Ok(records)
}

pub fn open_index(dir: &Path) -> Result<Index> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let raw: serde_json::Value = serde_json::from_str(&text)?;
    match raw.get("version") {
        Some(serde_json::Value::String(v)) if v == INDEX_VERSION => {}
        Some(serde_json::Value::String(v)) => return Err(Error::UnsupportedVersion(v.clone())),
        other => return Err(Error::UnsupportedVersion(other.map(|v| v.to_string()).unwrap_or_default())),
    }
    let manifest: Manifest = serde_json::from_value(raw)?;

    let records: Vec<Vec<StoredRecord>> = manifest
        .regions
        .par_iter()
        .map(|m| read_region(dir, m))
        .collect::<Result<_>>()?;

    let region_set = RegionSet::new(manifest.regions.iter().map(|m| m.region.clone()).collect())?;
    let regions = manifest
        .regions
        .into_iter()
        .zip(records)
        .zip(region_set.regions().iter().cloned())
        .map(|((m, records), region)| RegionIndex {
            region,
            grid: m.grid,
            records,
        })
        .collect();
    Ok(Index {
        config: manifest.config,
        stats: manifest.stats,
        regions,
    })
}
