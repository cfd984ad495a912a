use std::collections::BTreeMap;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One geotagged capture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
    pub ts: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brightness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device_id: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectedObject {
    pub class: String,
    pub confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<[f64; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionSet {
    pub image_id: String,
    pub objects: Vec<DetectedObject>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" | "json" | "ndjson" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Invalid(format!("unknown record format {other:?}"))),
        }
    }
}

impl Format {
    /// Guess from a file extension, defaulting to JSONL.
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Jsonl,
        }
    }
}

/// Strict parsing aborts at the first bad line; lenient parsing skips it and
/// records the issue.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineIssue {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Parsed<T> {
    pub items: Vec<T>,
    pub skipped: Vec<LineIssue>,
}

impl<T> Parsed<T> {
    fn push(&mut self, mode: ParseMode, line: usize, item: std::result::Result<T, String>) -> Result<()> {
        match item {
            Ok(v) => self.items.push(v),
            Err(message) if mode == ParseMode::Lenient => self.skipped.push(LineIssue { line, message }),
            Err(message) => return Err(Error::line(line, message)),
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct RawRecord {
    id: Option<String>,
    lat: Option<f64>,
    lon: Option<f64>,
    ts: Option<i64>,
    brightness: Option<f64>,
    device_id: Option<String>,
}

fn validate(raw: RawRecord) -> std::result::Result<ImageRecord, String> {
    let id = raw.id.ok_or("missing field id")?;
    if id.is_empty() {
        return Err("empty id".into());
    }
    let lat = raw.lat.ok_or("missing field lat")?;
    let lon = raw.lon.ok_or("missing field lon")?;
    let ts = raw.ts.ok_or("missing field ts")?;
    if !(-90.0..=90.0).contains(&lat) {
        return Err("lat out of range".into());
    }
    if !(-180.0..=180.0).contains(&lon) {
        return Err("lon out of range".into());
    }
    if ts <= 0 {
        return Err("ts must be positive".into());
    }
    if let Some(b) = raw.brightness {
        if !(0.0..=1.0).contains(&b) {
            return Err("brightness out of range".into());
        }
    }
    Ok(ImageRecord {
        id,
        lat,
        lon,
        ts,
        brightness: raw.brightness,
        device_id: raw.device_id.filter(|d| !d.is_empty()),
    })
}

/// Parse image records in input order. Line numbers are 1-based and count
/// the CSV header.
pub fn parse_records<R: BufRead>(reader: R, format: Format, mode: ParseMode) -> Result<Parsed<ImageRecord>> {
    match format {
        Format::Jsonl => parse_records_jsonl(reader, mode),
        Format::Csv => parse_records_csv(reader, mode),
    }
}

fn parse_records_jsonl<R: BufRead>(reader: R, mode: ParseMode) -> Result<Parsed<ImageRecord>> {
    let mut out = Parsed {
        items: Vec::new(),
        skipped: Vec::new(),
    };
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::line(i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str::<RawRecord>(&line)
            .map_err(|e| format!("malformed record: {e}"))
            .and_then(validate);
        out.push(mode, i + 1, item)?;
    }
    Ok(out)
}

const CSV_COLUMNS: [&str; 6] = ["id", "lat", "lon", "ts", "brightness", "device_id"];

fn parse_records_csv<R: BufRead>(reader: R, mode: ParseMode) -> Result<Parsed<ImageRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::line(1, e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let idx: Vec<Option<usize>> = CSV_COLUMNS.iter().map(|c| col(c)).collect();
    if let Some(missing) = ["id", "lat", "lon", "ts"].iter().find(|c| col(c).is_none()) {
        return Err(Error::line(1, format!("header lacks column {missing}")));
    }

    let mut out = Parsed {
        items: Vec::new(),
        skipped: Vec::new(),
    };
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                out.push(mode, line, Err(format!("malformed row: {e}")))?;
                continue;
            }
        };
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |k: usize| {
            idx[k]
                .and_then(|i| row.get(i))
                .map(str::trim)
                .filter(|s| !s.is_empty())
        };
        let num = |k: usize| -> std::result::Result<Option<f64>, String> {
            field(k)
                .map(|s| s.parse::<f64>().map_err(|_| format!("{} is not a number", CSV_COLUMNS[k])))
                .transpose()
        };
        let item = (|| {
            let ts = field(3)
                .map(|s| s.parse::<i64>().map_err(|_| "ts is not an integer".to_string()))
                .transpose()?;
            validate(RawRecord {
                id: field(0).map(str::to_string),
                lat: num(1)?,
                lon: num(2)?,
                ts,
                brightness: num(4)?,
                device_id: field(5).map(str::to_string),
            })
        })();
        out.push(mode, line, item)?;
    }
    Ok(out)
}

/// Parse a detections JSONL stream. Lines repeating an `image_id` append
/// their objects to the earlier entry.
pub fn parse_detections<R: BufRead>(reader: R, mode: ParseMode) -> Result<Parsed<DetectionSet>> {
    let mut merged: BTreeMap<String, Vec<DetectedObject>> = BTreeMap::new();
    let mut out = Parsed {
        items: Vec::new(),
        skipped: Vec::new(),
    };
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::line(i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str::<DetectionSet>(&line)
            .map_err(|e| format!("malformed detection line: {e}"))
            .and_then(|d| {
                if d.image_id.is_empty() {
                    return Err("empty image_id".to_string());
                }
                if let Some(o) = d.objects.iter().find(|o| !(0.0..=1.0).contains(&o.confidence)) {
                    return Err(format!("confidence {} out of range [0, 1]", o.confidence));
                }
                Ok(d)
            });
        match item {
            Ok(d) => merged.entry(d.image_id).or_default().extend(d.objects),
            Err(message) if mode == ParseMode::Lenient => out.skipped.push(LineIssue { line: i + 1, message }),
            Err(message) => return Err(Error::line(i + 1, message)),
        }
    }
    out.items = merged
        .into_iter()
        .map(|(image_id, objects)| DetectionSet { image_id, objects })
        .collect();
    Ok(out)
}

/// Detections keyed by image id.
pub fn detections_by_image(sets: Vec<DetectionSet>) -> BTreeMap<String, DetectionSet> {
    let mut map: BTreeMap<String, DetectionSet> = BTreeMap::new();
    for d in sets {
        match map.get_mut(&d.image_id) {
            Some(existing) => existing.objects.extend(d.objects),
            None => {
                map.insert(d.image_id.clone(), d);
            }
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jsonl(text: &str, mode: ParseMode) -> Result<Parsed<ImageRecord>> {
        parse_records(text.as_bytes(), Format::Jsonl, mode)
    }

    #[test]
    fn minimal_row() {
        let p = jsonl(r#"{"id":"a","lat":40.7,"lon":-73.9,"ts":1601900000}"#, ParseMode::Strict).unwrap();
        assert_eq!(p.items.len(), 1);
        assert_eq!(p.items[0].ts, 1601900000);
        assert_eq!(p.items[0].brightness, None);
    }

    #[test]
    fn lat_out_of_range_reports_line() {
        let text = "{\"id\":\"a\",\"lat\":40.7,\"lon\":-73.9,\"ts\":1}\n{\"id\":\"b\",\"lat\":95.0,\"lon\":0,\"ts\":1}\n";
        let err = jsonl(text, ParseMode::Strict).unwrap_err();
        match err {
            Error::Line { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("lat out of range"));
            }
            e => panic!("{e}"),
        }
        let lenient = jsonl(text, ParseMode::Lenient).unwrap();
        assert_eq!(lenient.items.len(), 1);
        assert_eq!(lenient.skipped[0].line, 2);
    }

    #[test]
    fn missing_field_and_malformed() {
        let e = jsonl(r#"{"id":"a","lat":40.7,"ts":1}"#, ParseMode::Strict).unwrap_err();
        assert!(e.to_string().contains("missing field lon"), "{e}");
        let e = jsonl("{not json", ParseMode::Strict).unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
        let e = jsonl(r#"{"id":"a","lat":1,"lon":1,"ts":0}"#, ParseMode::Strict).unwrap_err();
        assert!(e.to_string().contains("ts must be positive"));
    }

    #[test]
    fn csv_matches_jsonl() {
        let j = "{\"id\":\"a\",\"lat\":40.7,\"lon\":-73.9,\"ts\":1601900000,\"brightness\":0.4}\n\
                 {\"id\":\"b\",\"lat\":40.71,\"lon\":-73.95,\"ts\":1601900600,\"device_id\":\"d1\"}\n";
        let c = "id,lat,lon,ts,brightness,device_id\n\
                 a,40.7,-73.9,1601900000,0.4,\n\
                 b,40.71,-73.95,1601900600,,d1\n";
        let pj = jsonl(j, ParseMode::Strict).unwrap();
        let pc = parse_records(c.as_bytes(), Format::Csv, ParseMode::Strict).unwrap();
        assert_eq!(pj.items, pc.items);
    }

    #[test]
    fn csv_error_line_numbers() {
        let c = "id,lat,lon,ts,brightness,device_id\na,40.7,-73.9,1,,\nb,abc,-73.9,1,,\n";
        let e = parse_records(c.as_bytes(), Format::Csv, ParseMode::Strict).unwrap_err();
        assert!(matches!(e, Error::Line { line: 3, .. }), "{e}");
    }

    #[test]
    fn detections_merge_and_validate() {
        let one = r#"{"image_id":"a","objects":[{"class":"car","confidence":0.9}]}"#;
        let p = parse_detections(one.as_bytes(), ParseMode::Strict).unwrap();
        assert_eq!(p.items.len(), 1);

        let two = "{\"image_id\":\"a\",\"objects\":[{\"class\":\"car\",\"confidence\":0.9}]}\n\
                   {\"image_id\":\"a\",\"objects\":[{\"class\":\"bus\",\"confidence\":0.5},{\"class\":\"sign\",\"confidence\":0.7,\"bbox\":[1,2,3,4]}]}\n";
        let p = parse_detections(two.as_bytes(), ParseMode::Strict).unwrap();
        assert_eq!(p.items.len(), 1);
        assert_eq!(p.items[0].objects.len(), 3);
        assert_eq!(p.items[0].objects[2].bbox, Some([1.0, 2.0, 3.0, 4.0]));

        let bad = r#"{"image_id":"a","objects":[{"class":"car","confidence":1.3}]}"#;
        let e = parse_detections(bad.as_bytes(), ParseMode::Strict).unwrap_err();
        assert!(matches!(e, Error::Line { line: 1, .. }));
    }
}
