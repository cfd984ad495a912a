//! Minimal GeoJSON (RFC 7946) reading for street networks and region polygons.

use serde_json::Value;

use super::projection::LatLon;
use super::region::{Region, RegionSet};
use crate::error::{Error, Result};

/// One street polyline as read from the network file, before it is
/// attached to a region.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkLine {
    /// Explicit `region_id` property, when the feature carries one.
    pub region_id: Option<String>,
    pub vertices: Vec<LatLon>,
}

fn features(text: &str) -> Result<Vec<Value>> {
    let root: Value = serde_json::from_str(text)?;
    match root.get("type").and_then(Value::as_str) {
        Some("FeatureCollection") => match root.get("features") {
            Some(Value::Array(f)) => Ok(f.clone()),
            _ => Err(Error::GeoJson("FeatureCollection without features array".into())),
        },
        Some("Feature") => Ok(vec![root]),
        other => Err(Error::GeoJson(format!(
            "expected FeatureCollection, got {:?}",
            other.unwrap_or("none")
        ))),
    }
}

fn position(v: &Value, feature: usize) -> Result<LatLon> {
    let arr = v
        .as_array()
        .filter(|a| a.len() >= 2)
        .ok_or_else(|| Error::GeoJson(format!("feature {feature}: bad position")))?;
    let lon = arr[0].as_f64();
    let lat = arr[1].as_f64();
    match (lat, lon) {
        (Some(lat), Some(lon)) => {
            let p = LatLon::new(lat, lon);
            if !p.is_valid() {
                return Err(Error::GeoJson(format!(
                    "feature {feature}: position ({lon}, {lat}) out of range"
                )));
            }
            Ok(p)
        }
        _ => Err(Error::GeoJson(format!("feature {feature}: non-numeric position"))),
    }
}

fn positions(v: &Value, feature: usize) -> Result<Vec<LatLon>> {
    v.as_array()
        .ok_or_else(|| Error::GeoJson(format!("feature {feature}: expected position array")))?
        .iter()
        .map(|p| position(p, feature))
        .collect()
}

fn line(v: &Value, feature: usize) -> Result<Vec<LatLon>> {
    let pts = positions(v, feature)?;
    if pts.len() < 2 {
        return Err(Error::GeoJson(format!(
            "feature {feature}: line with fewer than 2 vertices"
        )));
    }
    Ok(pts)
}

fn ring(v: &Value, feature: usize) -> Result<Vec<LatLon>> {
    let pts = positions(v, feature)?;
    if pts.len() < 4 {
        return Err(Error::GeoJson(format!(
            "feature {feature}: ring with fewer than 4 positions"
        )));
    }
    if pts.first() != pts.last() {
        return Err(Error::GeoJson(format!("feature {feature}: unclosed ring")));
    }
    Ok(pts)
}

fn polygon(v: &Value, feature: usize) -> Result<Vec<Vec<LatLon>>> {
    let rings = v
        .as_array()
        .filter(|r| !r.is_empty())
        .ok_or_else(|| Error::GeoJson(format!("feature {feature}: empty polygon")))?;
    rings.iter().map(|r| ring(r, feature)).collect()
}

fn geometry(f: &Value, i: usize) -> Result<(&str, &Value)> {
    let geom = f
        .get("geometry")
        .ok_or_else(|| Error::GeoJson(format!("feature {i}: missing geometry")))?;
    let ty = geom
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::GeoJson(format!("feature {i}: geometry without type")))?;
    let coords = geom
        .get("coordinates")
        .ok_or_else(|| Error::GeoJson(format!("feature {i}: geometry without coordinates")))?;
    Ok((ty, coords))
}

fn region_id_property(f: &Value) -> Option<String> {
    match f.get("properties")?.get("region_id")? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Read LineString / MultiLineString features. Each part becomes one line.
pub fn load_network(text: &str) -> Result<Vec<NetworkLine>> {
    let mut out = Vec::new();
    for (i, f) in features(text)?.iter().enumerate() {
        let (ty, coords) = geometry(f, i)?;
        let region_id = region_id_property(f);
        match ty {
            "LineString" => out.push(NetworkLine {
                region_id,
                vertices: line(coords, i)?,
            }),
            "MultiLineString" => {
                let parts = coords.as_array().ok_or_else(|| {
                    Error::GeoJson(format!("feature {i}: MultiLineString coordinates"))
                })?;
                for part in parts {
                    out.push(NetworkLine {
                        region_id: region_id.clone(),
                        vertices: line(part, i)?,
                    });
                }
            }
            other => {
                return Err(Error::GeoJson(format!(
                    "feature {i}: unsupported geometry type {other:?} for a street network"
                )))
            }
        }
    }
    Ok(out)
}

/// Read Polygon / MultiPolygon features carrying a `region_id` property.
/// Features sharing a `region_id` are rejected.
pub fn load_regions(text: &str) -> Result<RegionSet> {
    let mut regions = Vec::new();
    for (i, f) in features(text)?.iter().enumerate() {
        let region_id = region_id_property(f)
            .ok_or_else(|| Error::GeoJson(format!("feature {i}: missing region_id property")))?;
        let (ty, coords) = geometry(f, i)?;
        let polygons = match ty {
            "Polygon" => vec![polygon(coords, i)?],
            "MultiPolygon" => coords
                .as_array()
                .ok_or_else(|| Error::GeoJson(format!("feature {i}: MultiPolygon coordinates")))?
                .iter()
                .map(|p| polygon(p, i))
                .collect::<Result<_>>()?,
            other => {
                return Err(Error::GeoJson(format!(
                    "feature {i}: unsupported geometry type {other:?} for a region"
                )))
            }
        };
        regions.push(Region::new(region_id, polygons));
    }
    RegionSet::new(regions)
}
