//! GeoJSON polylines as segments.
//!
//! Coordinates are used as-is (lon/lat degrees); no projection.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{DataError, SegmentRecord};

/// Axis-aligned crop window; a segment is kept when both ends lie inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BoundingBox {
    pub fn contains(&self, p: &[f64]) -> bool {
        (self.min_x..=self.max_x).contains(&p[0]) && (self.min_y..=self.max_y).contains(&p[1])
    }
}

impl std::str::FromStr for BoundingBox {
    type Err = String;

    /// `min_x,min_y,max_x,max_y`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        match v[..] {
            [min_x, min_y, max_x, max_y] if min_x <= max_x && min_y <= max_y => Ok(BoundingBox {
                min_x,
                min_y,
                max_x,
                max_y,
            }),
            [_, _, _, _] => Err("crop box needs min <= max".into()),
            _ => Err(format!("expected 4 numbers, got {}", v.len())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeoJsonSegments {
    pub records: Vec<SegmentRecord>,
    pub warnings: Vec<String>,
}

impl GeoJsonSegments {
    fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.warnings.push(msg);
    }
}

pub fn load_geojson(path: impl AsRef<Path>, crop: Option<BoundingBox>) -> Result<GeoJsonSegments, DataError> {
    let text = std::fs::read_to_string(path)?;
    parse_geojson(&text, crop)
}

pub fn parse_geojson(text: &str, crop: Option<BoundingBox>) -> Result<GeoJsonSegments, DataError> {
    let root: Value = serde_json::from_str(text)?;
    let mut out = GeoJsonSegments::default();
    let mut cropped = 0usize;
    match root.get("type").and_then(Value::as_str) {
        Some("FeatureCollection") => {
            let features = root
                .get("features")
                .and_then(Value::as_array)
                .ok_or_else(|| DataError::Invalid("FeatureCollection without `features`".into()))?;
            for (i, f) in features.iter().enumerate() {
                feature(f, i, crop, &mut out, &mut cropped)?;
            }
        }
        Some("Feature") => feature(&root, 0, crop, &mut out, &mut cropped)?,
        Some(_) => {
            let mut ordinal = 0;
            geometry(&root, "0", crop, &mut out, &mut ordinal, &mut cropped)?;
        }
        None => return Err(DataError::Invalid("missing `type` member".into())),
    }
    if cropped > 0 {
        out.warn(format!("{cropped} segment(s) outside the crop box were dropped"));
    }
    if out.records.is_empty() {
        out.warn("no line segments found".into());
    }
    Ok(out)
}

fn feature_id(f: &Value, index: usize) -> String {
    match f.get("id") {
        Some(Value::String(s)) => return s.clone(),
        Some(Value::Number(n)) => return n.to_string(),
        _ => {}
    }
    if let Some(name) = f.pointer("/properties/name").and_then(Value::as_str) {
        return name.to_string();
    }
    format!("f{index}")
}

fn feature(
    f: &Value,
    index: usize,
    crop: Option<BoundingBox>,
    out: &mut GeoJsonSegments,
    cropped: &mut usize,
) -> Result<(), DataError> {
    let id = feature_id(f, index);
    match f.get("geometry") {
        Some(Value::Null) | None => {
            out.warn(format!("feature `{id}` has no geometry; skipped"));
            Ok(())
        }
        Some(g) => {
            let mut ordinal = 0;
            geometry(g, &id, crop, out, &mut ordinal, cropped)
        }
    }
}

fn geometry(
    g: &Value,
    id: &str,
    crop: Option<BoundingBox>,
    out: &mut GeoJsonSegments,
    ordinal: &mut usize,
    cropped: &mut usize,
) -> Result<(), DataError> {
    let kind = g.get("type").and_then(Value::as_str).unwrap_or("");
    let coords = g.get("coordinates");
    match kind {
        "LineString" => polyline(coords, id, crop, out, ordinal, cropped),
        "MultiLineString" => {
            let parts = coords
                .and_then(Value::as_array)
                .ok_or_else(|| DataError::Invalid(format!("`{id}`: MultiLineString without coordinates")))?;
            for part in parts {
                polyline(Some(part), id, crop, out, ordinal, cropped)?;
            }
            Ok(())
        }
        "GeometryCollection" => {
            for sub in g.get("geometries").and_then(Value::as_array).into_iter().flatten() {
                geometry(sub, id, crop, out, ordinal, cropped)?;
            }
            Ok(())
        }
        other => {
            out.warn(format!("`{id}`: skipping non-line geometry `{other}`"));
            Ok(())
        }
    }
}

fn position(v: &Value, id: &str) -> Result<[f64; 2], DataError> {
    let bad = || DataError::Invalid(format!("`{id}`: malformed position {v}"));
    let arr = v.as_array().ok_or_else(bad)?;
    if arr.len() < 2 {
        return Err(bad());
    }
    let x = arr[0].as_f64().ok_or_else(bad)?;
    let y = arr[1].as_f64().ok_or_else(bad)?;
    Ok([x, y])
}

fn polyline(
    coords: Option<&Value>,
    id: &str,
    crop: Option<BoundingBox>,
    out: &mut GeoJsonSegments,
    ordinal: &mut usize,
    cropped: &mut usize,
) -> Result<(), DataError> {
    let verts = coords
        .and_then(Value::as_array)
        .ok_or_else(|| DataError::Invalid(format!("`{id}`: LineString without coordinates")))?
        .iter()
        .map(|v| position(v, id))
        .collect::<Result<Vec<_>, _>>()?;
    for w in verts.windows(2) {
        let k = *ordinal;
        *ordinal += 1;
        if let Some(b) = crop {
            if !(b.contains(&w[0]) && b.contains(&w[1])) {
                *cropped += 1;
                continue;
            }
        }
        out.records.push(SegmentRecord {
            id: format!("{id}-{k}"),
            x: w[0].to_vec(),
            y: w[1].to_vec(),
        });
    }
    Ok(())
}
