//! Segment and point CSV files.
//!
//! Segments: header `id,x1,..,xn,y1,..,yn`. Points: header `id,<n names>`,
//! with an empty field or `NA` (any case) marking a missing value.

use std::path::Path;

use super::{DataError, SegmentRecord};

fn parse_err(line: u64, message: impl Into<String>) -> DataError {
    DataError::Parse {
        line,
        message: message.into(),
    }
}

fn record_line(rec: &csv::StringRecord, fallback: u64) -> u64 {
    rec.position().map_or(fallback, |p| p.line())
}

fn map_csv(e: csv::Error) -> DataError {
    let line = e.position().map_or(0, |p| p.line());
    match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            parse_err(line, format!("expected {expected_len} fields, found {len}"))
        }
        _ if e.is_io_error() => match e.into_kind() {
            csv::ErrorKind::Io(io) => DataError::Io(io),
            _ => unreachable!(),
        },
        _ => parse_err(line, e.to_string()),
    }
}

fn parse_coord(field: &str, line: u64, col: &str) -> Result<f64, DataError> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("column {col}: `{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("column {col}: non-finite value `{field}`")));
    }
    Ok(v)
}

pub fn load_segments_csv(path: impl AsRef<Path>) -> Result<Vec<SegmentRecord>, DataError> {
    let reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(map_csv)?;
    read_segments(reader)
}

pub(crate) fn read_segments<R: std::io::Read>(mut reader: csv::Reader<R>) -> Result<Vec<SegmentRecord>, DataError> {
    let header: Vec<String> = reader.headers().map_err(map_csv)?.iter().map(str::to_string).collect();
    if header.len() < 3 || !(header.len() - 1).is_multiple_of(2) || header[0] != "id" {
        return Err(DataError::Header(format!(
            "expected `id,x1..xn,y1..yn`, got `{}`",
            header.join(",")
        )));
    }
    let n = (header.len() - 1) / 2;
    for k in 0..n {
        let (xe, ye) = (format!("x{}", k + 1), format!("y{}", k + 1));
        if header[1 + k] != xe || header[1 + n + k] != ye {
            return Err(DataError::Header(format!(
                "expected columns x1..x{n},y1..y{n}, got `{}`",
                header[1..].join(",")
            )));
        }
    }
    let mut out = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(map_csv)?;
        let line = record_line(&rec, row as u64 + 2);
        let coords = (1..rec.len())
            .map(|c| parse_coord(&rec[c], line, &header[c]))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(SegmentRecord {
            id: rec[0].to_string(),
            x: coords[..n].to_vec(),
            y: coords[n..].to_vec(),
        });
    }
    Ok(out)
}

/// Writes segments with shortest round-trip float formatting.
pub fn write_segments_csv(records: &[SegmentRecord], path: impl AsRef<Path>) -> Result<(), DataError> {
    let file = std::fs::File::create(path)?;
    write_segments_to(records, file)
}

/// Like [`write_segments_csv`], to any writer.
pub fn write_segments_to<W: std::io::Write>(records: &[SegmentRecord], w: W) -> Result<(), DataError> {
    let n = records.first().map_or(2, |r| r.dim());
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["id".to_string()];
    header.extend((1..=n).map(|k| format!("x{k}")));
    header.extend((1..=n).map(|k| format!("y{k}")));
    wtr.write_record(&header).map_err(map_csv)?;
    for r in records {
        if r.dim() != n || r.y.len() != n {
            return Err(DataError::Invalid(format!("record `{}` has mixed dimensions", r.id)));
        }
        let mut row = vec![r.id.clone()];
        row.extend(r.x.iter().chain(&r.y).map(|v| v.to_string()));
        wtr.write_record(&row).map_err(map_csv)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Points with possibly missing coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTable {
    pub columns: Vec<String>,
    pub records: Vec<(String, Vec<Option<f64>>)>,
}

fn is_missing(field: &str) -> bool {
    let f = field.trim();
    f.is_empty() || f.eq_ignore_ascii_case("na")
}

pub fn load_points_csv(path: impl AsRef<Path>) -> Result<PointTable, DataError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(map_csv)?;
    let header: Vec<String> = reader.headers().map_err(map_csv)?.iter().map(str::to_string).collect();
    if header.len() < 2 || header[0] != "id" {
        return Err(DataError::Header(format!("expected `id,...`, got `{}`", header.join(","))));
    }
    let mut records = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(map_csv)?;
        let line = record_line(&rec, row as u64 + 2);
        let vals = (1..rec.len())
            .map(|c| {
                if is_missing(&rec[c]) {
                    Ok(None)
                } else {
                    parse_coord(&rec[c], line, &header[c]).map(Some)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        records.push((rec[0].to_string(), vals));
    }
    Ok(PointTable {
        columns: header[1..].to_vec(),
        records,
    })
}

pub fn write_points_csv(table: &PointTable, path: impl AsRef<Path>) -> Result<(), DataError> {
    write_points_to(table, std::fs::File::create(path)?)
}

pub fn write_points_to<W: std::io::Write>(table: &PointTable, w: W) -> Result<(), DataError> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["id".to_string()];
    header.extend(table.columns.iter().cloned());
    wtr.write_record(&header).map_err(map_csv)?;
    for (id, vals) in &table.records {
        let mut row = vec![id.clone()];
        row.extend(vals.iter().map(|v| v.map_or_else(|| "NA".to_string(), |x| x.to_string())));
        wtr.write_record(&row).map_err(map_csv)?;
    }
    wtr.flush()?;
    Ok(())
}
