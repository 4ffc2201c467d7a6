//! Reading and writing datasets and results.

mod csv_io;
mod geojson;
mod results;
mod svg;
pub mod synth;

use thiserror::Error;

use crate::geometry::{GeometryError, Kind, SegmentLike};

pub use csv_io::{
    load_points_csv, load_segments_csv, write_points_csv, write_points_to, write_segments_csv, write_segments_to,
    PointTable,
};
pub use geojson::{load_geojson, parse_geojson, BoundingBox, GeoJsonSegments};
pub use results::{ClusterEntry, Counts, ResultDocument};
pub use svg::{render_profile_svg, render_svg, write_svg};

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("bad header: {0}")]
    Header(String),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("SVG output needs 2-D data, got {0}-D")]
    NotPlanar(usize),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One segment as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRecord {
    pub id: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SegmentRecord {
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn to_segment(&self) -> Result<SegmentLike, GeometryError> {
        SegmentLike::from_coords(&self.x, &self.y, Kind::Segment)
    }
}

/// Converts records into segments, keeping the ids alongside.
pub fn to_segments(records: &[SegmentRecord]) -> Result<(Vec<SegmentLike>, Vec<String>), GeometryError> {
    let lines = records.iter().map(|r| r.to_segment()).collect::<Result<Vec<_>, _>>()?;
    Ok((lines, records.iter().map(|r| r.id.clone()).collect()))
}
