//! Lifting points with one missing coordinate into segments.
//!
//! A record missing coordinate `k` becomes the axis-parallel segment of all
//! its possible completions, from `lo` to `hi` along axis `k`, carrying a
//! profile in `t` that weights the completions. Complete records become
//! degenerate segments without a profile.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{ClusterLabels, Label};
use crate::geometry::{GeometryError, Point, SegmentLike};
use crate::profile::Profile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiftError {
    #[error("record has {0} missing coordinates; at most one is supported")]
    TooManyMissing(usize),
    /// Axes are 0-based here; messages count from 1.
    #[error("axis {} is missing but has no declared domain", .0 + 1)]
    NoDomain(usize),
    #[error("record has {got} coordinates, expected {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("domain for axis {} needs lo < hi, got [{lo}, {hi}]", .axis + 1)]
    BadWindow { axis: usize, lo: f64, hi: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{} invalid record(s): {}", .0.len(), describe(.0))]
    Records(Vec<(usize, LiftError)>),
}

fn describe(errs: &[(usize, LiftError)]) -> String {
    const SHOWN: usize = 5;
    let mut s = errs
        .iter()
        .take(SHOWN)
        .map(|(i, e)| format!("record {}: {e}", i + 1))
        .collect::<Vec<_>>()
        .join("; ");
    if errs.len() > SHOWN {
        s.push_str(&format!("; and {} more", errs.len() - SHOWN));
    }
    s
}

/// Domain knowledge for one axis: the range of plausible values and how
/// they are weighted (as a profile over `t ∈ [0, 1]`, `t = 0 ↔ lo`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisDomain {
    pub axis: usize,
    pub lo: f64,
    pub hi: f64,
    pub template: Profile,
}

impl AxisDomain {
    pub fn new(axis: usize, lo: f64, hi: f64, template: Profile) -> Result<Self, LiftError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(LiftError::BadWindow { axis, lo, hi });
        }
        Ok(AxisDomain { axis, lo, hi, template })
    }

    /// Uniform weighting over `[lo, hi]`.
    pub fn uniform(axis: usize, lo: f64, hi: f64) -> Result<Self, LiftError> {
        Self::new(axis, lo, hi, Profile::Uniform { a: 0.0, b: 1.0 })
    }
}

pub type AxisDomains = BTreeMap<usize, AxisDomain>;

/// A record together with the segment it lifts to.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPoint {
    pub original: Vec<Option<f64>>,
    pub missing_axis: Option<usize>,
    pub segment: SegmentLike,
    pub profile: Option<Profile>,
    pub source_id: String,
}

pub fn lift(id: &str, record: &[Option<f64>], domains: &AxisDomains) -> Result<LiftedPoint, LiftError> {
    let missing: Vec<usize> = record
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_none())
        .map(|(i, _)| i)
        .collect();
    if missing.len() > 1 {
        return Err(LiftError::TooManyMissing(missing.len()));
    }
    let filled = |v: f64| -> Vec<f64> { record.iter().map(|c| c.unwrap_or(v)).collect() };
    let (segment, profile, missing_axis) = match missing.first() {
        None => (SegmentLike::point(Point::new(filled(0.0))?), None, None),
        Some(&k) => {
            let d = domains.get(&k).ok_or(LiftError::NoDomain(k))?;
            let seg = SegmentLike::segment(Point::new(filled(d.lo))?, Point::new(filled(d.hi))?)?;
            (seg, Some(d.template), Some(k))
        }
    };
    Ok(LiftedPoint {
        original: record.to_vec(),
        missing_axis,
        segment,
        profile,
        source_id: id.to_string(),
    })
}

/// Order-preserving lift of a whole dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedDataset {
    pub lines: Vec<SegmentLike>,
    pub profiles: Vec<Option<Profile>>,
    pub ids: Vec<String>,
    pub missing_axis: Vec<Option<usize>>,
}

impl LiftedDataset {
    /// Source id with its final label, in input order.
    pub fn labels_by_source(&self, labels: &ClusterLabels) -> Vec<(String, Label)> {
        self.ids.iter().cloned().zip(labels.assignment.iter().copied()).collect()
    }
}

/// Lifts every record; all failures are reported together with their
/// record index.
pub fn lift_dataset<S: AsRef<str>>(
    records: &[(S, Vec<Option<f64>>)],
    domains: &AxisDomains,
) -> Result<LiftedDataset, LiftError> {
    let dim = records.first().map_or(0, |r| r.1.len());
    let mut out = LiftedDataset {
        lines: Vec::with_capacity(records.len()),
        profiles: Vec::with_capacity(records.len()),
        ids: Vec::with_capacity(records.len()),
        missing_axis: Vec::with_capacity(records.len()),
    };
    let mut errors = Vec::new();
    for (i, (id, rec)) in records.iter().enumerate() {
        if rec.len() != dim {
            errors.push((i, LiftError::Dimension { got: rec.len(), expected: dim }));
            continue;
        }
        match lift(id.as_ref(), rec, domains) {
            Ok(lp) => {
                out.lines.push(lp.segment);
                out.profiles.push(lp.profile);
                out.ids.push(lp.source_id);
                out.missing_axis.push(lp.missing_axis);
            }
            Err(e) => errors.push((i, e)),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(LiftError::Records(errors))
    }
}
