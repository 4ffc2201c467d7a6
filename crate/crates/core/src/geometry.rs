//! Points, lines and line segments in ℝⁿ.
//!
//! A [`SegmentLike`] is stored as two points `x`, `y` together with its
//! parametrisation `g(t) = x + (y - x) t`. Lines use `t ∈ ℝ`, segments use
//! `t ∈ [0, 1]`. Segments with `x = y` are allowed and behave as a single
//! point; the missing-data adapter relies on them for complete records.
//!
//! All distances are Euclidean. Hot paths work on squared distances and only
//! take the root when a value leaves this module.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("point must have at least one coordinate")]
    Empty,
    #[error("coordinate {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("a line needs two distinct points")]
    CoincidentLinePoints,
    #[error("parameter t = {0} lies outside [0, 1]")]
    OutsideDomain(f64),
    #[error("a line has infinite length")]
    InfiniteLength,
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// A point in ℝⁿ with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(GeometryError::Empty);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(GeometryError::NonFinite { index, value });
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn distance(&self, other: &Point) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(dist2(&self.0, &other.0).sqrt())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = GeometryError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Line,
    Segment,
}

/// A line or line segment through `x` and `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentLike {
    x: Point,
    y: Point,
    kind: Kind,
}

impl SegmentLike {
    pub fn new(x: Point, y: Point, kind: Kind) -> Result<Self> {
        check_dim(x.dim(), y.dim())?;
        if kind == Kind::Line && x == y {
            return Err(GeometryError::CoincidentLinePoints);
        }
        Ok(SegmentLike { x, y, kind })
    }

    pub fn segment(x: Point, y: Point) -> Result<Self> {
        Self::new(x, y, Kind::Segment)
    }

    pub fn line(x: Point, y: Point) -> Result<Self> {
        Self::new(x, y, Kind::Line)
    }

    /// Convenience constructor from raw coordinates.
    pub fn from_coords(x: &[f64], y: &[f64], kind: Kind) -> Result<Self> {
        Self::new(Point::new(x.to_vec())?, Point::new(y.to_vec())?, kind)
    }

    /// Degenerate segment standing for a single point.
    pub fn point(p: Point) -> Self {
        SegmentLike {
            y: p.clone(),
            x: p,
            kind: Kind::Segment,
        }
    }

    pub fn x(&self) -> &Point {
        &self.x
    }

    pub fn y(&self) -> &Point {
        &self.y
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn is_degenerate(&self) -> bool {
        self.x == self.y
    }

    /// Direction vector `y - x`.
    pub fn direction(&self) -> Vec<f64> {
        sub(&self.y.0, &self.x.0)
    }

    /// Parameter domain as `(lo, hi)`; infinite for lines.
    pub fn domain(&self) -> (f64, f64) {
        match self.kind {
            Kind::Line => (f64::NEG_INFINITY, f64::INFINITY),
            Kind::Segment => (0.0, 1.0),
        }
    }

    /// `g(t) = x + (y - x) t`.
    pub fn param_point(&self, t: f64) -> Result<Point> {
        if self.kind == Kind::Segment && !(0.0..=1.0).contains(&t) {
            return Err(GeometryError::OutsideDomain(t));
        }
        Ok(Point(self.eval(t)))
    }

    /// `g(t)` without the domain check. Callers guarantee `t` is admissible.
    pub(crate) fn eval(&self, t: f64) -> Vec<f64> {
        self.x
            .0
            .iter()
            .zip(&self.y.0)
            .map(|(&a, &b)| a + (b - a) * t)
            .collect()
    }

    pub fn length(&self) -> Result<f64> {
        match self.kind {
            Kind::Line => Err(GeometryError::InfiniteLength),
            Kind::Segment => Ok(dist2(&self.x.0, &self.y.0).sqrt()),
        }
    }

    /// Euclidean norm of `y - x`; finite for both kinds.
    pub fn direction_norm(&self) -> f64 {
        dist2(&self.x.0, &self.y.0).sqrt()
    }
}

/// Closest point of a line or segment to a query point.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosestPointResult {
    pub t_star: f64,
    pub point: Point,
    pub distance: f64,
}

pub fn closest_point(p: &Point, l: &SegmentLike) -> Result<ClosestPointResult> {
    check_dim(p.dim(), l.dim())?;
    let (t_star, d2) = closest_param(&p.0, l);
    Ok(ClosestPointResult {
        t_star,
        point: Point(l.eval(t_star)),
        distance: d2.sqrt(),
    })
}

/// Foot-of-perpendicular parameter (clamped for segments) and the squared
/// distance. Dimensions are assumed to match.
pub(crate) fn closest_param(p: &[f64], l: &SegmentLike) -> (f64, f64) {
    let x = &l.x.0;
    let y = &l.y.0;
    let mut dd = 0.0;
    let mut pd = 0.0;
    for i in 0..x.len() {
        let d = y[i] - x[i];
        dd += d * d;
        pd += (p[i] - x[i]) * d;
    }
    let t = if dd == 0.0 {
        0.0
    } else {
        let t = pd / dd;
        match l.kind {
            Kind::Line => t,
            Kind::Segment => t.clamp(0.0, 1.0),
        }
    };
    (t, dist2_to_param(p, l, t))
}

fn dist2_to_param(p: &[f64], l: &SegmentLike, t: f64) -> f64 {
    let x = &l.x.0;
    let y = &l.y.0;
    let mut s = 0.0;
    for i in 0..x.len() {
        let q = x[i] + (y[i] - x[i]) * t;
        s += (p[i] - q) * (p[i] - q);
    }
    s
}

/// Minimum distance between two lines/segments with achieving parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinDistance {
    pub distance: f64,
    pub t1: f64,
    pub t2: f64,
}

/// Infimum of `‖g₁(t₁) − g₂(t₂)‖` over both parameter domains.
///
/// The unconstrained minimiser of the quadratic comes from the 2×2 normal
/// equations. When it falls outside a segment's domain, or the directions are
/// parallel or degenerate, the minimum lies on the boundary of the domain and
/// is found by solving the point-to-line subproblem on each boundary edge.
/// For parallel lines the pair `(0, t₂)` with `t₂` the foot of `x₁` on the
/// second line is returned.
pub fn min_distance(l1: &SegmentLike, l2: &SegmentLike) -> Result<MinDistance> {
    check_dim(l1.dim(), l2.dim())?;
    let (t1, t2, d2) = min_distance_sq(l1, l2);
    Ok(MinDistance {
        distance: d2.sqrt(),
        t1,
        t2,
    })
}

/// Squared-distance core of [`min_distance`]; dimensions assumed equal.
pub(crate) fn min_distance_sq(l1: &SegmentLike, l2: &SegmentLike) -> (f64, f64, f64) {
    let (x1, y1) = (&l1.x.0, &l1.y.0);
    let (x2, y2) = (&l2.x.0, &l2.y.0);
    let (mut a, mut b, mut c, mut d, mut e) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..x1.len() {
        let d1 = y1[i] - x1[i];
        let d2 = y2[i] - x2[i];
        let r = x1[i] - x2[i];
        a += d1 * d1;
        b += d1 * d2;
        c += d2 * d2;
        d += d1 * r;
        e += d2 * r;
    }
    let det = a * c - b * b;
    // Relative threshold: det = a c sin²θ.
    if det > 1e-14 * a * c {
        let t1 = (b * e - c * d) / det;
        let t2 = (a * e - b * d) / det;
        if in_domain(l1.kind, t1) && in_domain(l2.kind, t2) {
            let s = pair_dist2(l1, t1, l2, t2);
            return (t1, t2, s);
        }
    }

    let mut best: Option<(f64, f64, f64)> = None;
    let mut consider = |cand: (f64, f64, f64)| {
        if best.is_none_or(|b| cand.2 < b.2) {
            best = Some(cand);
        }
    };
    if l1.kind == Kind::Segment || l2.kind == Kind::Line {
        // Edges t1 = 0 and t1 = 1 (for lines only t1 = 0, the parallel tie-break).
        let ends: &[f64] = if l1.kind == Kind::Segment { &[0.0, 1.0] } else { &[0.0] };
        for &t1 in ends {
            let (t2, s) = foot_from(l1, t1, l2);
            consider((t1, t2, s));
        }
    }
    if l2.kind == Kind::Segment {
        for t2 in [0.0, 1.0] {
            let (t1, s) = foot_from(l2, t2, l1);
            consider((t1, t2, s));
        }
    }
    best.expect("at least one boundary edge is always examined")
}

/// [`closest_param`] of the point `src(s)` on `dst`, without materialising it.
fn foot_from(src: &SegmentLike, s: f64, dst: &SegmentLike) -> (f64, f64) {
    let (xs, ys) = (&src.x.0, &src.y.0);
    let (x, y) = (&dst.x.0, &dst.y.0);
    let mut dd = 0.0;
    let mut pd = 0.0;
    for i in 0..x.len() {
        let p = xs[i] + (ys[i] - xs[i]) * s;
        let d = y[i] - x[i];
        dd += d * d;
        pd += (p - x[i]) * d;
    }
    let t = if dd == 0.0 {
        0.0
    } else {
        match dst.kind {
            Kind::Line => pd / dd,
            Kind::Segment => (pd / dd).clamp(0.0, 1.0),
        }
    };
    (t, pair_dist2(src, s, dst, t))
}

fn in_domain(kind: Kind, t: f64) -> bool {
    match kind {
        Kind::Line => true,
        Kind::Segment => (0.0..=1.0).contains(&t),
    }
}

fn pair_dist2(l1: &SegmentLike, t1: f64, l2: &SegmentLike, t2: f64) -> f64 {
    let (x1, y1) = (&l1.x.0, &l1.y.0);
    let (x2, y2) = (&l2.x.0, &l2.y.0);
    let mut s = 0.0;
    for i in 0..x1.len() {
        let p = x1[i] + (y1[i] - x1[i]) * t1;
        let q = x2[i] + (y2[i] - x2[i]) * t2;
        s += (p - q) * (p - q);
    }
    s
}

pub(crate) fn check_dim(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(GeometryError::DimensionMismatch { left, right });
    }
    Ok(())
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}
