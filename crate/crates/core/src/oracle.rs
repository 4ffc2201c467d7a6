//! Brute-force references for testing.
//!
//! Nothing here reuses the closed-form geometry, the relation search or the
//! engine: distances are sampled on a grid or found by enumerating every
//! active set of the box-constrained quadratic, density witnesses by a dense
//! zooming scan, volumes by adaptive Simpson, and DBSCAN is the textbook
//! point algorithm. Only profile evaluation and the input types are shared.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{Kind, SegmentLike};
use crate::neighborhood::{ConfigError, NeighbourhoodSpec, Relation, Version};
use crate::profile::{AlphaMode, Profile, WINDOW_EPS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("grid distance is only defined for segments")]
    NotSegment,
    #[error("grid step must be in (0, 1], got {0}")]
    BadStep(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
}

/// Minimum of `‖g1(t1) − g2(t2)‖` over a `step`-spaced grid on `[0,1]²`
/// (both endpoints always included). Overestimates the true minimum by at
/// most `(‖d1‖ + ‖d2‖)·step`.
pub fn grid_min_distance(l1: &SegmentLike, l2: &SegmentLike, step: f64) -> Result<f64, OracleError> {
    if l1.kind() != Kind::Segment || l2.kind() != Kind::Segment {
        return Err(OracleError::NotSegment);
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(OracleError::BadStep(step));
    }
    let (a0, a1) = (l1.x().coords(), l1.y().coords());
    let (b0, b1) = (l2.x().coords(), l2.y().coords());
    if a0.len() != b0.len() {
        return Err(OracleError::Dimension(a0.len(), b0.len()));
    }
    let m = (1.0 / step).ceil() as usize;
    let ts: Vec<f64> = (0..=m).map(|k| (k as f64 * step).min(1.0)).collect();
    let d2: Vec<f64> = b0.iter().zip(b1).map(|(u, v)| v - u).collect();
    let cc: f64 = d2.iter().map(|v| v * v).sum();
    // Row s: ‖w − t·d2‖² = aa − 2t·bb + t²·cc with w = g1(s) − b0.
    let best = ts
        .par_iter()
        .map(|&s| {
            let w: Vec<f64> = (0..a0.len()).map(|k| a0[k] + (a1[k] - a0[k]) * s - b0[k]).collect();
            let aa: f64 = w.iter().map(|v| v * v).sum();
            let bb: f64 = w.iter().zip(&d2).map(|(u, v)| u * v).sum();
            ts.iter()
                .map(|&t| aa - 2.0 * t * bb + t * t * cc)
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best.max(0.0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbscanResult {
    /// Cluster index (from 1) per point, `None` for noise.
    pub labels: Vec<Option<usize>>,
    pub core: Vec<bool>,
}

/// Textbook DBSCAN over points, with strict `dist < eps` neighbourhoods that
/// include the point itself.
pub fn reference_dbscan(points: &[Vec<f64>], eps: f64, minpts: usize) -> DbscanResult {
    let n = points.len();
    let near = |i: usize, j: usize| {
        points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            < eps
    };
    let region = |i: usize| (0..n).filter(|&j| near(i, j)).collect::<Vec<_>>();
    let core: Vec<bool> = (0..n).map(|i| region(i).len() >= minpts).collect();
    let mut labels = vec![None; n];
    let mut next = 0;
    for i in 0..n {
        if labels[i].is_some() || !core[i] {
            continue;
        }
        next += 1;
        labels[i] = Some(next);
        let mut stack = vec![i];
        while let Some(p) = stack.pop() {
            for q in region(p) {
                if labels[q].is_none() {
                    labels[q] = Some(next);
                    if core[q] {
                        stack.push(q);
                    }
                }
            }
        }
    }
    DbscanResult { labels, core }
}

/// Exhaustive `n × n` table of the neighbourhood relation; row `i` holds
/// `relates(i, j)` for every `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationMatrix {
    n: usize,
    cells: Vec<bool>,
}

impl RelationMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let cells = (0..n * n).map(|k| f(k / n, k % n)).collect();
        RelationMatrix { n, cells }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.cells[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

impl Relation for RelationMatrix {
    fn len(&self) -> usize {
        self.n
    }

    fn relates(&self, i: usize, j: usize) -> bool {
        self.get(i, j)
    }
}

pub fn relation_matrix(lines: &[SegmentLike], spec: &NeighbourhoodSpec) -> Result<RelationMatrix, ConfigError> {
    let rel = OracleRelation::new(lines, spec)?;
    let rows: Vec<Vec<bool>> = (0..lines.len())
        .into_par_iter()
        .map(|i| (0..lines.len()).map(|j| rel.relates(i, j)).collect())
        .collect();
    Ok(RelationMatrix::from_fn(lines.len(), |i, j| rows[i][j]))
}

/// Stand-alone evaluation of `i ℛ j`, written without the library search.
#[derive(Debug, Clone)]
pub struct OracleRelation<'a> {
    lines: &'a [SegmentLike],
    alpha: Vec<f64>,
    profile: Vec<Option<Profile>>,
}

impl<'a> OracleRelation<'a> {
    pub fn new(lines: &'a [SegmentLike], spec: &NeighbourhoodSpec) -> Result<Self, ConfigError> {
        spec.validate(lines.len())?;
        let dim = lines.first().map_or(0, |l| l.dim());
        if let Some(bad) = lines.iter().find(|l| l.dim() != dim) {
            return Err(ConfigError::MixedDimensions(dim, bad.dim()));
        }
        let profile: Vec<Option<Profile>> = (0..lines.len())
            .map(|i| match spec.version {
                Version::V1 => None,
                _ => spec.profiles.as_ref().and_then(|p| p.get(i)),
            })
            .collect();
        let mut alpha = Vec::with_capacity(lines.len());
        for (i, l) in lines.iter().enumerate() {
            alpha.push(match spec.version {
                Version::V1 | Version::V3 => spec.alpha.as_ref().expect("validated").get(i),
                Version::V2 => {
                    let p = profile[i].ok_or(ConfigError::MissingProfile(i))?;
                    let base = simpson_volume(&p, l, dim);
                    let ratio = spec.volume.expect("validated") / base;
                    match spec.alpha_mode {
                        AlphaMode::Literal => ratio,
                        AlphaMode::ExactVolume => ratio.powf(1.0 / (dim - 1) as f64),
                    }
                }
            });
        }
        Ok(OracleRelation { lines, alpha, profile })
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.alpha[i]
    }

    /// Signed margin of `i ℛ j`: the smallest `distance − radius` found,
    /// negative when the relation holds.
    pub fn gap(&self, i: usize, j: usize) -> f64 {
        let (l1, l2) = (&self.lines[i], &self.lines[j]);
        match &self.profile[i] {
            None => box_min_dist2(l1, l2).sqrt() - self.alpha[i],
            Some(p1) => witness_gap(l1, p1, self.alpha[i], l2, self.profile[j].as_ref()),
        }
    }

    pub fn relates(&self, i: usize, j: usize) -> bool {
        match &self.profile[i] {
            None => box_min_dist2(&self.lines[i], &self.lines[j]) < self.alpha[i] * self.alpha[i],
            Some(_) => self.gap(i, j) < 0.0,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| u - v).collect()
}

fn at(l: &SegmentLike, t: f64) -> Vec<f64> {
    l.x().coords().iter().zip(l.y().coords()).map(|(a, b)| a + (b - a) * t).collect()
}

fn bounds(l: &SegmentLike) -> (f64, f64) {
    match l.kind() {
        Kind::Segment => (0.0, 1.0),
        Kind::Line => (f64::NEG_INFINITY, f64::INFINITY),
    }
}

/// Minimiser of `‖base − t·d‖²` over the parameter range of `l`.
fn best_t(base: &[f64], d: &[f64], l: &SegmentLike) -> f64 {
    let dd = dot(d, d);
    let (lo, hi) = bounds(l);
    if dd == 0.0 {
        return 0.0;
    }
    (dot(base, d) / dd).clamp(lo, hi)
}

/// `min ‖g1(t1) − g2(t2)‖²` over the parameter box. The objective is a
/// convex quadratic, so its minimiser is the stationary point of one of the
/// faces of the box: the interior, an edge with one coordinate pinned, or a
/// corner. Every face is tried.
fn box_min_dist2(l1: &SegmentLike, l2: &SegmentLike) -> f64 {
    let (x1, x2) = (l1.x().coords(), l2.x().coords());
    let d1 = diff(l1.y().coords(), x1);
    let d2 = diff(l2.y().coords(), x2);
    let w = diff(x1, x2);
    let (a, b, c) = (dot(&d1, &d1), dot(&d1, &d2), dot(&d2, &d2));
    let (d, e) = (dot(&d1, &w), dot(&d2, &w));
    let (r1, r2) = (bounds(l1), bounds(l2));
    let mut cands: Vec<(f64, f64)> = Vec::new();
    let det = a * c - b * b;
    if det > 0.0 {
        cands.push((((b * e - c * d) / det).clamp(r1.0, r1.1), ((a * e - b * d) / det).clamp(r2.0, r2.1)));
    }
    let mut pins1 = vec![0.0];
    pins1.extend([r1.0, r1.1].into_iter().filter(|v| v.is_finite()));
    let mut pins2 = vec![0.0];
    pins2.extend([r2.0, r2.1].into_iter().filter(|v| v.is_finite()));
    for &t1 in &pins1 {
        cands.push((t1, best_t(&diff(&at(l1, t1), x2), &d2, l2)));
    }
    for &t2 in &pins2 {
        cands.push((best_t(&diff(&at(l2, t2), x1), &d1, l1), t2));
    }
    cands
        .iter()
        .map(|&(t1, t2)| {
            let v = diff(&at(l1, t1), &at(l2, t2));
            dot(&v, &v)
        })
        .fold(f64::INFINITY, f64::min)
}

fn phi(l1: &SegmentLike, p1: &Profile, alpha1: f64, q: &[f64]) -> f64 {
    let x1 = l1.x().coords();
    let d1 = diff(l1.y().coords(), x1);
    let t = best_t(&diff(q, x1), &d1, l1);
    let v = diff(q, &at(l1, t));
    dot(&v, &v).sqrt() - alpha1 * p1.eval(t)
}

const SCAN: usize = 2049;
const ZOOM: usize = 129;
const ZOOM_LEVELS: usize = 4;

/// Smallest `φ(s) = d(g2(s), l1) − α1·f1(t*(s))` found over the witness
/// range of `l2`: a uniform scan, then repeated rescans around every local
/// minimum.
fn witness_gap(l1: &SegmentLike, p1: &Profile, alpha1: f64, l2: &SegmentLike, p2: Option<&Profile>) -> f64 {
    let (mut lo, mut hi) = bounds(l2);
    if let Some(p2) = p2 {
        let (a, b) = p2.effective_window(WINDOW_EPS);
        lo = lo.max(a);
        hi = hi.min(b);
    }
    if lo > hi {
        return f64::INFINITY;
    }
    let x2 = l2.x().coords();
    let d2 = diff(l2.y().coords(), x2);
    let c = dot(&d2, &d2);
    if c == 0.0 {
        return phi(l1, p1, alpha1, &at(l2, lo));
    }
    if !(lo.is_finite() && hi.is_finite()) {
        // Witnesses lie within reach of the truncated part of l1.
        let (mut a, mut b) = bounds(l1);
        let (wa, wb) = p1.effective_window(WINDOW_EPS);
        a = a.max(wa);
        b = b.min(wb);
        if a > b {
            return f64::INFINITY;
        }
        let centre = at(l1, 0.5 * (a + b));
        let d1 = diff(l1.y().coords(), l1.x().coords());
        let radius = dot(&d1, &d1).sqrt() * 0.5 * (b - a) + alpha1 * p1.peak();
        let s0 = dot(&diff(&centre, x2), &d2) / c;
        let half = radius / c.sqrt();
        lo = lo.max(s0 - half);
        hi = hi.min(s0 + half);
        if lo > hi {
            return f64::INFINITY;
        }
    }
    let f = |s: f64| phi(l1, p1, alpha1, &at(l2, s));
    let mut best = f64::INFINITY;
    let mut brackets = vec![(lo, hi, SCAN)];
    for _ in 0..=ZOOM_LEVELS {
        let mut next = Vec::new();
        for (a, b, k) in brackets {
            let ss: Vec<f64> = (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect();
            let vs: Vec<f64> = ss.iter().map(|&s| f(s)).collect();
            for i in 0..k {
                best = best.min(vs[i]);
                let left = if i > 0 { vs[i - 1] } else { f64::INFINITY };
                let right = if i + 1 < k { vs[i + 1] } else { f64::INFINITY };
                if vs[i] <= left && vs[i] <= right && b > a {
                    next.push((ss[i.saturating_sub(1)], ss[(i + 1).min(k - 1)], ZOOM));
                }
            }
        }
        if best < 0.0 {
            break;
        }
        next.truncate(64);
        brackets = next;
    }
    best
}

/// `c_{n−1} · ‖d‖ · ∫ f^{n−1}` over the profile's truncated window.
fn simpson_volume(p: &Profile, l: &SegmentLike, n: usize) -> f64 {
    let (a, b) = p.effective_window(WINDOW_EPS);
    let k = (n - 1) as i32;
    let integral = adaptive_simpson(&|t| p.eval(t).powi(k), a, b, 1e-13);
    let d = diff(l.y().coords(), l.x().coords());
    let m = n - 1;
    // Γ(m/2 + 1) by stepping up from Γ(1) = 1 or Γ(1/2) = √π.
    let mut gamma = if m.is_multiple_of(2) { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut x = if m.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x <= m as f64 / 2.0 {
        gamma *= x;
        x += 1.0;
    }
    let ball = std::f64::consts::PI.powf(m as f64 / 2.0) / gamma;
    ball * dot(&d, &d).sqrt() * integral
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    // Split first so that narrow peaks are not straddled by the initial rule.
    let pieces = 64;
    (0..pieces)
        .map(|i| {
            let (x0, x1) = (a + (b - a) * i as f64 / pieces as f64, a + (b - a) * (i + 1) as f64 / pieces as f64);
            let (fa, fb, fm) = (f(x0), f(x1), f(0.5 * (x0 + x1)));
            let whole = (x1 - x0) / 6.0 * (fa + 4.0 * fm + fb);
            step(f, x0, x1, fa, fm, fb, whole, tol / pieces as f64, 40)
        })
        .sum()
}

fn pairs(k: u64) -> f64 {
    (k * k.saturating_sub(1) / 2) as f64
}

/// Hubert–Arabie adjusted Rand index. Two partitions that are identical up
/// to relabelling always score 1, including the degenerate all-in-one and
/// all-singleton cases.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "label vectors differ in length");
    let n = a.len() as u64;
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| pairs(c)).sum();
    let sa: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sb: f64 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(n);
    let expected = if total > 0.0 { sa * sb / total } else { 0.0 };
    let max = 0.5 * (sa + sb);
    if (max - expected).abs() < f64::EPSILON {
        return if table.len() == rows.len() && table.len() == cols.len() {
            1.0
        } else {
            0.0
        };
    }
    (index - expected) / (max - expected)
}
