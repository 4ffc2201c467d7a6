//! Neighbourhood membership and the asymmetric relation `l₁ ℛ l₂`.
//!
//! Three versions share one relation interface:
//!
//! | version | parameters        | `l₁ ℛ l₂`                                   |
//! |---------|-------------------|---------------------------------------------|
//! | V1      | `c`, `α`          | `inf ‖p − q‖ < α_{l₁}`                       |
//! | V2      | `c`, `V`, `f`     | some `P ∈ S_{l₂}` lies in `N_{α f, l₁}`, `α = V / V(N_f)` |
//! | V3      | `c`, `α`, `f`     | as V2 with the given `α`                     |
//!
//! Under V3 a line without a profile falls back to the distance rule, and a
//! target line without a profile offers its whole extent as witnesses.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, closest_param, min_distance_sq, Point, SegmentLike};
use crate::profile::{scaling_factor_with_mode, AlphaMode, Profile, ProfileError, WINDOW_EPS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cardinality must be at least 1")]
    Cardinality,
    #[error("version {0} requires {1}")]
    Missing(Version, &'static str),
    #[error("version 1 does not take density profiles")]
    ProfileNotAllowed,
    #[error("{what} has {got} entries but there are {expected} lines")]
    Length {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("line {0} has no profile but version 2 needs one for its scaling factor")]
    MissingProfile(usize),
    #[error("{0} must be finite and positive, got {1}")]
    NotPositive(&'static str, f64),
    #[error("lines have mixed dimensions ({0} and {1})")]
    MixedDimensions(usize, usize),
    #[error("search needs at least 2 samples and a positive tolerance")]
    Search,
    #[error("scaling factor of line {line}: {source}")]
    Volume {
        line: usize,
        #[source]
        source: ProfileError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Version {
    V1,
    V2,
    V3,
}

impl std::fmt::Display for Version {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = match self {
            Version::V1 => 1,
            Version::V2 => 2,
            Version::V3 => 3,
        };
        write!(f, "{n}")
    }
}

/// A value shared by every line or given line by line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerLine<T> {
    Constant(T),
    Each(Vec<T>),
}

impl<T: Clone> PerLine<T> {
    pub fn get(&self, i: usize) -> T {
        match self {
            PerLine::Constant(v) => v.clone(),
            PerLine::Each(v) => v[i].clone(),
        }
    }

    fn check_len(&self, what: &'static str, n: usize) -> Result<(), ConfigError> {
        match self {
            PerLine::Each(v) if v.len() != n => Err(ConfigError::Length {
                what,
                got: v.len(),
                expected: n,
            }),
            _ => Ok(()),
        }
    }

    fn values(&self) -> Vec<T> {
        match self {
            PerLine::Constant(v) => vec![v.clone()],
            PerLine::Each(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub samples: usize,
    pub tol: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            samples: 64,
            tol: 1e-9,
        }
    }
}

/// Everything needed to decide `l₁ ℛ l₂` for lines of one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighbourhoodSpec {
    pub version: Version,
    pub cardinality: usize,
    #[serde(default)]
    pub alpha: Option<PerLine<f64>>,
    #[serde(default)]
    pub volume: Option<f64>,
    #[serde(default)]
    pub profiles: Option<PerLine<Option<Profile>>>,
    #[serde(default)]
    pub alpha_mode: AlphaMode,
    #[serde(default)]
    pub search: SearchParams,
}

impl NeighbourhoodSpec {
    pub fn v1(cardinality: usize, alpha: f64) -> Self {
        NeighbourhoodSpec {
            version: Version::V1,
            cardinality,
            alpha: Some(PerLine::Constant(alpha)),
            volume: None,
            profiles: None,
            alpha_mode: AlphaMode::Literal,
            search: SearchParams::default(),
        }
    }

    pub fn v2(cardinality: usize, volume: f64, profiles: PerLine<Option<Profile>>) -> Self {
        NeighbourhoodSpec {
            version: Version::V2,
            cardinality,
            alpha: None,
            volume: Some(volume),
            profiles: Some(profiles),
            alpha_mode: AlphaMode::Literal,
            search: SearchParams::default(),
        }
    }

    pub fn v3(cardinality: usize, alpha: PerLine<f64>, profiles: PerLine<Option<Profile>>) -> Self {
        NeighbourhoodSpec {
            version: Version::V3,
            cardinality,
            alpha: Some(alpha),
            volume: None,
            profiles: Some(profiles),
            alpha_mode: AlphaMode::Literal,
            search: SearchParams::default(),
        }
    }

    /// Checks the parameter combination against the version table.
    pub fn validate(&self, n_lines: usize) -> Result<(), ConfigError> {
        if self.cardinality == 0 {
            return Err(ConfigError::Cardinality);
        }
        if self.search.samples < 2 || !(self.search.tol > 0.0) {
            return Err(ConfigError::Search);
        }
        match self.version {
            Version::V1 => {
                if self.profiles.is_some() {
                    return Err(ConfigError::ProfileNotAllowed);
                }
                self.require_alpha(n_lines)?;
            }
            Version::V2 => {
                let v = self.volume.ok_or(ConfigError::Missing(Version::V2, "a volume V"))?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(ConfigError::NotPositive("volume", v));
                }
                let p = self
                    .profiles
                    .as_ref()
                    .ok_or(ConfigError::Missing(Version::V2, "a profile f"))?;
                p.check_len("profile list", n_lines)?;
            }
            Version::V3 => {
                self.require_alpha(n_lines)?;
                let p = self
                    .profiles
                    .as_ref()
                    .ok_or(ConfigError::Missing(Version::V3, "a profile f"))?;
                p.check_len("profile list", n_lines)?;
            }
        }
        Ok(())
    }

    fn require_alpha(&self, n_lines: usize) -> Result<(), ConfigError> {
        let a = self
            .alpha
            .as_ref()
            .ok_or(ConfigError::Missing(self.version, "a scaling factor α"))?;
        a.check_len("alpha list", n_lines)?;
        if let Some(bad) = a.values().into_iter().find(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(ConfigError::NotPositive("alpha", bad));
        }
        Ok(())
    }
}

/// `P ∈ N_{α f, l}`: the distance from `P` to `l` is strictly below
/// `α · f(t*)` at its closest point.
pub fn contains_point(l: &SegmentLike, p: &Profile, alpha: f64, point: &Point) -> bool {
    if geometry::check_dim(l.dim(), point.dim()).is_err() {
        return false;
    }
    let (t, d2) = closest_param(point.coords(), l);
    let r = alpha * p.eval(t);
    r > 0.0 && d2 < r * r
}

/// Distance form of the relation: `inf ‖g₁(t₁) − g₂(t₂)‖ < α₁`.
pub fn relates_v1(l1: &SegmentLike, l2: &SegmentLike, alpha1: f64) -> bool {
    if l1.dim() != l2.dim() {
        return false;
    }
    let (_, _, d2) = min_distance_sq(l1, l2);
    d2 < alpha1 * alpha1
}

/// Density form of the relation: some point of `l₂` (restricted to the
/// support of `p2`, if any) lies in the `(α₁ f₁)`-neighbourhood of `l₁`.
///
/// The witness is searched along `l₂`. With `φ(s)` the signed gap
/// `d(g₂(s), l₁) − α₁ f₁(t*(s))`, the relation holds iff `φ` dips below zero.
/// Far pairs are rejected from the global bound `α₁ · sup f₁`; otherwise `φ`
/// is sampled on a grid (plus analytic candidates) and every local minimum is
/// refined by golden-section search.
pub fn relates_prob(
    l1: &SegmentLike,
    p1: &Profile,
    alpha1: f64,
    l2: &SegmentLike,
    p2: Option<&Profile>,
    search: &SearchParams,
) -> bool {
    relates_prob_with_peak(l1, p1, alpha1, p1.peak(), l2, p2, search)
}

pub(crate) fn relates_prob_with_peak(
    l1: &SegmentLike,
    p1: &Profile,
    alpha1: f64,
    peak1: f64,
    l2: &SegmentLike,
    p2: Option<&Profile>,
    search: &SearchParams,
) -> bool {
    if l1.dim() != l2.dim() {
        return false;
    }
    let reach = alpha1 * peak1;
    if !(reach > 0.0) {
        return false;
    }
    let (_, _, d2) = min_distance_sq(l1, l2);
    if d2 >= reach * reach {
        return false;
    }

    let Some((lo, hi)) = witness_interval(l1, p1, reach, l2, p2) else {
        return false;
    };
    if l2.is_degenerate() || lo == hi {
        let point = Point::new(l2.eval(lo)).expect("finite");
        return contains_point(l1, p1, alpha1, &point);
    }

    let phi = |s: f64| -> f64 {
        let q = l2.eval(s);
        let (t, d2) = closest_param(&q, l1);
        d2.sqrt() - alpha1 * p1.eval(t)
    };

    let k = search.samples;
    let mut grid: Vec<f64> = (0..k)
        .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
        .collect();
    for s in candidate_params(l1, p1, l2) {
        if s > lo && s < hi {
            grid.push(s);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let vals: Vec<f64> = grid.iter().map(|&s| phi(s)).collect();
    if vals.iter().any(|&v| v < 0.0) {
        return true;
    }
    for i in 0..grid.len() {
        let left = if i > 0 { vals[i - 1] } else { f64::INFINITY };
        let right = vals.get(i + 1).copied().unwrap_or(f64::INFINITY);
        if vals[i] <= left && vals[i] <= right {
            let a = if i > 0 { grid[i - 1] } else { grid[i] };
            let b = grid.get(i + 1).copied().unwrap_or(grid[i]);
            if golden_section_finds_negative(&phi, a, b, search.tol) {
                return true;
            }
        }
    }
    false
}

/// Parameters along `l₂` worth probing beyond the uniform grid: the closest
/// approach to `l₁` and the point projecting onto `l₁`'s density peak.
fn candidate_params(l1: &SegmentLike, p1: &Profile, l2: &SegmentLike) -> [f64; 2] {
    let (_, closest, _) = min_distance_sq(l1, l2);
    // Solve t*(s) = mode for the unclamped projection; linear in s.
    let d1 = l1.direction();
    let d2 = l2.direction();
    let a: f64 = d1.iter().map(|v| v * v).sum();
    let slope: f64 = d1.iter().zip(&d2).map(|(u, v)| u * v).sum::<f64>() / a;
    let offset: f64 = l1
        .x()
        .coords()
        .iter()
        .zip(l2.x().coords())
        .zip(&d1)
        .map(|((x1, x2), d)| (x2 - x1) * d)
        .sum::<f64>()
        / a;
    let at_mode = if slope.abs() > 1e-12 && a > 0.0 {
        (p1.mode() - offset) / slope
    } else {
        f64::NAN
    };
    [closest, at_mode]
}

/// Range of `s` along `l₂` where a witness may sit, or `None` when empty.
fn witness_interval(
    l1: &SegmentLike,
    p1: &Profile,
    reach: f64,
    l2: &SegmentLike,
    p2: Option<&Profile>,
) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = l2.domain();
    if let Some(p2) = p2 {
        let (wlo, whi) = p2.effective_window(WINDOW_EPS);
        lo = lo.max(wlo);
        hi = hi.min(whi);
    }
    if l2.is_degenerate() {
        return (lo <= hi).then_some((lo, lo));
    }
    if !(lo.is_finite() && hi.is_finite()) {
        // Unbounded witness set: keep the part of l2 inside a ball that
        // encloses l1's (truncated) neighbourhood.
        let (mut a, mut b) = l1.domain();
        let (wlo, whi) = p1.effective_window(WINDOW_EPS);
        a = a.max(wlo);
        b = b.min(whi);
        if a > b {
            return None;
        }
        let center = l1.eval(0.5 * (a + b));
        let radius = l1.direction_norm() * 0.5 * (b - a) + reach;
        let d2 = l2.direction();
        let e: f64 = d2.iter().map(|v| v * v).sum();
        let diff: Vec<f64> = l2.x().coords().iter().zip(&center).map(|(p, c)| p - c).collect();
        let q: f64 = diff.iter().zip(&d2).map(|(u, v)| u * v).sum();
        let r0: f64 = diff.iter().map(|v| v * v).sum::<f64>() - radius * radius;
        let disc = q * q - e * r0;
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        lo = lo.max((-q - root) / e);
        hi = hi.min((-q + root) / e);
    }
    (lo <= hi).then_some((lo, hi))
}

fn golden_section_finds_negative<F: Fn(f64) -> f64>(phi: &F, mut a: f64, mut b: f64, tol: f64) -> bool {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = phi(c);
    let mut fd = phi(d);
    while (b - a).abs() > tol * (1.0 + a.abs().max(b.abs())) {
        if fc < 0.0 || fd < 0.0 {
            return true;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = phi(d);
        }
    }
    fc < 0.0 || fd < 0.0 || phi(0.5 * (a + b)) < 0.0
}

/// Per-line parameters resolved from a [`NeighbourhoodSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct LineParams {
    pub alpha: f64,
    pub profile: Option<Profile>,
    peak: f64,
}

/// Something that can answer `i ℛ j` over a fixed set of lines.
pub trait Relation: Sync {
    fn len(&self) -> usize;

    fn relates(&self, i: usize, j: usize) -> bool;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The geometric relation over a dataset, with per-line parameters
/// (including V2 scaling factors) computed once up front.
#[derive(Debug, Clone)]
pub struct NeighbourhoodRelation<'a> {
    lines: &'a [SegmentLike],
    version: Version,
    params: Vec<LineParams>,
    search: SearchParams,
}

impl<'a> NeighbourhoodRelation<'a> {
    pub fn new(lines: &'a [SegmentLike], spec: &NeighbourhoodSpec) -> Result<Self, ConfigError> {
        spec.validate(lines.len())?;
        if let Some(first) = lines.first() {
            if let Some(bad) = lines.iter().find(|l| l.dim() != first.dim()) {
                return Err(ConfigError::MixedDimensions(first.dim(), bad.dim()));
            }
        }
        let n_dim = lines.first().map_or(0, |l| l.dim());
        let mut params = Vec::with_capacity(lines.len());
        for (i, line) in lines.iter().enumerate() {
            let profile = spec.profiles.as_ref().and_then(|p| p.get(i));
            let alpha = match spec.version {
                Version::V1 | Version::V3 => spec.alpha.as_ref().expect("validated").get(i),
                Version::V2 => {
                    let p = profile.ok_or(ConfigError::MissingProfile(i))?;
                    let volume = spec.volume.expect("validated");
                    scaling_factor_with_mode(volume, &p, line, n_dim, spec.alpha_mode)
                        .map_err(|source| ConfigError::Volume { line: i, source })?
                }
            };
            let peak = profile.map_or(f64::NAN, |p| p.peak());
            params.push(LineParams { alpha, profile, peak });
        }
        Ok(NeighbourhoodRelation {
            lines,
            version: spec.version,
            params,
            search: spec.search,
        })
    }

    pub fn lines(&self) -> &[SegmentLike] {
        self.lines
    }

    pub fn params(&self, i: usize) -> &LineParams {
        &self.params[i]
    }

    /// Indices `j` with `i ℛ j`, in index order. Includes `i` itself.
    pub fn neighbor_set(&self, i: usize) -> Vec<usize> {
        (0..self.lines.len()).filter(|&j| self.relates(i, j)).collect()
    }
}

impl Relation for NeighbourhoodRelation<'_> {
    fn len(&self) -> usize {
        self.lines.len()
    }

    fn relates(&self, i: usize, j: usize) -> bool {
        let (l1, l2) = (&self.lines[i], &self.lines[j]);
        let p = &self.params[i];
        match (self.version, p.profile) {
            (Version::V1, _) | (Version::V3, None) => relates_v1(l1, l2, p.alpha),
            (_, Some(ref f1)) => {
                let p2 = self.params[j].profile;
                relates_prob_with_peak(l1, f1, p.alpha, p.peak, l2, p2.as_ref(), &self.search)
            }
            (Version::V2, None) => unreachable!("V2 profiles are checked at construction"),
        }
    }
}

/// `l₁ ℛ l₂` for a single pair under `spec`, with `i`, `j` the lines'
/// positions in `lines`.
pub fn relates(lines: &[SegmentLike], i: usize, j: usize, spec: &NeighbourhoodSpec) -> Result<bool, ConfigError> {
    Ok(NeighbourhoodRelation::new(lines, spec)?.relates(i, j))
}

/// `{ j : U[i] ℛ U[j] }` in index order.
pub fn neighbor_set(lines: &[SegmentLike], i: usize, spec: &NeighbourhoodSpec) -> Result<Vec<usize>, ConfigError> {
    Ok(NeighbourhoodRelation::new(lines, spec)?.neighbor_set(i))
}
