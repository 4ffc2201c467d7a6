//! Density profiles over a line's parameter `t` and the volumes of the
//! neighbourhoods they generate.
//!
//! A profile is a probability density in `t`, not in arc length: a segment
//! `(x, y)` carries `f(t)` at the point `x + (y - x) t`. The neighbourhood of
//! the line is the solid obtained by sweeping a ball of radius `scale · f(t)`
//! along it, so its volume is
//!
//! ```text
//! V = c_{n-1} · ‖y − x‖ · ∫ (scale · f(t))^{n-1} dt
//! ```
//!
//! with `c_m` the volume of the unit m-ball. Unbounded supports are cut at the
//! `WINDOW_EPS` tail quantiles.

pub mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;
use statrs::function::erf::erfc_inv;
use statrs::function::gamma::{gamma_ur, ln_gamma};
use thiserror::Error;

use crate::geometry::SegmentLike;

/// Tail mass dropped on each unbounded side of a support.
pub const WINDOW_EPS: f64 = 1e-6;

/// Relative tolerance for volume quadrature.
pub const VOLUME_REL_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("invalid {family} parameters: {reason}")]
    InvalidParameter { family: &'static str, reason: String },
    #[error("cannot parse profile `{0}`; expected `family:p1[,p2]`")]
    Parse(String),
    #[error("unknown profile family `{0}`")]
    UnknownFamily(String),
    #[error("neighbourhood volume needs n >= 2, got {0}")]
    Dimension(usize),
    #[error("zero-length axis of revolution")]
    DegenerateAxis,
    #[error("neighbourhood volume is not finite and positive ({0})")]
    NonFiniteVolume(f64),
}

pub type Result<T> = std::result::Result<T, ProfileError>;

/// The density families a line may carry.
///
/// `Normal` takes the variance, matching the `(μ, σ²)` convention.
/// `Gamma` uses shape and rate. `Ellipsoidal(a, b)` is the normalised
/// half-ellipse on `[-a, a]`; `b` is its nominal semi-axis and cancels under
/// normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Profile {
    Uniform { a: f64, b: f64 },
    Normal { mean: f64, variance: f64 },
    Ellipsoidal { a: f64, b: f64 },
    Gamma { shape: f64, rate: f64 },
    Beta { alpha: f64, beta: f64 },
    Exponential { rate: f64 },
}

/// Closed support `[lo, hi]`, either end possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }
}

fn invalid(family: &'static str, reason: impl Into<String>) -> ProfileError {
    ProfileError::InvalidParameter {
        family,
        reason: reason.into(),
    }
}

fn finite(family: &'static str, vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(invalid(family, "parameters must be finite"))
    }
}

impl Profile {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        finite("uniform", &[a, b])?;
        if a >= b {
            return Err(invalid("uniform", format!("need a < b, got ({a}, {b})")));
        }
        Ok(Profile::Uniform { a, b })
    }

    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        finite("normal", &[mean, variance])?;
        if variance <= 0.0 {
            return Err(invalid("normal", "variance must be positive"));
        }
        Ok(Profile::Normal { mean, variance })
    }

    pub fn ellipsoidal(a: f64, b: f64) -> Result<Self> {
        finite("ellipsoidal", &[a, b])?;
        if a <= 0.0 || b <= 0.0 {
            return Err(invalid("ellipsoidal", "semi-axes must be positive"));
        }
        Ok(Profile::Ellipsoidal { a, b })
    }

    /// Shapes below 1 give an unbounded density at 0 and are rejected.
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        finite("gamma", &[shape, rate])?;
        if shape < 1.0 {
            return Err(invalid("gamma", "shape < 1 makes the density unbounded"));
        }
        if rate <= 0.0 {
            return Err(invalid("gamma", "rate must be positive"));
        }
        Ok(Profile::Gamma { shape, rate })
    }

    /// Both shapes must be at least 1 so the density stays bounded.
    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        finite("beta", &[alpha, beta])?;
        if alpha < 1.0 || beta < 1.0 {
            return Err(invalid("beta", "shapes < 1 make the density unbounded"));
        }
        Ok(Profile::Beta { alpha, beta })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        finite("exponential", &[rate])?;
        if rate <= 0.0 {
            return Err(invalid("exponential", "rate must be positive"));
        }
        Ok(Profile::Exponential { rate })
    }

    pub fn family(&self) -> &'static str {
        match self {
            Profile::Uniform { .. } => "uniform",
            Profile::Normal { .. } => "normal",
            Profile::Ellipsoidal { .. } => "ellipsoidal",
            Profile::Gamma { .. } => "gamma",
            Profile::Beta { .. } => "beta",
            Profile::Exponential { .. } => "exponential",
        }
    }

    /// Density at `t`; zero outside the support.
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Profile::Uniform { a, b } => {
                if (a..=b).contains(&t) {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Profile::Normal { mean, variance } => {
                let z = t - mean;
                (-0.5 * z * z / variance).exp() / (2.0 * PI * variance).sqrt()
            }
            Profile::Ellipsoidal { a, .. } => {
                if t.abs() > a {
                    0.0
                } else {
                    let u = t / a;
                    2.0 / (PI * a) * (1.0 - u * u).max(0.0).sqrt()
                }
            }
            Profile::Gamma { shape, rate } => {
                if t < 0.0 {
                    0.0
                } else if t == 0.0 {
                    if shape == 1.0 {
                        rate
                    } else {
                        0.0
                    }
                } else {
                    (shape * rate.ln() + (shape - 1.0) * t.ln() - rate * t - ln_gamma(shape)).exp()
                }
            }
            Profile::Beta { alpha, beta } => {
                if !(0.0..=1.0).contains(&t) {
                    0.0
                } else {
                    t.powf(alpha - 1.0) * (1.0 - t).powf(beta - 1.0) / ln_beta(alpha, beta).exp()
                }
            }
            Profile::Exponential { rate } => {
                if t < 0.0 {
                    0.0
                } else {
                    rate * (-rate * t).exp()
                }
            }
        }
    }

    pub fn support(&self) -> Support {
        let (lo, hi) = match *self {
            Profile::Uniform { a, b } => (a, b),
            Profile::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Profile::Ellipsoidal { a, .. } => (-a, a),
            Profile::Gamma { .. } | Profile::Exponential { .. } => (0.0, f64::INFINITY),
            Profile::Beta { .. } => (0.0, 1.0),
        };
        Support { lo, hi }
    }

    /// Finite window holding all but `eps` of the mass on each unbounded side.
    ///
    /// Finite support ends are kept as they are; infinite ones are replaced
    /// by the `eps` and `1 - eps` quantiles.
    pub fn effective_window(&self, eps: f64) -> (f64, f64) {
        let s = self.support();
        let lo = if s.lo.is_finite() { s.lo } else { self.lower_tail_quantile(eps) };
        let hi = if s.hi.is_finite() { s.hi } else { self.upper_tail_quantile(eps) };
        (lo, hi)
    }

    fn lower_tail_quantile(&self, eps: f64) -> f64 {
        match *self {
            Profile::Normal { mean, variance } => mean - (2.0 * variance).sqrt() * erfc_inv(2.0 * eps),
            _ => unreachable!("only the normal family has an unbounded lower tail"),
        }
    }

    fn upper_tail_quantile(&self, eps: f64) -> f64 {
        match *self {
            Profile::Normal { mean, variance } => mean + (2.0 * variance).sqrt() * erfc_inv(2.0 * eps),
            Profile::Exponential { rate } => -eps.ln() / rate,
            Profile::Gamma { shape, rate } => {
                // Bisection on the upper regularised incomplete gamma, which
                // keeps full relative precision deep in the tail.
                let mut lo = 0.0;
                let mut hi = shape.max(1.0);
                while gamma_ur(shape, hi) > eps {
                    lo = hi;
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if gamma_ur(shape, mid) > eps {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi) / rate
            }
            _ => unreachable!("bounded family has no upper tail"),
        }
    }

    /// Supremum of the density, attained at the mode.
    pub fn peak(&self) -> f64 {
        match *self {
            Profile::Uniform { a, b } => 1.0 / (b - a),
            Profile::Normal { variance, .. } => 1.0 / (2.0 * PI * variance).sqrt(),
            Profile::Ellipsoidal { a, .. } => 2.0 / (PI * a),
            Profile::Exponential { rate } => rate,
            Profile::Gamma { shape, rate } => self.eval((shape - 1.0) / rate),
            Profile::Beta { alpha, beta } => {
                if alpha + beta == 2.0 {
                    1.0
                } else {
                    self.eval((alpha - 1.0) / (alpha + beta - 2.0))
                }
            }
        }
    }

    /// Location of the peak.
    pub fn mode(&self) -> f64 {
        match *self {
            Profile::Uniform { a, b } => 0.5 * (a + b),
            Profile::Normal { mean, .. } => mean,
            Profile::Ellipsoidal { .. } | Profile::Exponential { .. } => 0.0,
            Profile::Gamma { shape, rate } => (shape - 1.0) / rate,
            Profile::Beta { alpha, beta } => {
                if alpha + beta == 2.0 {
                    0.5
                } else {
                    (alpha - 1.0) / (alpha + beta - 2.0)
                }
            }
        }
    }

    fn params(&self) -> Vec<f64> {
        match *self {
            Profile::Uniform { a, b } | Profile::Ellipsoidal { a, b } => vec![a, b],
            Profile::Normal { mean, variance } => vec![mean, variance],
            Profile::Gamma { shape, rate } => vec![shape, rate],
            Profile::Beta { alpha, beta } => vec![alpha, beta],
            Profile::Exponential { rate } => vec![rate],
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params().iter().map(|p| p.to_string()).collect();
        write!(f, "{}:{}", self.family(), params.join(","))
    }
}

impl FromStr for Profile {
    type Err = ProfileError;

    /// Parses `family:p1[,p2]`, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').ok_or_else(|| ProfileError::Parse(s.to_string()))?;
        let params = rest
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| ProfileError::Parse(s.to_string()))?;
        let family = family.trim().to_ascii_lowercase();
        let expect = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(ProfileError::Parse(s.to_string()))
            }
        };
        match family.as_str() {
            "uniform" => expect(2).and_then(|_| Profile::uniform(params[0], params[1])),
            "normal" => expect(2).and_then(|_| Profile::normal(params[0], params[1])),
            "ellipsoidal" => expect(2).and_then(|_| Profile::ellipsoidal(params[0], params[1])),
            "gamma" => expect(2).and_then(|_| Profile::gamma(params[0], params[1])),
            "beta" => expect(2).and_then(|_| Profile::beta(params[0], params[1])),
            "exponential" => expect(1).and_then(|_| Profile::exponential(params[0])),
            _ => Err(ProfileError::UnknownFamily(family)),
        }
    }
}

impl TryFrom<String> for Profile {
    type Error = ProfileError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Profile> for String {
    fn from(p: Profile) -> Self {
        p.to_string()
    }
}

/// Volume of the unit m-ball, `π^{m/2} / Γ(m/2 + 1)`.
pub fn unit_ball_volume(m: usize) -> f64 {
    assert!(m >= 1, "unit ball dimension must be positive");
    // V_m = 2π/m · V_{m-2}, from V_0 = 1 and V_1 = 2.
    let mut v = if m.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = 2 + m % 2;
    while k <= m {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

/// Volume of the `(scale · f)`-neighbourhood of `l` in ℝⁿ.
pub fn neighbourhood_volume(p: &Profile, l: &SegmentLike, n: usize, scale: f64) -> Result<f64> {
    if n < 2 {
        return Err(ProfileError::Dimension(n));
    }
    if l.is_degenerate() {
        return Err(ProfileError::DegenerateAxis);
    }
    let (lo, hi) = p.effective_window(WINDOW_EPS);
    let power = (n - 1) as i32;
    let q = quadrature::integrate(
        |t| (scale * p.eval(t)).powi(power),
        lo,
        hi,
        VOLUME_REL_TOL,
        quadrature::MAX_SUBINTERVALS,
    );
    let v = unit_ball_volume(n - 1) * l.direction_norm() * q.value;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ProfileError::NonFiniteVolume(v))
    }
}

/// How the volume parameter turns into a scaling factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    /// `α = V / V(N_f)`.
    #[default]
    Literal,
    /// `α = (V / V(N_f))^{1/(n-1)}`, so the scaled neighbourhood has volume `V`.
    ExactVolume,
}

/// `α_l = V / V(N_{f,l})`.
pub fn scaling_factor(volume: f64, p: &Profile, l: &SegmentLike, n: usize) -> Result<f64> {
    scaling_factor_with_mode(volume, p, l, n, AlphaMode::Literal)
}

pub fn scaling_factor_with_mode(
    volume: f64,
    p: &Profile,
    l: &SegmentLike,
    n: usize,
    mode: AlphaMode,
) -> Result<f64> {
    let base = neighbourhood_volume(p, l, n, 1.0)?;
    let ratio = volume / base;
    Ok(match mode {
        AlphaMode::Literal => ratio,
        AlphaMode::ExactVolume => ratio.powf(1.0 / (n - 1) as f64),
    })
}
