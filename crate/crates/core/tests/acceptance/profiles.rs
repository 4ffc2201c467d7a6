use std::f64::consts::PI;

use deli_core::profile::{neighbourhood_volume, scaling_factor, Profile, WINDOW_EPS};
use deli_core::{Kind, SegmentLike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ensure, Outcome};

/// Adaptive Simpson quadrature, independent of the library's integrator.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 45)
}

fn segment(n: usize, len: f64) -> SegmentLike {
    let mut y = vec![0.0; n];
    y[0] = len;
    SegmentLike::from_coords(&vec![0.0; n], &y, Kind::Segment).unwrap()
}

pub fn volume_oracles() -> Outcome {
    let u = Profile::uniform(0.0, 1.0).unwrap();
    let v2 = neighbourhood_volume(&u, &segment(2, 1.0), 2, 1.0).map_err(|e| e.to_string())?;
    let v3 = neighbourhood_volume(&u, &segment(3, 1.0), 3, 1.0).map_err(|e| e.to_string())?;
    ensure!((v2 - 2.0).abs() <= 1e-9, "uniform n=2: {v2}");
    ensure!((v3 - PI).abs() <= 1e-9, "uniform n=3: {v3}");

    // Normal(0.5, 0.04): the oracle finds its own ε-quantiles by bisection on
    // a Simpson-integrated density and integrates the density between them.
    let (mu, var) = (0.5, 0.04);
    let pdf = |t: f64| (-(t - mu) * (t - mu) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
    let upper_mass = |z: f64| simpson(&pdf, mu, mu + z, 1e-14);
    let (mut lo, mut hi) = (0.0, 10.0 * var.sqrt());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if upper_mass(mid) < 0.5 - WINDOW_EPS {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let half = 0.5 * (lo + hi);
    let p = Profile::normal(mu, var).unwrap();
    let mut worst = 0.0f64;
    for len in [1.0, 2.5] {
        let oracle = 2.0 * len * simpson(&pdf, mu - half, mu + half, 1e-14);
        let ours = neighbourhood_volume(&p, &segment(2, len), 2, 1.0).map_err(|e| e.to_string())?;
        let formula = 2.0 * len * (1.0 - 2.0 * WINDOW_EPS);
        ensure!((ours - oracle).abs() <= 1e-4, "normal, L={len}: {ours} vs oracle {oracle}");
        ensure!((ours - formula).abs() <= 1e-4, "normal, L={len}: {ours} vs 2L(1-2ε) = {formula}");
        worst = worst.max((ours - oracle).abs());
    }
    Ok(format!("uniform 2.0/π exact to 1e-9; normal within {worst:.1e} of oracle"))
}

fn random_profile(rng: &mut ChaCha8Rng, family: usize) -> Profile {
    match family {
        0 => {
            let a = rng.random_range(-2.0..2.0);
            Profile::uniform(a, a + rng.random_range(0.05..3.0))
        }
        1 => Profile::normal(rng.random_range(-1.0..2.0), rng.random_range(1e-3..2.0)),
        2 => Profile::ellipsoidal(rng.random_range(0.05..3.0), rng.random_range(0.05..3.0)),
        3 => Profile::gamma(rng.random_range(1.0..10.0), rng.random_range(0.1..8.0)),
        4 => Profile::beta(rng.random_range(1.0..8.0), rng.random_range(1.0..8.0)),
        _ => Profile::exponential(rng.random_range(0.1..10.0)),
    }
    .expect("parameters drawn inside the valid ranges")
}

pub fn scaling_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let p = random_profile(&mut rng, i % 6);
        let n = 2 + i % 3;
        let len = rng.random_range(0.1..5.0);
        let alpha = rng.random_range(0.05..20.0);
        let l = segment(n, len);
        let base = neighbourhood_volume(&p, &l, n, 1.0).map_err(|e| e.to_string())?;
        let scaled = neighbourhood_volume(&p, &l, n, alpha).map_err(|e| e.to_string())?;
        let want = alpha.powi(n as i32 - 1) * base;
        let rel = ((scaled - want) / want).abs();
        ensure!(rel <= 1e-6, "{p}, n={n}, α={alpha}: relative error {rel:e}");
        worst = worst.max(rel);

        let v = rng.random_range(0.01..100.0);
        let l2 = segment(2, len);
        let a = scaling_factor(v, &p, &l2, 2).map_err(|e| e.to_string())?;
        let got = neighbourhood_volume(&p, &l2, 2, a).map_err(|e| e.to_string())?;
        ensure!((got - v).abs() <= 1e-6, "{p}: planar volume {got} != {v}");
    }
    Ok(format!("100 triples, worst relative error {worst:.1e}"))
}

/// Support of each family, written out independently.
fn expected_support(p: &Profile) -> (f64, f64) {
    match *p {
        Profile::Uniform { a, b } => (a, b),
        Profile::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        Profile::Ellipsoidal { a, .. } => (-a, a),
        Profile::Gamma { .. } | Profile::Exponential { .. } => (0.0, f64::INFINITY),
        Profile::Beta { .. } => (0.0, 1.0),
    }
}

pub fn profile_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9df);
    let mut lowest = f64::INFINITY;
    for family in 0..6 {
        for _ in 0..50 {
            let p = random_profile(&mut rng, family);
            let (lo, hi) = p.effective_window(1e-9);
            let mass = simpson(&|t| p.eval(t), lo, hi, 1e-13);
            ensure!((1.0 - 1e-6..=1.0 + 1e-10).contains(&mass), "{p}: mass {mass} over [{lo}, {hi}]");
            lowest = lowest.min(mass);

            let s = p.support();
            let (elo, ehi) = expected_support(&p);
            ensure!(s.lo == elo && s.hi == ehi, "{p}: support [{}, {}]", s.lo, s.hi);
            for k in 1..20 {
                let off = k as f64 * 0.37;
                if elo.is_finite() {
                    ensure!(p.eval(elo - off) == 0.0, "{p}: nonzero below support");
                }
                if ehi.is_finite() {
                    ensure!(p.eval(ehi + off) == 0.0, "{p}: nonzero above support");
                }
                let t = lo + (hi - lo) * k as f64 / 20.0;
                ensure!(p.eval(t) > 0.0 && s.contains(t), "{p}: zero inside support at {t}");
            }
        }
    }
    Ok(format!("6 families × 50 parameterisations, lowest mass {lowest:.9}"))
}
