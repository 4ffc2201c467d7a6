use deli_core::neighborhood::{relates_prob, relates_v1, NeighbourhoodRelation, Relation, SearchParams};
use deli_core::oracle::relation_matrix;
use deli_core::{Kind, NeighbourhoodSpec, PerLine, Profile, SegmentLike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ensure, Outcome};

fn random_line(rng: &mut ChaCha8Rng, n: usize) -> SegmentLike {
    loop {
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let l = match rng.random_range(0..3) {
            0 => SegmentLike::from_coords(&a, &b, Kind::Line),
            1 => SegmentLike::from_coords(&a, &b, Kind::Segment),
            _ => SegmentLike::from_coords(&a, &a, Kind::Segment),
        };
        if let Ok(l) = l {
            return l;
        }
    }
}

/// Profiles that are positive on part of `[0, 1]`.
fn random_profile(rng: &mut ChaCha8Rng) -> Profile {
    match rng.random_range(0..6) {
        0 => {
            let a = rng.random_range(-0.5..0.9);
            Profile::uniform(a, a + rng.random_range(0.1..2.0))
        }
        1 => Profile::normal(rng.random_range(0.0..1.0), rng.random_range(1e-3..1.0)),
        2 => Profile::ellipsoidal(rng.random_range(0.1..2.0), rng.random_range(0.1..2.0)),
        3 => Profile::gamma(rng.random_range(1.0..6.0), rng.random_range(0.5..6.0)),
        4 => Profile::beta(rng.random_range(1.0..5.0), rng.random_range(1.0..5.0)),
        _ => Profile::exponential(rng.random_range(0.2..6.0)),
    }
    .expect("valid parameters")
}

pub fn relation_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4e1);
    let mut per_version = [0usize; 3];
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(2..=4);
        let l = random_line(&mut rng, n);
        let p = random_profile(&mut rng);
        let alpha = rng.random_range(0.01..5.0);
        let version = rng.random_range(1..=3u8);
        // A degenerate segment has no axis to integrate along (no V2 volume)
        // and projects every point to t = 0.
        if version > 1 && l.is_degenerate() && (version == 2 || p.eval(0.0) <= 0.0) {
            continue;
        }
        if version > 1 && !l.is_degenerate() {
            let (lo, hi) = l.domain();
            let (wlo, whi) = p.effective_window(1e-6);
            let (a, b) = (lo.max(wlo), hi.min(whi));
            if !(a < b && (1..50).any(|k| p.eval(a + (b - a) * k as f64 / 50.0) > 0.0)) {
                continue;
            }
        }
        let spec = match version {
            1 => NeighbourhoodSpec::v1(1, alpha),
            2 => NeighbourhoodSpec::v2(1, rng.random_range(0.01..10.0), PerLine::Constant(Some(p))),
            _ => NeighbourhoodSpec::v3(1, PerLine::Constant(alpha), PerLine::Constant(Some(p))),
        };
        let lines = [l];
        let rel = NeighbourhoodRelation::new(&lines, &spec).map_err(|e| e.to_string())?;
        ensure!(rel.relates(0, 0), "not reflexive: {:?} with {spec:?}", lines[0]);
        per_version[version as usize - 1] += 1;
        checked += 1;
    }

    let pair = vec![
        SegmentLike::from_coords(&[0.0, 0.0], &[1.0, 0.0], Kind::Segment).unwrap(),
        SegmentLike::from_coords(&[0.0, 2.0], &[1.0, 2.0], Kind::Segment).unwrap(),
    ];
    let spec = NeighbourhoodSpec {
        alpha: Some(PerLine::Each(vec![3.0, 0.5])),
        ..NeighbourhoodSpec::v1(1, 1.0)
    };
    let m = relation_matrix(&pair, &spec).map_err(|e| e.to_string())?;
    ensure!(m.get(0, 1) && !m.get(1, 0), "asymmetry witness failed");

    let search = SearchParams::default();
    let mut held = 0;
    for i in 0..500 {
        let n = rng.random_range(2..=4);
        let (l1, l2) = (random_line(&mut rng, n), random_line(&mut rng, n));
        let a = rng.random_range(0.05..3.0);
        let b = a * rng.random_range(1.0..4.0);
        ensure!(!relates_v1(&l1, &l2, a) || relates_v1(&l1, &l2, b), "distance rule not monotone at pair {i}");
        let p = random_profile(&mut rng);
        let p2 = rng.random_bool(0.5).then(|| random_profile(&mut rng));
        let small = relates_prob(&l1, &p, a, &l2, p2.as_ref(), &search);
        ensure!(
            !small || relates_prob(&l1, &p, b, &l2, p2.as_ref(), &search),
            "density rule not monotone at pair {i}"
        );
        held += usize::from(small);
    }
    Ok(format!(
        "reflexive on 1000 lines (V1/V2/V3 = {}/{}/{}); witness asymmetric; monotone on 500 pairs ({held} related at the smaller α)",
        per_version[0], per_version[1], per_version[2]
    ))
}
