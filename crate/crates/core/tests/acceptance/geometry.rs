use deli_core::oracle::grid_min_distance;
use deli_core::{min_distance, Kind, SegmentLike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ensure, Outcome};

pub fn distance_exactness() -> Outcome {
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xd15);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = 2 + i % 4;
        let mut c = || (0..n).map(|_| rng.random_range(-5.0..5.0)).collect::<Vec<f64>>();
        let (a, b, p, q) = (c(), c(), c(), c());
        let l1 = SegmentLike::from_coords(&a, &b, Kind::Segment).unwrap();
        let l2 = SegmentLike::from_coords(&p, &q, Kind::Segment).unwrap();
        let exact = min_distance(&l1, &l2).map_err(|e| e.to_string())?.distance;
        let grid = grid_min_distance(&l1, &l2, 1e-3).map_err(|e| e.to_string())?;
        let norm = |v: Vec<f64>| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let bound = (norm(l1.direction()) + norm(l2.direction())) * 1e-3;
        let gap = (exact - grid).abs();
        ensure!(gap <= bound, "pair {i} (n={n}): |{exact} - {grid}| = {gap:e} > {bound:e}");
        worst = worst.max(gap / bound);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "took {secs:.1}s (limit 10s)");
    Ok(format!("1000 pairs, worst gap {:.3} of bound, {secs:.2}s", worst))
}
