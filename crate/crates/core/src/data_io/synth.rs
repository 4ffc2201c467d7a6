//! Synthetic datasets.
//!
//! These are analogs designed to show the same shapes as the classic convex
//! and doughnut test pictures; they are not copies of any published files.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{PointTable, SegmentRecord};

fn chord(id: String, cx: f64, cy: f64, theta: f64, len: f64) -> SegmentRecord {
    let (dx, dy) = (0.5 * len * theta.cos(), 0.5 * len * theta.sin());
    SegmentRecord {
        id,
        x: vec![cx - dx, cy - dy],
        y: vec![cx + dx, cy + dy],
    }
}

fn in_disk(rng: &mut ChaCha8Rng, r: f64) -> (f64, f64) {
    let rho = r * rng.random::<f64>().sqrt();
    let a = rng.random_range(0.0..TAU);
    (rho * a.cos(), rho * a.sin())
}

/// Short segments in four well-separated discs on a 100×100 canvas.
///
/// Each segment's midpoint is uniform in a disc of radius 9 and its length is
/// in `[2, 6]`; the discs are at least 45 apart, so a distance threshold of
/// about 12 separates them cleanly.
pub fn gen_convex(count: usize, seed: u64) -> Vec<SegmentRecord> {
    const CENTRES: [(f64, f64); 4] = [(20.0, 22.0), (78.0, 20.0), (24.0, 78.0), (80.0, 76.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let (cx, cy) = CENTRES[i % CENTRES.len()];
            let (dx, dy) = in_disk(&mut rng, 9.0);
            let theta = rng.random_range(0.0..PI);
            let len = rng.random_range(2.0..6.0);
            chord(format!("c{i}"), cx + dx, cy + dy, theta, len)
        })
        .collect()
}

/// Ring of tangent chords around a dense central blob, plus sparse noise in
/// the corners, on a 120×120 canvas centred at (60, 60).
///
/// * 68% ring chords: radius in `[32, 40]`, angle density ∝ `1 + 0.8 cos θ`
///   so one side of the ring is much sparser than the other;
/// * 25% blob: centre ~ N((60,60), 3.5²), short chords;
/// * the rest: uniform noise more than 50 from the centre.
pub fn gen_doughnut(count: usize, seed: u64) -> Vec<SegmentRecord> {
    const C: f64 = 60.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_ring = (count as f64 * 0.68).round() as usize;
    let n_blob = ((count as f64 * 0.25).round() as usize).min(count - n_ring.min(count));
    let n_ring = n_ring.min(count);
    let blob = Normal::new(0.0, 3.5).expect("valid sigma");
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let id = format!("d{i}");
        let rec = if i < n_ring {
            let theta = loop {
                let a = rng.random_range(0.0..TAU);
                if rng.random::<f64>() * 1.8 < 1.0 + 0.8 * a.cos() {
                    break a;
                }
            };
            let r = rng.random_range(32.0..40.0);
            let tilt = rng.random_range(-0.3..0.3);
            let len = rng.random_range(2.0..5.0);
            chord(id, C + r * theta.cos(), C + r * theta.sin(), theta + PI / 2.0 + tilt, len)
        } else if i < n_ring + n_blob {
            let (dx, dy) = (blob.sample(&mut rng), blob.sample(&mut rng));
            let theta = rng.random_range(0.0..PI);
            let len = rng.random_range(1.0..4.0);
            chord(id, C + dx, C + dy, theta, len)
        } else {
            let (x, y) = loop {
                let x = rng.random_range(0.0..2.0 * C);
                let y = rng.random_range(0.0..2.0 * C);
                if (x - C).hypot(y - C) > 50.0 {
                    break (x, y);
                }
            };
            let theta = rng.random_range(0.0..PI);
            let len = rng.random_range(2.0..5.0);
            chord(id, x, y, theta, len)
        };
        out.push(rec);
    }
    out
}

/// A labelled point dataset with some missing coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedPoints {
    pub table: PointTable,
    /// Planted label per record: 0 for noise, `1..=k` for clusters.
    pub truth: Vec<usize>,
}

/// Domain bound for every axis of [`gen_planted`].
pub const PLANTED_RANGE: f64 = 4.0;

/// `count` points in 7-D: four Gaussian clusters (σ = 0.35, centres at least
/// 4 apart inside `[-2.5, 2.5]⁷`), 10% uniform noise over `[-4, 4]⁷`, and
/// 15% of all records with one coordinate (random axis) blanked out.
pub fn gen_planted(count: usize, seed: u64) -> PlantedPoints {
    const DIM: usize = 7;
    const K: usize = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centres: Vec<[f64; DIM]> = Vec::with_capacity(K);
    while centres.len() < K {
        let c: [f64; DIM] = std::array::from_fn(|_| rng.random_range(-2.5..2.5));
        let far = centres
            .iter()
            .all(|o| o.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>() >= 16.0);
        if far {
            centres.push(c);
        }
    }
    let spread = Normal::new(0.0, 0.35).expect("valid sigma");
    let weights = [0.35, 0.28, 0.22, 0.15];
    let n_noise = (count as f64 * 0.10).round() as usize;
    let n_clustered = count - n_noise;
    let mut sizes: Vec<usize> = weights.iter().map(|w| (w * n_clustered as f64).floor() as usize).collect();
    sizes[0] += n_clustered - sizes.iter().sum::<usize>();

    let mut rows: Vec<(Vec<f64>, usize)> = Vec::with_capacity(count);
    for (j, &size) in sizes.iter().enumerate() {
        for _ in 0..size {
            let p = centres[j]
                .iter()
                .map(|c| (c + spread.sample(&mut rng)).clamp(-PLANTED_RANGE, PLANTED_RANGE))
                .collect();
            rows.push((p, j + 1));
        }
    }
    for _ in 0..n_noise {
        rows.push(((0..DIM).map(|_| rng.random_range(-PLANTED_RANGE..PLANTED_RANGE)).collect(), 0));
    }
    // Interleave so that ids carry no class information.
    for i in (1..rows.len()).rev() {
        let j = rng.random_range(0..=i);
        rows.swap(i, j);
    }
    let n_missing = (count as f64 * 0.15).round() as usize;
    let mut records = Vec::with_capacity(count);
    let mut truth = Vec::with_capacity(count);
    for (i, (p, label)) in rows.into_iter().enumerate() {
        let mut vals: Vec<Option<f64>> = p.into_iter().map(Some).collect();
        if i < n_missing {
            vals[rng.random_range(0..DIM)] = None;
        }
        records.push((format!("p{i}"), vals));
        truth.push(label);
    }
    PlantedPoints {
        table: PointTable {
            columns: (1..=DIM).map(|k| format!("v{k}")).collect(),
            records,
        },
        truth,
    }
}
