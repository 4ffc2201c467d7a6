use std::time::Instant;

use deli_core::data_io::synth::{gen_doughnut, gen_planted, PLANTED_RANGE};
use deli_core::data_io::to_segments;
use deli_core::engine::is_core;
use deli_core::missing_data::{lift_dataset, AxisDomain, AxisDomains};
use deli_core::neighborhood::NeighbourhoodRelation;
use deli_core::oracle::adjusted_rand_index;
use deli_core::{cluster, Label, Mode, NeighbourhoodSpec, PerLine, RunConfig};

use crate::{ensure, Outcome};

const CENTRE: f64 = 60.0;

pub fn doughnut_morphology() -> Outcome {
    let mut notes = Vec::new();
    for seed in [7u64, 11, 23] {
        let records = gen_doughnut(400, seed);
        let (lines, _) = to_segments(&records).map_err(|e| e.to_string())?;
        let mid: Vec<(f64, f64)> = records
            .iter()
            .map(|r| (0.5 * (r.x[0] + r.y[0]) - CENTRE, 0.5 * (r.x[1] + r.y[1]) - CENTRE))
            .collect();
        let radius: Vec<f64> = mid.iter().map(|(x, y)| x.hypot(*y)).collect();
        let ring: Vec<usize> = (0..lines.len()).filter(|&i| (28.0..44.0).contains(&radius[i])).collect();
        let blob: Vec<usize> = (0..lines.len()).filter(|&i| radius[i] < 15.0).collect();

        let run = |c: usize| {
            let cfg = RunConfig {
                spec: NeighbourhoodSpec::v1(c, 12.0),
                mode: Mode::Expand,
                rng_seed: seed,
                threads: 1,
            };
            cluster(&lines, &cfg).map_err(|e| e.to_string())
        };
        let five = run(5)?;
        ensure!(five.num_clusters() >= 2, "seed {seed}: {} cluster(s) at c=5", five.num_clusters());

        // The cluster holding most ring lines must wrap all the way round.
        let majority = |members: &[usize]| {
            let mut counts = std::collections::BTreeMap::new();
            for &i in members {
                if let Label::Cluster(c) = five.assignment[i] {
                    *counts.entry(c).or_insert(0usize) += 1;
                }
            }
            counts.into_iter().max_by_key(|&(_, k)| k)
        };
        let (ring_id, ring_hits) = majority(&ring).ok_or(format!("seed {seed}: ring unclustered"))?;
        let (blob_id, blob_hits) = majority(&blob).ok_or(format!("seed {seed}: blob unclustered"))?;
        ensure!(ring_id != blob_id, "seed {seed}: ring and blob merged into one cluster");
        ensure!(ring_hits * 10 >= ring.len() * 9, "seed {seed}: ring cluster holds {ring_hits}/{}", ring.len());
        ensure!(blob_hits * 10 >= blob.len() * 9, "seed {seed}: blob cluster holds {blob_hits}/{}", blob.len());
        let mut sectors = [false; 12];
        for &i in &ring {
            if five.assignment[i] == Label::Cluster(ring_id) {
                let a = mid[i].1.atan2(mid[i].0).rem_euclid(std::f64::consts::TAU);
                sectors[((a / std::f64::consts::TAU * 12.0) as usize).min(11)] = true;
            }
        }
        ensure!(sectors.iter().all(|&s| s), "seed {seed}: ring cluster misses sectors {sectors:?}");

        // Raising c: the core set shrinks strictly, line by line.
        let rel = NeighbourhoodRelation::new(&lines, &NeighbourhoodSpec::v1(1, 12.0)).map_err(|e| e.to_string())?;
        let core5: Vec<bool> = (0..lines.len()).map(|i| is_core(&rel, i, 5)).collect();
        let core8: Vec<bool> = (0..lines.len()).map(|i| is_core(&rel, i, 8)).collect();
        ensure!(core8.iter().zip(&core5).all(|(&a, &b)| !a || b), "seed {seed}: core at c=8 but not at c=5");
        let lost = core5.iter().zip(&core8).filter(|(&a, &b)| a && !b).count();
        ensure!(lost > 0, "seed {seed}: core set unchanged");
        let eight = run(8)?;
        let core_run: Vec<bool> = eight.core.iter().map(|c| c.unwrap_or(false)).collect();
        ensure!(core_run == core8, "seed {seed}: engine core flags disagree with is_core");
        ensure!(
            eight.noise().len() >= five.noise().len(),
            "seed {seed}: outliers fell from {} to {}",
            five.noise().len(),
            eight.noise().len()
        );
        notes.push(format!(
            "seed {seed}: k={} outliers {}→{}, {lost} cores lost",
            five.num_clusters(),
            five.noise().len(),
            eight.noise().len()
        ));
    }
    Ok(notes.join("; "))
}

pub fn planted_recovery() -> Outcome {
    let mut notes = Vec::new();
    for seed in 1u64..=5 {
        let planted = gen_planted(475, seed);
        let dim = planted.table.columns.len();
        let domains: AxisDomains = (0..dim)
            .map(|k| (k, AxisDomain::uniform(k, -PLANTED_RANGE, PLANTED_RANGE).unwrap()))
            .collect();
        let start = Instant::now();
        let lifted = lift_dataset(&planted.table.records, &domains).map_err(|e| e.to_string())?;
        let cfg = RunConfig {
            spec: NeighbourhoodSpec::v3(7, PerLine::Constant(1.0), PerLine::Each(lifted.profiles.clone())),
            mode: Mode::Expand,
            rng_seed: seed,
            threads: 1,
        };
        let labels = cluster(&lifted.lines, &cfg).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        ensure!(secs < 30.0, "seed {seed}: {secs:.1}s");

        let flat = labels.flat();
        let complete: Vec<usize> = (0..flat.len()).filter(|&i| lifted.missing_axis[i].is_none()).collect();
        let ours: Vec<usize> = complete.iter().map(|&i| flat[i]).collect();
        let truth: Vec<usize> = complete.iter().map(|&i| planted.truth[i]).collect();
        let ari = adjusted_rand_index(&ours, &truth);
        ensure!(ari >= 0.9, "seed {seed}: ARI {ari:.3} on complete records");

        let noise: Vec<usize> = (0..flat.len()).filter(|&i| planted.truth[i] == 0).collect();
        let flagged = noise.iter().filter(|&&i| flat[i] == 0).count();
        ensure!(flagged * 5 >= noise.len() * 4, "seed {seed}: {flagged}/{} planted noise flagged", noise.len());
        notes.push(format!("ARI {ari:.3}, noise {flagged}/{}, {secs:.2}s", noise.len()));
    }
    Ok(notes.join("; "))
}
