use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context};
use deli_core::data_io::{
    self, load_geojson, load_points_csv, load_segments_csv, render_profile_svg, synth, to_segments,
    write_points_to, write_segments_to, BoundingBox, ResultDocument, SegmentRecord,
};
use deli_core::engine::{ClusterLabels, Engine, Label, RunStats, SeededChooser};
use deli_core::missing_data::{lift_dataset, AxisDomains};
use deli_core::neighborhood::{NeighbourhoodRelation, Relation};
use deli_core::oracle::relation_matrix;
use deli_core::{ClusterId, Kind, NeighbourhoodSpec, Profile, SegmentLike};
use serde_json::json;

use crate::config::{build_run_config, parse_axis, precheck, FileConfig};
use crate::{usage, BenchArgs, ClusterArgs, Dataset, GenArgs, InputFormat, LiftArgs, PlotArgs};

fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    })
}

pub fn gen(a: GenArgs) -> anyhow::Result<()> {
    let count = a.count.unwrap_or(match a.dataset {
        Dataset::Convex => 150,
        Dataset::Doughnut => 400,
        Dataset::Planted => 475,
    });
    if count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let out = open_out(a.out.as_deref())?;
    match a.dataset {
        Dataset::Convex => write_segments_to(&synth::gen_convex(count, a.seed), out)?,
        Dataset::Doughnut => write_segments_to(&synth::gen_doughnut(count, a.seed), out)?,
        Dataset::Planted => {
            let p = synth::gen_planted(count, a.seed);
            write_points_to(&p.table, out)?;
            if let Some(path) = &a.truth {
                let truth: BTreeMap<&str, usize> =
                    p.table.records.iter().map(|r| r.0.as_str()).zip(p.truth.iter().copied()).collect();
                std::fs::write(path, serde_json::to_string_pretty(&truth)? + "\n")?;
            }
        }
    }
    Ok(())
}

fn load_records(path: &Path, format: InputFormat, crop: Option<&str>) -> anyhow::Result<Vec<SegmentRecord>> {
    let geo = match format {
        InputFormat::Csv => false,
        InputFormat::Geojson => true,
        InputFormat::Auto => matches!(
            path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
            Some("geojson" | "json")
        ),
    };
    if !geo && crop.is_some() {
        return Err(usage("--crop only applies to GeoJSON input"));
    }
    if geo {
        let crop = crop
            .map(|c| c.parse::<BoundingBox>().map_err(|e| usage(format!("--crop: {e}"))))
            .transpose()?;
        let g = load_geojson(path, crop).with_context(|| format!("loading {}", path.display()))?;
        Ok(g.records)
    } else {
        load_segments_csv(path).with_context(|| format!("loading {}", path.display()))
    }
}

pub fn cluster(a: ClusterArgs) -> anyhow::Result<()> {
    let file = match &a.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let mut cfg = file.overlay(&a);
    cfg.version.get_or_insert(1);
    // Parameter combinations are checked before any file is read.
    precheck(&cfg)?;
    let records = load_records(&a.input, a.format, a.crop.as_deref())?;
    let (lines, ids) = to_segments(&records)?;
    let (run, explicit_mode) = build_run_config(&cfg, &ids)?;
    if !explicit_mode {
        eprintln!("notice: using expand mode (DBSCAN-style growth); pass --mode literal for the plain draw loop without expansion");
    }
    let labels = deli_core::cluster(&lines, &run).map_err(|e| usage(e.to_string()))?;

    if let Some(p) = &a.trace {
        let f = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        let mut w = std::io::BufWriter::new(f);
        labels.write_trace(&mut w)?;
        w.flush()?;
    }
    if let Some(p) = &a.out {
        let metadata = json!({
            "input": a.input.file_name().map(|s| s.to_string_lossy().into_owned()),
            "lines": lines.len(),
            "config": cfg,
            "mode": run.mode,
            "seed": run.rng_seed,
            "relation_evals": labels.stats.relation_evals,
            "clusters_may_overlap": labels.clusters_may_overlap,
        });
        ResultDocument::from_labels(metadata, &labels, &ids).write(p)?;
    }
    if let Some(p) = &a.svg {
        data_io::write_svg(&lines, &labels, p)?;
    }
    println!(
        "k={} outliers={} evals={}",
        labels.num_clusters(),
        labels.noise().len(),
        labels.stats.relation_evals
    );
    Ok(())
}

pub fn lift(a: LiftArgs) -> anyhow::Result<()> {
    let mut domains = AxisDomains::new();
    for s in &a.axes {
        let d = parse_axis(s).map_err(usage)?;
        if domains.insert(d.axis, d).is_some() {
            return Err(usage(format!("axis {} declared twice", d.axis + 1)));
        }
    }
    let table = load_points_csv(&a.input).with_context(|| format!("loading {}", a.input.display()))?;
    if let Some(&k) = domains.keys().find(|&&k| k >= table.columns.len()) {
        return Err(usage(format!("axis {} is beyond the {} data columns", k + 1, table.columns.len())));
    }
    let lifted = lift_dataset(&table.records, &domains)?;
    let records: Vec<SegmentRecord> = lifted
        .lines
        .iter()
        .zip(&lifted.ids)
        .map(|(l, id)| SegmentRecord {
            id: id.clone(),
            x: l.x().coords().to_vec(),
            y: l.y().coords().to_vec(),
        })
        .collect();
    let f = std::fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_segments_to(&records, f)?;
    let map: BTreeMap<&str, Option<String>> = lifted
        .ids
        .iter()
        .map(String::as_str)
        .zip(lifted.profiles.iter().map(|p| p.map(|p| p.to_string())))
        .collect();
    let profiles_out = a
        .profiles_out
        .clone()
        .unwrap_or_else(|| a.out.with_extension("profiles.json"));
    std::fs::write(&profiles_out, serde_json::to_string_pretty(&map)? + "\n")?;
    let n_lifted = lifted.missing_axis.iter().filter(|m| m.is_some()).count();
    println!("records={} lifted={}", records.len(), n_lifted);
    Ok(())
}

fn labels_from_document(doc: &ResultDocument, ids: &[String]) -> ClusterLabels {
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut assignment = vec![Label::Noise; ids.len()];
    let mut clusters = Vec::new();
    for c in doc.clusters.iter().rev() {
        for m in &c.members {
            if let Some(&i) = index.get(m.as_str()) {
                assignment[i] = Label::Cluster(ClusterId(c.id));
            }
        }
    }
    for c in &doc.clusters {
        let mut m: Vec<usize> = c.members.iter().filter_map(|m| index.get(m.as_str()).copied()).collect();
        m.sort_unstable();
        clusters.push(m);
    }
    ClusterLabels {
        core: vec![None; ids.len()],
        assignment,
        clusters,
        seed_order: vec![],
        trace: vec![],
        clusters_may_overlap: false,
        stats: RunStats::default(),
    }
}

pub fn plot(a: PlotArgs) -> anyhow::Result<()> {
    if let Some(p) = &a.profile {
        let profile: Profile = p.parse().map_err(|e: deli_core::ProfileError| usage(e.to_string()))?;
        if !(a.alpha.is_finite() && a.alpha > 0.0) {
            return Err(usage("--alpha must be positive"));
        }
        std::fs::write(&a.svg, render_profile_svg(&profile, a.alpha))?;
        return Ok(());
    }
    let input = a.input.as_ref().ok_or_else(|| usage("give a segments file or --profile"))?;
    let records = load_segments_csv(input).with_context(|| format!("loading {}", input.display()))?;
    let (lines, ids) = to_segments(&records)?;
    let labels = match &a.results {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            labels_from_document(&serde_json::from_str(&text)?, &ids)
        }
        None => labels_from_document(&ResultDocument::new(serde_json::Value::Null, vec![], vec![]), &ids),
    };
    data_io::write_svg(&lines, &labels, &a.svg)?;
    Ok(())
}

/// Unit segments spaced 10 apart: nothing relates to anything else at α = 1.
fn isolated(n: usize) -> Vec<SegmentLike> {
    (0..n)
        .map(|i| {
            let x = 10.0 * i as f64;
            SegmentLike::from_coords(&[x, 0.0], &[x + 1.0, 0.0], Kind::Segment).expect("finite")
        })
        .collect()
}

fn run_mode<R: Relation + ?Sized>(e: Engine<'_, R>, literal: bool, seed: u64) -> ClusterLabels {
    let mut ch = SeededChooser::new(seed);
    if literal {
        e.run_literal(&mut ch)
    } else {
        e.run_expand(&mut ch)
    }
}

pub fn bench(a: BenchArgs) -> anyhow::Result<()> {
    if a.sizes.is_empty() || a.sizes.contains(&0) || a.repeats == 0 {
        return Err(usage("--sizes must be positive and --repeats at least 1"));
    }
    let spec = NeighbourhoodSpec::v1(2, 1.0);
    let mut prev: Option<f64> = None;
    let mut ok = true;
    for &n in &a.sizes {
        let lines = isolated(n);
        let rel = NeighbourhoodRelation::new(&lines, &spec)?;
        let mut best = f64::INFINITY;
        let mut labels = None;
        for _ in 0..a.repeats {
            let t = Instant::now();
            let l = Engine::new(&rel, spec.cardinality).run_literal(&mut SeededChooser::new(0));
            best = best.min(t.elapsed().as_secs_f64());
            labels = Some(l);
        }
        let labels = labels.expect("at least one repeat");
        let evals = labels.stats.relation_evals;
        let square = (n * n) as u64;
        ok &= evals <= square;
        let ratio = prev.map_or(String::new(), |p| format!(" ratio={:.2}", best / p));
        println!(
            "n={n} evals={evals} n2={square} ms={:.3} aux_bytes={}{ratio}",
            best * 1e3,
            labels.stats.peak_aux_bytes
        );
        prev = Some(best);
        if a.verify {
            let m = relation_matrix(&lines, &spec)?;
            let via_matrix = Engine::new(&m, spec.cardinality).run_literal(&mut SeededChooser::new(0));
            let same = via_matrix.clusters == labels.clusters && via_matrix.assignment == labels.assignment;
            println!("n={n} verify={}", if same { "ok" } else { "MISMATCH" });
            ok &= same;
        }
    }
    if a.verify {
        let recs = synth::gen_doughnut(400, 7);
        let (lines, _) = to_segments(&recs)?;
        let spec = NeighbourhoodSpec::v1(5, 12.0);
        let rel = NeighbourhoodRelation::new(&lines, &spec)?;
        let m = relation_matrix(&lines, &spec)?;
        for literal in [true, false] {
            let direct = run_mode(Engine::new(&rel, 5), literal, 7);
            let tabled = run_mode(Engine::new(&m, 5), literal, 7);
            let same = direct.clusters == tabled.clusters && direct.assignment == tabled.assignment;
            println!(
                "doughnut mode={} verify={}",
                if literal { "literal" } else { "expand" },
                if same { "ok" } else { "MISMATCH" }
            );
            ok &= same;
        }
    }
    if !ok {
        bail!("benchmark checks failed");
    }
    Ok(())
}
