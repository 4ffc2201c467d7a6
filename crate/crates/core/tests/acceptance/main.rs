//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod alloc;
mod clustering;
mod data;
mod geometry;
mod profiles;
mod relation;

use std::process::ExitCode;
use std::time::Instant;

#[global_allocator]
static ALLOC: alloc::Counting = alloc::Counting;

type Outcome = Result<String, String>;

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("distance exactness", geometry::distance_exactness),
        ("volume oracles", profiles::volume_oracles),
        ("scaling law", profiles::scaling_law),
        ("relation properties", relation::relation_properties),
        ("point DBSCAN equivalence", clustering::dbscan_equivalence),
        ("literal-mode trace fidelity", clustering::literal_trace),
        ("quadratic cost, linear memory", clustering::complexity),
        ("doughnut morphology", data::doughnut_morphology),
        ("planted 7-D clusters with missing values", data::planted_recovery),
        ("profile normalisation and support", profiles::profile_correctness),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.2}s]: {detail}", k + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.2}s]: {reason}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// `Err(msg)` unless `cond`.
#[macro_export]
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}
