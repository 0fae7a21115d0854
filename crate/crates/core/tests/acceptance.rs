//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --release -p fwps --test acceptance`.

mod suites;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use fwps::classify::{self, OutputFormat, RunConfig, Sample};
use fwps::invariants::{gorenstein_index, is_gorenstein, picard_index, DegreeMatrix, GeneratorMatrix};
use fwps::record::ClassificationRecord;
use fwps::reflexive::{cross_check, is_reflexive};
use fwps::verify::verify_file;
use fwps::weights::enumerate_gorenstein_weights;

const SMALL_COUNTS: [(usize, usize); 3] = [(2, 5), (3, 48), (4, 1561)];
const SMALL_BUDGET: Duration = Duration::from_secs(60);
const DIM5_COUNT: usize = 220_794;
const DIM5_BUDGET: Duration = Duration::from_secs(30 * 60);
const DIM6_SHARDS: usize = 100;
const DIM6_SEED: u64 = 2026;
const DIM6_FIRST_LEG: usize = 40;
const WEIGHT_COUNTS: [usize; 6] = [1, 3, 14, 147, 3462, 294_314];
const DETERMINISM_THREADS: [usize; 3] = [1, 4, 8];
const GOLDEN: &str = "1,1,1,4;0,1,2,2@4";

type Outcome = suites::Outcome;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, name: &str, outcome: Outcome, started: Instant) {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                self.failed += 1;
                println!("FAIL  {name}: {detail} ({secs:.1}s)");
            }
        }
    }

    fn check(&mut self, name: &str, f: impl FnOnce() -> Outcome) {
        let started = Instant::now();
        let outcome = f();
        self.line(name, outcome, started);
    }
}

fn classify_to(dir: &Path, dim: usize, threads: usize, sample: Option<Sample>, stop_after: Option<usize>) -> Result<PathBuf, String> {
    let out = dir.join(format!("dim{dim}-t{threads}.jsonl"));
    let config = RunConfig { dim, threads, out: out.clone(), format: OutputFormat::Jsonl, sample, stop_after };
    let summary = classify::run(&config).map_err(|e| e.to_string())?;
    if stop_after.is_none() && !summary.complete {
        return Err(format!("dimension {dim} run did not complete"));
    }
    Ok(out)
}

fn records(path: &Path) -> Result<Vec<ClassificationRecord>, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    text.lines().map(|l| ClassificationRecord::from_line(l).map_err(|e| e.to_string())).collect()
}

fn small_counts(dir: &Path) -> Outcome {
    let mut got = Vec::new();
    for (dim, expected) in SMALL_COUNTS {
        let started = Instant::now();
        let n = records(&classify_to(dir, dim, 1, None, None)?)?.len();
        if n != expected {
            return Err(format!("dimension {dim}: {n} classes, expected {expected}"));
        }
        if started.elapsed() > SMALL_BUDGET {
            return Err(format!("dimension {dim} took {:?}", started.elapsed()));
        }
        got.push(format!("dim {dim} → {n}"));
    }
    Ok(got.join(", "))
}

fn dimension_five(dir: &Path) -> Outcome {
    let started = Instant::now();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let out = classify_to(dir, 5, threads, None, None)?;
    let elapsed = started.elapsed();
    let n = fs::read_to_string(&out).map_err(|e| e.to_string())?.lines().count();
    fs::remove_file(&out).ok();
    if n != DIM5_COUNT {
        return Err(format!("{n} classes, expected {DIM5_COUNT}"));
    }
    if elapsed > DIM5_BUDGET {
        return Err(format!("{n} classes but took {elapsed:?}"));
    }
    Ok(format!("{n} classes on {threads} thread(s)"))
}

// Interrupted after the first leg, resumed, then verified line by line.
fn dimension_six_sample(dir: &Path) -> Outcome {
    let sample = Some(Sample { count: DIM6_SHARDS, seed: DIM6_SEED });
    let out = classify_to(dir, 6, 1, sample, Some(DIM6_FIRST_LEG))?;
    let manifest = classify::manifest_path(&out);
    let summary = classify::resume(&manifest, 1, None).map_err(|e| e.to_string())?;
    if !summary.complete || summary.shards_total != DIM6_SHARDS {
        return Err(format!("{} of {} shards done", summary.shards_done, summary.shards_total));
    }
    let report = verify_file(&out).map_err(|e| e.to_string())?;
    match report.failure {
        None => Ok(format!("{DIM6_SHARDS} shards (seed {DIM6_SEED}), {} records verified after a resume", report.records)),
        Some(f) => Err(format!("line {}: {}", f.line, f.reason)),
    }
}

fn golden() -> Outcome {
    let q = DegreeMatrix::parse_unverified(GOLDEN).map_err(|e| e.to_string())?;
    let (pic, iota) = (picard_index(&q), gorenstein_index(&q));
    if (pic, iota) == (8, 8) {
        Ok(format!("{GOLDEN}: Picard index {pic}, Gorenstein index {iota}"))
    } else {
        Err(format!("{GOLDEN}: Picard index {pic}, Gorenstein index {iota}, expected 8 and 8"))
    }
}

// Both directions: each record is Gorenstein and its stored normal form is
// reflexive by the dual-vertex test, and the two predicates agree on the
// degree matrix itself.
fn oracle_equivalence(dir: &Path) -> Outcome {
    let mut n = 0;
    for (dim, _) in SMALL_COUNTS {
        for r in records(&dir.join(format!("dim{dim}-t1.jsonl")))? {
            let p = GeneratorMatrix::new(r.normal_form.rows().to_vec()).map_err(|e| e.to_string())?;
            let reflexive = is_reflexive(&p).map_err(|e| e.to_string())?;
            let agree = cross_check(&r.degree).map_err(|e| e.to_string())?;
            if !(is_gorenstein(&r.degree) && reflexive && agree) {
                return Err(format!("disagreement on {}", r.degree));
            }
            n += 1;
        }
    }
    Ok(format!("{n} records of dimensions 2 to 4 agree"))
}

fn determinism(dir: &Path) -> Outcome {
    let mut outputs = Vec::new();
    for threads in DETERMINISM_THREADS {
        let out = classify_to(dir, 4, threads, None, None)?;
        outputs.push(fs::read(out).map_err(|e| e.to_string())?);
    }
    if outputs.windows(2).all(|w| w[0] == w[1]) {
        Ok(format!("dimension 4 output identical for threads {DETERMINISM_THREADS:?} ({} bytes)", outputs[0].len()))
    } else {
        Err(format!("outputs differ across threads {DETERMINISM_THREADS:?}"))
    }
}

fn weight_counts() -> Outcome {
    let got: Vec<usize> = (1..=WEIGHT_COUNTS.len()).map(|n| enumerate_gorenstein_weights(n).len()).collect();
    if got == WEIGHT_COUNTS {
        Ok(format!("{got:?}"))
    } else {
        Err(format!("{got:?}, expected {WEIGHT_COUNTS:?}"))
    }
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let dir = dir.path();
    let mut report = Report { failed: 0 };
    report.check("counts in dimensions 2-4", || small_counts(dir));
    report.check("golden invariants", golden);
    report.check("oracle equivalence", || oracle_equivalence(dir));
    report.check("determinism across thread counts", || determinism(dir));
    report.check("G-matrix composition law", || suites::g_matrix_composition(10_000));
    report.check("automorphism factorization round trip", || suites::factorization_round_trip(1_000));
    report.check("generation vs subgroup closure", suites::generation_vs_closure);
    report.check("minimal torsion vs exhaustive scan", suites::minimal_torsion_vs_scan);
    report.check("normal form invariance", || suites::normal_form_invariance(1_000));
    report.check("weight enumeration counts", weight_counts);
    report.check("count in dimension 5", || dimension_five(dir));
    report.check("dimension 6 sample", || dimension_six_sample(dir));
    println!("{} failed", report.failed);
    if report.failed > 0 {
        std::process::exit(1);
    }
}
