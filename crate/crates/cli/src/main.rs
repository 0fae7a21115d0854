use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fwps::classify::{self, OutputFormat, RunConfig, RunManifest, RunSummary, Sample};
use fwps::invariants::{gorenstein_index, gorenstein_report, invariant_bundle, picard_index, DegreeMatrix};
use fwps::verify::verify_file;

const USAGE: u8 = 2;
const FAILED: u8 = 1;

#[derive(Parser)]
#[command(name = "fwps", version, about = "Gorenstein fake weighted projective spaces and reflexive simplices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify all Gorenstein fake weighted projective spaces of a dimension.
    Classify {
        #[arg(long)]
        dim: usize,
        /// Worker threads [default: available cores].
        #[arg(long, env = "FWPS_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
        threads: Option<u32>,
        /// Output file [default: fwps-dimN.jsonl or fwps-dimN.csv].
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        /// Continue the interrupted run recorded in this manifest.
        #[arg(long, value_name = "MANIFEST")]
        resume: Option<PathBuf>,
        /// Only classify this many randomly chosen weight vectors.
        #[arg(long, hide = true, requires = "seed")]
        sample: Option<usize>,
        #[arg(long, hide = true)]
        seed: Option<u64>,
        /// Stop cleanly after this many weight vectors.
        #[arg(long, hide = true)]
        stop_after: Option<usize>,
    },
    /// Re-check every record of a classification file.
    Verify {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
    },
    /// Picard index, Gorenstein index and Gorenstein conditions of a degree matrix.
    Invariants {
        /// Rows separated by ';', entries by ',', torsion rows suffixed '@order',
        /// e.g. "1,1,1;0,1,2@3".
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
    /// Histogram of a classification file by class group.
    Stats {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Classify { dim, threads, out, format, resume, sample, seed, stop_after } => {
            let threads = threads.map_or_else(default_threads, |t| t as usize);
            classify_command(dim, threads, out, format, resume, sample.zip(seed), stop_after)
        }
        Command::Verify { input } => verify_command(&input),
        Command::Invariants { matrix } => invariants_command(&matrix),
        Command::Stats { input } => stats_command(&input),
    };
    ExitCode::from(code)
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn classify_command(
    dim: usize,
    threads: usize,
    out: Option<PathBuf>,
    format: Format,
    resume: Option<PathBuf>,
    sample: Option<(usize, u64)>,
    stop_after: Option<usize>,
) -> u8 {
    let result = match resume {
        Some(manifest) => match RunManifest::load(&manifest) {
            Ok(m) if m.dim != dim => {
                eprintln!("error: {} belongs to a dimension {} run", manifest.display(), m.dim);
                return USAGE;
            }
            Ok(_) => classify::resume(&manifest, threads, stop_after),
            Err(e) => Err(e),
        },
        None => {
            let format = match format {
                Format::Jsonl => OutputFormat::Jsonl,
                Format::Csv => OutputFormat::Csv,
            };
            let ext = if format == OutputFormat::Csv { "csv" } else { "jsonl" };
            let out = out.unwrap_or_else(|| PathBuf::from(format!("fwps-dim{dim}.{ext}")));
            let sample = sample.map(|(count, seed)| Sample { count, seed });
            classify::run(&RunConfig { dim, threads, out, format, sample, stop_after })
        }
    };
    match result {
        Ok(summary) => {
            print_summary(dim, &summary);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            USAGE
        }
    }
}

fn print_summary(dim: usize, s: &RunSummary) {
    if !s.complete {
        println!("stopped with {} of {} weight vectors done, {} classes so far", s.shards_done, s.shards_total, s.records);
        println!("resume with: fwps classify --dim {dim} --resume {}", s.manifest.display());
        return;
    }
    println!("{} classes in dimension {dim} from {} weight vectors", s.records, s.shards_total);
    println!("output: {}", s.output.display());
    for (group, count) in &s.histogram {
        println!("  {group}: {count}");
    }
}

fn verify_command(input: &Path) -> u8 {
    match verify_file(input) {
        Ok(report) => match report.failure {
            None => {
                println!("clean: {} records", report.records);
                0
            }
            Some(f) => {
                println!("line {}: {}", f.line, f.reason);
                println!("{} records passed before the failure", report.records);
                FAILED
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            USAGE
        }
    }
}

fn invariants_command(literal: &str) -> u8 {
    let q = match DegreeMatrix::parse_unverified(literal) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE;
        }
    };
    let b = invariant_bundle(&q);
    let report = gorenstein_report(&q);
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    println!("degree matrix: {q}");
    println!("L = {}, M = {}, S = {}", b.l, b.m, b.s);
    println!("Picard index LM = {}", picard_index(&q));
    println!("Gorenstein index = {}", gorenstein_index(&q));
    println!("  L | S: {}", yes_no(report.lcm_divides_sum));
    for (j, (&m, &ok)) in b.m_factors.iter().zip(&report.m_divides_quotient).enumerate() {
        println!("  L*M_{} | S (M_{} = {m}): {}", j + 1, j + 1, yes_no(ok));
    }
    for (j, &ok) in report.rows_sum_to_zero.iter().enumerate() {
        println!("  torsion row {} sums to 0 mod {}: {}", j + 1, q.factors()[j], yes_no(ok));
    }
    println!("Gorenstein: {}", yes_no(report.holds()));
    match q.failing_column() {
        None => 0,
        Some(c) => {
            let rest: Vec<String> = (0..q.weights().len()).filter(|&i| i != c).map(|i| (i + 1).to_string()).collect();
            println!("not a degree matrix: columns {} do not generate the class group", rest.join(", "));
            FAILED
        }
    }
}

fn stats_command(input: &Path) -> u8 {
    match classify::stats(input) {
        Ok(report) => {
            println!("{} records", report.records);
            for (dim, count) in &report.by_dim {
                println!("dimension {dim}: {count}");
            }
            for (group, count) in &report.histogram {
                println!("  {group}: {count}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            USAGE
        }
    }
}
