//! The classification driver: one shard per weight vector, a fixed pool of
//! workers, and a single writer that owns the partial output and the manifest.
//!
//! Shard output is appended to `<out>.partial` in completion order. The
//! manifest `<out>.manifest.json` records, for every finished shard, the byte
//! range it occupies; it is rewritten atomically and only ever refers to
//! bytes already synced to disk. When every shard is done the ranges are
//! copied into `<out>` in ascending weight-vector order, so the result does
//! not depend on the thread count or on interruptions.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::Int;
use crate::error::{Error, Result};
use crate::gluing::{assemble_classes, TorsionPool};
use crate::record::{ClassGroup, ClassificationRecord};
use crate::torsion::admissible_order_pairs;
use crate::weights::enumerate_gorenstein_weights;

pub const FORMAT_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const MANIFEST_INTERVAL: Duration = Duration::from_secs(2);

/// All classes over one weight vector, ordered by normal-form bytes.
pub fn classify_weight(w: &[Int]) -> Vec<ClassificationRecord> {
    assemble_classes(&TorsionPool::new(w)).into_values().map(|(q, nf)| ClassificationRecord::new(q, nf)).collect()
}

/// Rough work estimate used to start expensive shards first: the weight sum
/// times the number of admissible order pairs.
pub fn shard_cost(w: &[Int]) -> u128 {
    let s: Int = w.iter().sum();
    s.unsigned_abs() * (admissible_order_pairs(w).len() as u128 + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Jsonl,
    Csv,
}

/// A reproducible random subset of the weight vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub count: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub dim: usize,
    pub threads: usize,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub sample: Option<Sample>,
    /// Stop cleanly after this many shards, leaving a resumable manifest.
    pub stop_after: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ShardProgress {
    Pending,
    Done { offset: u64, length: u64, records: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub tool_version: String,
    pub dim: usize,
    pub threads: usize,
    pub format: OutputFormat,
    pub sample: Option<Sample>,
    pub output: PathBuf,
    pub partial: PathBuf,
    pub committed_bytes: u64,
    pub complete: bool,
    /// Keyed by the comma separated weight vector.
    pub shards: BTreeMap<String, ShardProgress>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let m: Self = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if m.format_version != FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "manifest format {} is not supported (expected {FORMAT_VERSION})",
                m.format_version
            )));
        }
        Ok(m)
    }

    pub fn store(&self, path: &Path) -> Result<()> {
        let tmp = sibling(path, ".tmp");
        let mut f = File::create(&tmp).map_err(|e| io_error(&tmp, e))?;
        serde_json::to_writer(&mut f, self).map_err(|e| Error::Io(e.to_string()))?;
        f.sync_all().map_err(|e| io_error(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| io_error(path, e))
    }

    pub fn pending(&self) -> Vec<Vec<Int>> {
        self.shards
            .iter()
            .filter(|(_, p)| **p == ShardProgress::Pending)
            .map(|(k, _)| parse_key(k))
            .collect()
    }

    pub fn done_count(&self) -> usize {
        self.shards.len() - self.pending().len()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub records: u64,
    pub shards_done: usize,
    pub shards_total: usize,
    pub complete: bool,
    pub histogram: BTreeMap<ClassGroup, u64>,
    pub manifest: PathBuf,
    pub output: PathBuf,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    sibling(out, ".manifest.json")
}

fn partial_path(out: &Path) -> PathBuf {
    sibling(out, ".partial")
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn key(w: &[Int]) -> String {
    w.iter().map(Int::to_string).collect::<Vec<_>>().join(",")
}

fn parse_key(k: &str) -> Vec<Int> {
    k.split(',').map(|x| x.parse().expect("manifest keys are written by this module")).collect()
}

/// The shard list of a run: all weight vectors, or a seeded sample of them.
pub fn select_shards(dim: usize, sample: Option<Sample>) -> Vec<Vec<Int>> {
    let all = enumerate_gorenstein_weights(dim);
    match sample {
        None => all,
        Some(Sample { count, seed }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = rand::seq::index::sample(&mut rng, all.len(), count.min(all.len())).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| all[i].clone()).collect()
        }
    }
}

/// Starts a fresh run, replacing any earlier run at the same output path.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    if config.dim < 1 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let partial = partial_path(&config.out);
    File::create(&partial).map_err(|e| io_error(&partial, e))?;
    let shards = select_shards(config.dim, config.sample);
    let manifest = RunManifest {
        format_version: FORMAT_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        dim: config.dim,
        threads: config.threads,
        format: config.format,
        sample: config.sample,
        output: config.out.clone(),
        partial,
        committed_bytes: 0,
        complete: false,
        shards: shards.iter().map(|w| (key(w), ShardProgress::Pending)).collect(),
    };
    let path = manifest_path(&config.out);
    manifest.store(&path)?;
    drive(manifest, &path, config.threads, config.stop_after)
}

/// Continues the run described by the manifest at `path`.
pub fn resume(path: &Path, threads: usize, stop_after: Option<usize>) -> Result<RunSummary> {
    let mut manifest = RunManifest::load(path)?;
    if manifest.complete {
        return summarize(&manifest, path);
    }
    manifest.threads = threads;
    drive(manifest, path, threads, stop_after)
}

fn drive(mut manifest: RunManifest, path: &Path, threads: usize, stop_after: Option<usize>) -> Result<RunSummary> {
    let threads = threads.max(1);
    let mut partial = OpenOptions::new()
        .read(true)
        .write(true)
        .open(&manifest.partial)
        .map_err(|e| io_error(&manifest.partial, e))?;
    let len = partial.metadata().map_err(|e| io_error(&manifest.partial, e))?.len();
    if len < manifest.committed_bytes {
        return Err(Error::InvalidArgument(format!(
            "{} is shorter than the {} bytes the manifest records",
            manifest.partial.display(),
            manifest.committed_bytes
        )));
    }
    // bytes past the committed length belong to shards that were never recorded
    partial.set_len(manifest.committed_bytes).map_err(|e| io_error(&manifest.partial, e))?;
    partial.seek(SeekFrom::End(0)).map_err(|e| io_error(&manifest.partial, e))?;

    let mut queue = manifest.pending();
    queue.sort_by_cached_key(|w| (std::cmp::Reverse(shard_cost(w)), w.clone()));

    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let mut written = manifest.committed_bytes;
    let mut finished = 0usize;
    let mut last_store = Instant::now();
    let outcome: Result<()> = std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, String, u64)>();
        for _ in 0..threads {
            let tx = tx.clone();
            let (queue, next, stop) = (&queue, &next, &stop);
            scope.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(w) = queue.get(i) else { break };
                let records = classify_weight(w);
                let mut block = String::new();
                for r in &records {
                    block.push_str(&r.to_line());
                    block.push('\n');
                }
                if tx.send((i, block, records.len() as u64)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut out = BufWriter::new(&mut partial);
        for (i, block, records) in rx {
            if stop.load(Ordering::Relaxed) {
                continue;
            }
            out.write_all(block.as_bytes()).map_err(|e| io_error(&manifest.partial, e))?;
            let length = block.len() as u64;
            manifest.shards.insert(key(&queue[i]), ShardProgress::Done { offset: written, length, records });
            written += length;
            finished += 1;
            let halt = stop_after.is_some_and(|k| finished >= k);
            if halt {
                stop.store(true, Ordering::Relaxed);
            }
            if halt || last_store.elapsed() >= MANIFEST_INTERVAL {
                commit(&mut out, &mut manifest, written, path)?;
                last_store = Instant::now();
            }
        }
        commit(&mut out, &mut manifest, written, path)
    });
    outcome?;
    drop(partial);

    if manifest.pending().is_empty() {
        merge(&manifest)?;
        manifest.complete = true;
        manifest.store(path)?;
        fs::remove_file(&manifest.partial).map_err(|e| io_error(&manifest.partial, e))?;
    }
    summarize(&manifest, path)
}

fn commit(out: &mut BufWriter<&mut File>, manifest: &mut RunManifest, written: u64, path: &Path) -> Result<()> {
    out.flush().map_err(|e| io_error(&manifest.partial, e))?;
    out.get_ref().sync_data().map_err(|e| io_error(&manifest.partial, e))?;
    manifest.committed_bytes = written;
    manifest.store(path)
}

fn done_ranges(manifest: &RunManifest) -> Vec<(Vec<Int>, u64, u64)> {
    let mut ranges: Vec<(Vec<Int>, u64, u64)> = manifest
        .shards
        .iter()
        .filter_map(|(k, p)| match p {
            ShardProgress::Done { offset, length, .. } => Some((parse_key(k), *offset, *length)),
            ShardProgress::Pending => None,
        })
        .collect();
    ranges.sort();
    ranges
}

fn merge(manifest: &RunManifest) -> Result<()> {
    let out = &manifest.output;
    let tmp = sibling(out, ".tmp");
    let mut src = File::open(&manifest.partial).map_err(|e| io_error(&manifest.partial, e))?;
    let mut dst = BufWriter::new(File::create(&tmp).map_err(|e| io_error(&tmp, e))?);
    if manifest.format == OutputFormat::Csv {
        writeln!(dst, "{}", ClassificationRecord::CSV_HEADER).map_err(|e| io_error(&tmp, e))?;
    }
    let mut buf = Vec::new();
    for (_, offset, length) in done_ranges(manifest) {
        src.seek(SeekFrom::Start(offset)).map_err(|e| io_error(&manifest.partial, e))?;
        buf.resize(length as usize, 0);
        src.read_exact(&mut buf).map_err(|e| io_error(&manifest.partial, e))?;
        match manifest.format {
            OutputFormat::Jsonl => dst.write_all(&buf).map_err(|e| io_error(&tmp, e))?,
            OutputFormat::Csv => {
                for line in buf.split(|&b| b == b'\n').filter(|l| !l.is_empty()) {
                    let text = std::str::from_utf8(line).map_err(|e| Error::Parse(e.to_string()))?;
                    let r = ClassificationRecord::from_line(text)?;
                    writeln!(dst, "{}", r.to_csv()).map_err(|e| io_error(&tmp, e))?;
                }
            }
        }
    }
    let f = dst.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    f.sync_all().map_err(|e| io_error(&tmp, e))?;
    fs::rename(&tmp, out).map_err(|e| io_error(out, e))
}

fn summarize(manifest: &RunManifest, path: &Path) -> Result<RunSummary> {
    let mut summary = RunSummary {
        shards_done: manifest.done_count(),
        shards_total: manifest.shards.len(),
        complete: manifest.complete,
        manifest: path.to_path_buf(),
        output: manifest.output.clone(),
        ..Default::default()
    };
    for p in manifest.shards.values() {
        if let ShardProgress::Done { records, .. } = p {
            summary.records += records;
        }
    }
    if manifest.complete && manifest.format == OutputFormat::Jsonl {
        summary.histogram = stats(&manifest.output)?.histogram;
    }
    Ok(summary)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StatsReport {
    pub records: u64,
    pub by_dim: BTreeMap<usize, u64>,
    pub histogram: BTreeMap<ClassGroup, u64>,
}

/// Counts records by dimension and by class group.
pub fn stats(path: &Path) -> Result<StatsReport> {
    let f = File::open(path).map_err(|e| io_error(path, e))?;
    let mut report = StatsReport::default();
    for (no, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| io_error(path, e))?;
        let r = ClassificationRecord::from_line(&line).map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
        report.records += 1;
        *report.by_dim.entry(r.dim()).or_default() += 1;
        *report.histogram.entry(ClassGroup(r.degree.factors().to_vec())).or_default() += 1;
    }
    Ok(report)
}
