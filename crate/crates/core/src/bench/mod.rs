//! Corpus measurement: every mesh goes through quantization,
//! canonicalization, both codecs and token encoding, and the per-mesh
//! ratio `amt_payload / naive_payload` is macro-averaged over the corpus.

pub mod report;
pub mod roundtrip;
pub mod synthetic;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::UpAxis;
use crate::encoding::{self, Vocabulary};
use crate::mesh_io::{self, BboxMode, RawMesh};
use crate::{amt_codec, naive_codec, Error, PipelineConfig};

pub use report::Histogram;
pub use roundtrip::{
    collect_verify_items, run_roundtrip_suite, CaseResult, RoundtripReport, VerifyItem,
};
use synthetic::Synthetic;

pub const DEFAULT_MAX_FACES: usize = 1600;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub pipeline: PipelineConfig,
    /// Meshes with more canonical faces than this are skipped.
    pub max_faces: usize,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            pipeline: PipelineConfig::default(),
            max_faces: DEFAULT_MAX_FACES,
            jobs: 0,
        }
    }
}

impl BenchConfig {
    fn pool(&self) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .expect("thread pool")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshSource {
    File(PathBuf),
    Synthetic(Synthetic),
}

impl MeshSource {
    pub fn label(&self) -> String {
        match self {
            MeshSource::File(p) => p.display().to_string(),
            MeshSource::Synthetic(s) => format!("gen:{s}"),
        }
    }

    pub fn load(&self) -> Result<RawMesh, Error> {
        match self {
            MeshSource::File(path) => load_obj(path),
            MeshSource::Synthetic(s) => Ok(s.generate()?),
        }
    }
}

impl From<Synthetic> for MeshSource {
    fn from(s: Synthetic) -> Self {
        MeshSource::Synthetic(s)
    }
}

pub fn load_obj(path: &Path) -> Result<RawMesh, Error> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    mesh_io::parse_obj(std::io::BufReader::new(file))
        .map(|(mesh, _)| mesh)
        .map_err(|source| Error::Obj {
            path: path.to_path_buf(),
            source,
        })
}

/// Every `.obj` file below `dir`, sorted by path.
pub fn obj_files(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    files_with_extension(dir, &["obj"])
}

pub(crate) fn files_with_extension(dir: &Path, exts: &[&str]) -> Result<Vec<PathBuf>, Error> {
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(dir).to_path_buf();
            Error::io(path, e.into())
        })?;
        let matches = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| exts.iter().any(|x| e.eq_ignore_ascii_case(x)));
        if entry.file_type().is_file() && matches {
            out.push(entry.into_path());
        }
    }
    Ok(out)
}

/// Resolves a corpus argument: a directory of `.obj` files, or a manifest
/// with one source per line. Manifest lines are either paths (relative to
/// the manifest) or `gen <kind> key=value ...`; `#` starts a comment.
pub fn load_sources(path: &Path) -> Result<Vec<MeshSource>, Error> {
    if path.is_dir() {
        return Ok(obj_files(path)?.into_iter().map(MeshSource::File).collect());
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, base)
}

pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<MeshSource>, Error> {
    let mut sources = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(spec) = line.strip_prefix("gen ") {
            let synth: Synthetic = spec
                .parse()
                .map_err(|e| Error::Manifest(format!("manifest line {}: {e}", lineno + 1)))?;
            sources.push(MeshSource::Synthetic(synth));
        } else {
            sources.push(MeshSource::File(base.join(line)));
        }
    }
    Ok(sources)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshRecord {
    pub source: String,
    pub faces: usize,
    pub amt_len: usize,
    pub naive_len: usize,
    pub ratio: f64,
    pub restarts: usize,
    /// AMT tokenize + encode time in microseconds.
    pub tokenize_us: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub source: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Totals {
    pub sources: usize,
    pub measured: usize,
    pub over_face_cap: usize,
    pub failed: usize,
    pub faces: usize,
    pub amt_len: usize,
    pub naive_len: usize,
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub bins: u32,
    pub bbox_mode: BboxMode,
    pub up_axis: UpAxis,
    pub max_faces: usize,
    pub jobs: usize,
    /// Generator specs (with seeds) of the synthetic sources.
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub records: Vec<MeshRecord>,
    pub over_face_cap: Vec<Skipped>,
    pub failures: Vec<Skipped>,
    /// Mean of the per-mesh ratios; `None` for an empty run.
    pub macro_avg_ratio: Option<f64>,
    /// Total AMT length over total naive length.
    pub micro_avg_ratio: Option<f64>,
    pub ratio_histogram: Histogram,
    pub face_histogram: Histogram,
    pub totals: Totals,
    pub elapsed_ms: f64,
    pub config: ConfigEcho,
}

impl CorpusReport {
    /// True when there were sources but none could be measured.
    pub fn all_failed(&self) -> bool {
        self.totals.sources > 0 && self.totals.measured == 0 && self.totals.failed > 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

enum Outcome {
    Measured(MeshRecord),
    OverCap(Skipped),
    Failed(Skipped),
}

/// Measures one mesh. Failures come back as `Err` with a message.
pub fn measure_mesh(
    label: String,
    raw: &RawMesh,
    config: &BenchConfig,
) -> Result<Option<MeshRecord>, String> {
    let pipeline = &config.pipeline;
    let vocab = Vocabulary::new(pipeline.quantization.bins);
    let mesh = crate::prepare(raw, pipeline);
    let faces = mesh.face_count();
    if faces == 0 {
        return Err("no faces after canonicalization".into());
    }
    if faces > config.max_faces {
        return Ok(None);
    }

    let start = Instant::now();
    let amt = amt_codec::tokenize(&mesh).map_err(|e| e.to_string())?;
    let amt_tokens =
        encoding::encode_amt(&amt, mesh.vertices(), vocab).map_err(|e| e.to_string())?;
    let tokenize_us = start.elapsed().as_secs_f64() * 1e6;

    let naive = naive_codec::tokenize_naive(&mesh);
    let naive_tokens =
        encoding::encode_naive(&naive, mesh.vertices(), vocab).map_err(|e| e.to_string())?;

    let amt_len = amt_tokens.payload_len();
    let naive_len = naive_tokens.payload_len();
    Ok(Some(MeshRecord {
        source: label,
        faces,
        amt_len,
        naive_len,
        ratio: amt_len as f64 / naive_len as f64,
        restarts: amt.stats().restart_items,
        tokenize_us,
    }))
}

fn process(source: &MeshSource, config: &BenchConfig) -> Outcome {
    let label = source.label();
    let raw = match source.load() {
        Ok(raw) => raw,
        Err(e) => {
            return Outcome::Failed(Skipped {
                source: label,
                reason: e.to_string(),
            })
        }
    };
    match measure_mesh(label.clone(), &raw, config) {
        Ok(Some(record)) => Outcome::Measured(record),
        Ok(None) => Outcome::OverCap(Skipped {
            source: label,
            reason: format!("more than {} faces", config.max_faces),
        }),
        Err(reason) => Outcome::Failed(Skipped {
            source: label,
            reason,
        }),
    }
}

pub fn run_corpus(sources: &[MeshSource], config: &BenchConfig) -> CorpusReport {
    let start = Instant::now();
    let outcomes: Vec<Outcome> = config
        .pool()
        .install(|| sources.par_iter().map(|s| process(s, config)).collect());
    let mut report = assemble(outcomes, sources, config);
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

fn assemble(outcomes: Vec<Outcome>, sources: &[MeshSource], config: &BenchConfig) -> CorpusReport {
    let mut records = Vec::new();
    let mut over_face_cap = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Measured(r) => records.push(r),
            Outcome::OverCap(s) => over_face_cap.push(s),
            Outcome::Failed(s) => failures.push(s),
        }
    }
    records.sort_by(|a, b| a.source.cmp(&b.source));
    over_face_cap.sort_by(|a, b| a.source.cmp(&b.source));
    failures.sort_by(|a, b| a.source.cmp(&b.source));

    let totals = Totals {
        sources: sources.len(),
        measured: records.len(),
        over_face_cap: over_face_cap.len(),
        failed: failures.len(),
        faces: records.iter().map(|r| r.faces).sum(),
        amt_len: records.iter().map(|r| r.amt_len).sum(),
        naive_len: records.iter().map(|r| r.naive_len).sum(),
        restarts: records.iter().map(|r| r.restarts).sum(),
    };
    let macro_avg_ratio = macro_average(records.iter().map(|r| r.ratio));
    let micro_avg_ratio =
        (totals.naive_len > 0).then(|| totals.amt_len as f64 / totals.naive_len as f64);

    let mut ratio_histogram = Histogram::new(0.0, 0.05, 25);
    let face_bins = config.max_faces.div_ceil(100).clamp(1, 1000);
    let mut face_histogram = Histogram::new(0.0, 100.0, face_bins);
    for r in &records {
        ratio_histogram.add(r.ratio);
        face_histogram.add(r.faces as f64);
    }

    let q = config.pipeline.quantization;
    let mut generators: Vec<String> = sources
        .iter()
        .filter_map(|s| match s {
            MeshSource::Synthetic(g) => Some(g.to_string()),
            MeshSource::File(_) => None,
        })
        .collect();
    generators.sort();

    CorpusReport {
        records,
        over_face_cap,
        failures,
        macro_avg_ratio,
        micro_avg_ratio,
        ratio_histogram,
        face_histogram,
        totals,
        elapsed_ms: 0.0,
        config: ConfigEcho {
            bins: q.bins,
            bbox_mode: q.bbox_mode,
            up_axis: config.pipeline.up_axis,
            max_faces: config.max_faces,
            jobs: config.jobs,
            generators,
        },
    }
}

/// Mean of per-sample ratios.
pub fn macro_average(ratios: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = ratios
        .into_iter()
        .fold((0.0, 0usize), |(s, n), r| (s + r, n + 1));
    (n > 0).then(|| sum / n as f64)
}
