use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use amt_core::bench::synthetic::Synthetic;
use amt_core::bench::{self, report, BenchConfig};
use amt_core::canonical::UpAxis;
use amt_core::encoding::{self, Codec, MeshSequence, TokenSequence, Vocabulary};
use amt_core::mesh_io::{self, BboxMode, QuantizationSpec};
use amt_core::{Error, PipelineConfig};

const EXIT_IO: u8 = 1;
const EXIT_VERIFY: u8 = 2;

#[derive(Parser)]
#[command(
    name = "amt",
    version,
    about = "Adjacent mesh tokenization codec and corpus bench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct PipelineArgs {
    /// Quantization bins per axis.
    #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u32).range(2..))]
    bins: u32,
    /// Vertical axis of the input meshes.
    #[arg(long, default_value_t = UpAxis::Y)]
    up_axis: UpAxis,
    /// Use the fixed [-0.5, 0.5]^3 box instead of each mesh's own bounds.
    #[arg(long, conflicts_with = "lattice")]
    unit_cube: bool,
    /// Take coordinates as grid indices already (the box is [0, bins]^3), as
    /// written by `detokenize`.
    #[arg(long)]
    lattice: bool,
}

impl PipelineArgs {
    fn config(&self) -> PipelineConfig {
        if self.lattice {
            return PipelineConfig {
                quantization: QuantizationSpec::lattice(self.bins),
                up_axis: self.up_axis,
            };
        }
        let mode = if self.unit_cube {
            BboxMode::UnitCubeCentered
        } else {
            BboxMode::PerMeshTight
        };
        PipelineConfig {
            quantization: QuantizationSpec::new(self.bins, mode),
            up_axis: self.up_axis,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize an OBJ mesh.
    Tokenize {
        input: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Token file to write (`.json` writes the JSON mirror).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = Codec::Amt)]
        codec: Codec,
    },
    /// Rebuild an OBJ mesh (integer grid coordinates) from a token file.
    Detokenize {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = UpAxis::Y)]
        up_axis: UpAxis,
    },
    /// Measure AMT against the naive codec over a corpus.
    Bench {
        /// Directory of .obj files or a manifest file.
        corpus: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, default_value_t = bench::DEFAULT_MAX_FACES)]
        max_faces: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Ratio histogram as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Write a synthetic mesh, e.g. `amt gen grid w=10 h=10 --out grid.obj`.
    Gen {
        kind: String,
        params: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Round-trip every .obj and .bin file below a directory.
    Verify {
        dir: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Render the ratio histogram of a saved JSON bench report to SVG.
    Plot {
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), Error> {
    fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn read_tokens(path: &Path) -> Result<TokenSequence, Error> {
    let bytes = read(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        let text = String::from_utf8_lossy(&bytes);
        return TokenSequence::from_json(&text)
            .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())));
    }
    Ok(encoding::deserialize(&bytes)?)
}

fn tokenize(
    input: &Path,
    pipeline: PipelineArgs,
    out: Option<&Path>,
    codec: Codec,
) -> Result<(), Error> {
    let config = pipeline.config();
    let raw = bench::load_obj(input)?;
    let (mesh, counts) = amt_core::prepare_with_report(&raw, &config);
    let seq = amt_core::tokenize_with(&mesh, codec)?;
    let tokens = encoding::encode(&seq, mesh.vertices(), config.vocabulary())?;
    let naive_len = 9 * mesh.face_count();
    eprintln!(
        "{}: {} faces, {} vertices, {} payload tokens ({:.4} of naive), {} merged / {} degenerate / {} duplicate",
        input.display(),
        mesh.face_count(),
        mesh.vertex_count(),
        tokens.payload_len(),
        tokens.payload_len() as f64 / naive_len as f64,
        counts.merged_vertices,
        counts.degenerate_faces,
        counts.duplicate_faces,
    );
    match out {
        Some(path) if path.extension().is_some_and(|e| e == "json") => {
            write(path, tokens.to_json())
        }
        Some(path) => write(path, encoding::serialize(&tokens)),
        None => {
            match &seq {
                MeshSequence::Amt(s) => println!("{s}"),
                MeshSequence::Naive(s) => {
                    let text: Vec<String> = s.items.iter().map(|v| format!("v{v}")).collect();
                    println!("{}", text.join(" "));
                }
            }
            Ok(())
        }
    }
}

fn detokenize(input: &Path, out: &Path, up: UpAxis) -> Result<(), Error> {
    let tokens = read_tokens(input)?;
    let codec = Codec::detect(&tokens);
    let decoded = encoding::decode(&tokens, Vocabulary::new(tokens.bins()), codec)?;
    let mesh = decoded.to_mesh()?;
    eprintln!("{}: {codec}, {} faces", input.display(), mesh.face_count());
    write(out, mesh_io::write_obj(&mesh.to_raw(up)))
}

fn run() -> Result<ExitCode, Error> {
    match Cli::parse().command {
        Command::Tokenize {
            input,
            pipeline,
            out,
            codec,
        } => tokenize(&input, pipeline, out.as_deref(), codec)?,
        Command::Detokenize {
            input,
            out,
            up_axis,
        } => detokenize(&input, &out, up_axis)?,
        Command::Bench {
            corpus,
            pipeline,
            max_faces,
            csv,
            json,
            svg,
            jobs,
        } => {
            let sources = bench::load_sources(&corpus)?;
            let config = BenchConfig {
                pipeline: pipeline.config(),
                max_faces,
                jobs,
            };
            let r = bench::run_corpus(&sources, &config);
            if let Some(path) = csv {
                let file = fs::File::create(&path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                report::write_csv(&r, file)
                    .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
            }
            if let Some(path) = json {
                write(&path, r.to_json())?;
            }
            if let Some(path) = svg {
                write(&path, report::ratio_histogram_svg(&r))?;
            }
            for f in &r.failures {
                eprintln!("failed: {}: {}", f.source, f.reason);
            }
            let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
            println!(
                "meshes {} measured {} over-cap {} failed {} | macro ratio {} micro ratio {} | {:.1} ms",
                r.totals.sources,
                r.totals.measured,
                r.totals.over_face_cap,
                r.totals.failed,
                fmt(r.macro_avg_ratio),
                fmt(r.micro_avg_ratio),
                r.elapsed_ms
            );
            if r.all_failed() {
                return Ok(ExitCode::from(EXIT_IO));
            }
        }
        Command::Gen { kind, params, out } => {
            let spec = Synthetic::from_parts(&kind, &params)?;
            let mesh = spec.generate()?;
            eprintln!(
                "{spec}: {} vertices, {} faces",
                mesh.vertices.len(),
                mesh.faces.len()
            );
            write(&out, mesh_io::write_obj(&mesh))?;
        }
        Command::Verify {
            dir,
            pipeline,
            jobs,
        } => {
            let items = bench::collect_verify_items(&dir)?;
            let config = BenchConfig {
                pipeline: pipeline.config(),
                jobs,
                ..BenchConfig::default()
            };
            let r = bench::run_roundtrip_suite(&items, &config);
            for case in r.failures() {
                println!(
                    "FAIL {}: {}",
                    case.source,
                    case.detail.as_deref().unwrap_or("")
                );
                if let Some(seq) = &case.sequence {
                    println!("     {seq}");
                }
            }
            println!(
                "passed {} failed {} skipped {}",
                r.passed, r.failed, r.skipped
            );
            if !r.is_success() {
                return Ok(ExitCode::from(EXIT_VERIFY));
            }
        }
        Command::Plot { report: path, out } => {
            let bytes = read(&path)?;
            let r: bench::CorpusReport = serde_json::from_slice(&bytes)
                .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
            write(&out, report::ratio_histogram_svg(&r))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
