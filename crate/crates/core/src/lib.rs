//! Mesh-sequence codecs for autoregressive mesh generation.
//!
//! A triangle mesh is quantized onto an integer grid, brought into a unique
//! canonical form, and turned into a vertex sequence by one of two codecs:
//!
//! - **AMT** (adjacent mesh tokenization, [`amt_codec`]) walks from face to
//!   face across the edge formed by the last two emitted vertices, so each
//!   face after the first of a run costs a single vertex. A `&` marker
//!   restarts the walk when no unvisited neighbour is left.
//! - **Naive** ([`naive_codec`]) lists every face as three vertices.
//!
//! [`encoding`] maps either sequence to discrete token ids (three per
//! vertex, one per `&`) with per-token type tags and a little-endian binary
//! file format. [`bench`] runs whole corpora through both codecs and reports
//! per-mesh and macro-averaged length ratios.
//!
//! ```
//! use amt_core::prelude::*;
//!
//! let mesh = Synthetic::Grid { width: 4, height: 4 }.generate().unwrap();
//! let canonical = prepare(&mesh, &PipelineConfig::default());
//! let amt = tokenize(&canonical).unwrap();
//! let naive = tokenize_naive(&canonical);
//! let vocab = Vocabulary::new(128);
//! let a = encode_amt(&amt, canonical.vertices(), vocab).unwrap();
//! let n = encode_naive(&naive, canonical.vertices(), vocab).unwrap();
//! assert!(a.payload_len() < n.payload_len());
//! assert_eq!(detokenize(&amt, canonical.vertices()).unwrap(), canonical);
//! ```
//!
//! ## Examples
//!
//! ```bash
//! cargo run -p amt-core --example quickstart        # square, strip and soup traces
//! cargo run -p amt-core --example obj_pipeline      # OBJ text -> tokens -> OBJ
//! cargo run -p amt-core --example token_stream      # ids, type tags, binary + JSON
//! cargo run -p amt-core --example synthetic_corpus  # corpus ratios and closed forms
//! cargo run -p amt-core --example roundtrip_verify  # round-trip suite with a bad stream
//! cargo run -p amt-core --example strip_limit       # best and worst case ratios
//! ```

pub mod amt_codec;
pub mod bench;
pub mod canonical;
pub mod encoding;
pub mod mesh_io;
pub mod naive_codec;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::canonical::{CanonicalMesh, CanonicalizeReport, UpAxis};
use crate::encoding::{Codec, MeshSequence, TokenSequence, Vocabulary};
use crate::mesh_io::{QuantizationSpec, RawMesh};

pub mod prelude {
    pub use crate::amt_codec::{detokenize, sequence_stats, tokenize, AmtItem, AmtSequence};
    pub use crate::bench::synthetic::Synthetic;
    pub use crate::bench::{
        run_corpus, run_roundtrip_suite, BenchConfig, CorpusReport, MeshSource,
    };
    pub use crate::canonical::{canonicalize, CanonicalMesh, UpAxis};
    pub use crate::encoding::{
        decode, deserialize, encode, encode_amt, encode_naive, serialize, Codec, MeshSequence,
        TokenSequence, TokenType, Vocabulary,
    };
    pub use crate::mesh_io::{parse_obj, quantize, write_obj, BboxMode, QuantizationSpec, RawMesh};
    pub use crate::naive_codec::{detokenize_naive, tokenize_naive, NaiveSequence};
    pub use crate::{prepare, PipelineConfig};
}

/// Quantization and axis convention shared by every entry point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub quantization: QuantizationSpec,
    pub up_axis: UpAxis,
}

impl PipelineConfig {
    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary::new(self.quantization.bins)
    }
}

/// Quantize then canonicalize.
pub fn prepare(mesh: &RawMesh, config: &PipelineConfig) -> CanonicalMesh {
    prepare_with_report(mesh, config).0
}

pub fn prepare_with_report(
    mesh: &RawMesh,
    config: &PipelineConfig,
) -> (CanonicalMesh, CanonicalizeReport) {
    let grid = mesh_io::quantize(mesh, &config.quantization);
    canonical::canonicalize_with_report(&grid, config.up_axis)
}

/// Runs one codec over a canonical mesh.
pub fn tokenize_with(mesh: &CanonicalMesh, codec: Codec) -> Result<MeshSequence, Error> {
    Ok(match codec {
        Codec::Amt => MeshSequence::Amt(amt_codec::tokenize(mesh)?),
        Codec::Naive => MeshSequence::Naive(naive_codec::tokenize_naive(mesh)),
    })
}

/// Tokenizes and encodes in one step.
pub fn mesh_to_tokens(
    mesh: &CanonicalMesh,
    codec: Codec,
    vocab: Vocabulary,
) -> Result<TokenSequence, Error> {
    let seq = tokenize_with(mesh, codec)?;
    Ok(encoding::encode(&seq, mesh.vertices(), vocab)?)
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Obj {
        path: PathBuf,
        #[source]
        source: mesh_io::ObjError,
    },
    #[error(transparent)]
    Synthetic(#[from] bench::synthetic::SyntheticError),
    #[error(transparent)]
    Amt(#[from] amt_codec::AmtError),
    #[error(transparent)]
    Encoding(#[from] encoding::EncodingError),
    #[error(transparent)]
    Format(#[from] encoding::FormatError),
    #[error("{0}")]
    Manifest(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
