//! Round-trip verification over a corpus: mesh -> sequence -> mesh,
//! sequence -> tokens -> bytes -> tokens -> sequence, for both codecs.
//! Token files are checked the other way around: they must decode to a mesh
//! whose canonical encoding reproduces the file.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{files_with_extension, BenchConfig, MeshSource};
use crate::canonical::CanonicalMesh;
use crate::encoding::{self, Codec, MeshSequence, TokenSequence, Vocabulary};
use crate::{mesh_to_tokens, tokenize_with, Error};

#[derive(Debug, Clone, PartialEq)]
pub enum VerifyItem {
    Mesh(MeshSource),
    TokenFile(PathBuf),
    Tokens {
        label: String,
        tokens: TokenSequence,
    },
}

impl VerifyItem {
    pub fn label(&self) -> String {
        match self {
            VerifyItem::Mesh(s) => s.label(),
            VerifyItem::TokenFile(p) => p.display().to_string(),
            VerifyItem::Tokens { label, .. } => label.clone(),
        }
    }
}

impl From<MeshSource> for VerifyItem {
    fn from(s: MeshSource) -> Self {
        VerifyItem::Mesh(s)
    }
}

/// `.obj` meshes and `.bin` token files below `dir`, sorted by path.
pub fn collect_verify_items(dir: &Path) -> Result<Vec<VerifyItem>, Error> {
    Ok(files_with_extension(dir, &["obj", "bin"])?
        .into_iter()
        .map(|p| {
            if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("bin")) {
                VerifyItem::TokenFile(p)
            } else {
                VerifyItem::Mesh(MeshSource::File(p))
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Pass,
    Fail,
    /// Nothing to tokenize (no faces left after canonicalization).
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub source: String,
    pub status: CaseStatus,
    pub detail: Option<String>,
    /// Debug text or JSON of the offending sequence, when one exists.
    pub sequence: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub cases: Vec<CaseResult>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl RoundtripReport {
    pub fn is_success(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| c.status == CaseStatus::Fail)
    }
}

struct Failure {
    detail: String,
    sequence: Option<String>,
}

impl Failure {
    fn new(detail: impl Into<String>, sequence: Option<String>) -> Self {
        Self {
            detail: detail.into(),
            sequence,
        }
    }
}

fn describe(seq: &MeshSequence) -> String {
    match seq {
        MeshSequence::Amt(s) => s.to_string(),
        MeshSequence::Naive(s) => s
            .items
            .iter()
            .map(|v| format!("v{v}"))
            .collect::<Vec<_>>()
            .join(" "),
    }
}

fn check_codec(mesh: &CanonicalMesh, codec: Codec, vocab: Vocabulary) -> Result<(), Failure> {
    let seq =
        tokenize_with(mesh, codec).map_err(|e| Failure::new(format!("{codec}: {e}"), None))?;
    let text = || Some(describe(&seq));
    let fail = |what: String| Failure::new(format!("{codec}: {what}"), text());

    let back = seq
        .to_mesh(mesh.vertices())
        .map_err(|e| fail(format!("detokenize: {e}")))?;
    if back != *mesh {
        return Err(fail("detokenize(tokenize(m)) differs from m".into()));
    }
    let tokens =
        encoding::encode(&seq, mesh.vertices(), vocab).map_err(|e| fail(format!("encode: {e}")))?;
    let bytes = encoding::serialize(&tokens);
    let reread = encoding::deserialize(&bytes).map_err(|e| fail(format!("deserialize: {e}")))?;
    if reread != tokens || encoding::serialize(&reread) != bytes {
        return Err(fail("binary round trip changed the stream".into()));
    }
    let decoded =
        encoding::decode(&reread, vocab, codec).map_err(|e| fail(format!("decode: {e}")))?;
    let again = encoding::encode(&decoded.sequence, &decoded.vertices, vocab)
        .map_err(|e| fail(format!("re-encode: {e}")))?;
    if again != tokens {
        return Err(fail("encode(decode(t)) differs from t".into()));
    }
    let rebuilt = decoded
        .to_mesh()
        .map_err(|e| fail(format!("decoded mesh: {e}")))?;
    if rebuilt != *mesh {
        return Err(fail("mesh rebuilt from tokens differs".into()));
    }
    Ok(())
}

fn check_mesh(source: &MeshSource, config: &BenchConfig) -> Result<CaseStatus, Failure> {
    let raw = source
        .load()
        .map_err(|e| Failure::new(format!("load: {e}"), None))?;
    let mesh = crate::prepare(&raw, &config.pipeline);
    if mesh.face_count() == 0 {
        return Ok(CaseStatus::Skipped);
    }
    let vocab = config.pipeline.vocabulary();
    check_codec(&mesh, Codec::Amt, vocab)?;
    check_codec(&mesh, Codec::Naive, vocab)?;
    Ok(CaseStatus::Pass)
}

fn check_tokens(tokens: &TokenSequence) -> Result<CaseStatus, Failure> {
    let json = || Some(tokens.to_json());
    if tokens.bins() < 2 || tokens.bins() > u32::MAX - 4 {
        return Err(Failure::new(
            format!("unusable bin count {}", tokens.bins()),
            json(),
        ));
    }
    let vocab = Vocabulary::new(tokens.bins());
    let codec = Codec::detect(tokens);
    let decoded = encoding::decode(tokens, vocab, codec)
        .map_err(|e| Failure::new(format!("decode ({codec}): {e}"), json()))?;
    let mesh = decoded
        .to_mesh()
        .map_err(|e| Failure::new(format!("detokenize ({codec}): {e}"), json()))?;
    let again =
        mesh_to_tokens(&mesh, codec, vocab).map_err(|e| Failure::new(e.to_string(), json()))?;
    if again != *tokens {
        return Err(Failure::new(
            format!("stream is not the canonical {codec} encoding of its mesh"),
            json(),
        ));
    }
    Ok(CaseStatus::Pass)
}

fn run_case(item: &VerifyItem, config: &BenchConfig) -> CaseResult {
    let outcome = match item {
        VerifyItem::Mesh(source) => check_mesh(source, config),
        VerifyItem::Tokens { tokens, .. } => check_tokens(tokens),
        VerifyItem::TokenFile(path) => fs::read(path)
            .map_err(|e| Failure::new(format!("read: {e}"), None))
            .and_then(|bytes| {
                encoding::deserialize(&bytes)
                    .map_err(|e| Failure::new(format!("deserialize: {e}"), None))
            })
            .and_then(|tokens| check_tokens(&tokens)),
    };
    let source = item.label();
    match outcome {
        Ok(status) => CaseResult {
            source,
            status,
            detail: None,
            sequence: None,
        },
        Err(f) => CaseResult {
            source,
            status: CaseStatus::Fail,
            detail: Some(f.detail),
            sequence: f.sequence,
        },
    }
}

/// Checks every item; failures are collected, never raised.
pub fn run_roundtrip_suite(items: &[VerifyItem], config: &BenchConfig) -> RoundtripReport {
    let mut cases: Vec<CaseResult> = config.pool().install(|| {
        items
            .par_iter()
            .map(|item| run_case(item, config))
            .collect()
    });
    cases.sort_by(|a, b| a.source.cmp(&b.source));
    let count = |s: CaseStatus| cases.iter().filter(|c| c.status == s).count();
    RoundtripReport {
        passed: count(CaseStatus::Pass),
        failed: count(CaseStatus::Fail),
        skipped: count(CaseStatus::Skipped),
        cases,
    }
}
