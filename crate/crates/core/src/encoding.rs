//! Discrete token streams.
//!
//! A coordinate bin `c` in `[0, B)` is its own token id. Four special ids
//! follow the coordinate range:
//!
//! | id      | token |
//! |---------|-------|
//! | `B`     | BOS   |
//! | `B + 1` | EOS   |
//! | `B + 2` | PAD   |
//! | `B + 3` | `&`   |
//!
//! Every vertex becomes three ids in key order (vertical, depth, x). Each id
//! carries a [`TokenType`] tag a sequence model can use to pick an extra
//! embedding: the nine ids of a face emitted whole, the three ids of a vertex
//! that extends a strip, the restart marker, and control tokens.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amt_codec::{self, AmtError, AmtItem, AmtSequence};
use crate::canonical::CanonicalMesh;
use crate::mesh_io::VertexId;
use crate::naive_codec::{self, NaiveError, NaiveSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vocabulary {
    coord_bins: u32,
}

impl Vocabulary {
    pub fn new(coord_bins: u32) -> Self {
        assert!(
            coord_bins >= 2,
            "vocabulary needs at least 2 coordinate bins"
        );
        assert!(
            coord_bins <= u32::MAX - 4,
            "coordinate range leaves no room for specials"
        );
        Self { coord_bins }
    }

    pub fn coord_bins(&self) -> u32 {
        self.coord_bins
    }

    pub fn bos(&self) -> u32 {
        self.coord_bins
    }

    pub fn eos(&self) -> u32 {
        self.coord_bins + 1
    }

    pub fn pad(&self) -> u32 {
        self.coord_bins + 2
    }

    pub fn amp(&self) -> u32 {
        self.coord_bins + 3
    }

    /// Total number of ids.
    pub fn size(&self) -> u32 {
        self.coord_bins + 4
    }

    pub fn is_coord(&self, id: u32) -> bool {
        id < self.coord_bins
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum TokenType {
    FullFace = 0,
    StripVertex = 1,
    Amp = 2,
    Control = 3,
}

impl TryFrom<u8> for TokenType {
    type Error = u8;

    fn try_from(tag: u8) -> Result<Self, u8> {
        match tag {
            0 => Ok(TokenType::FullFace),
            1 => Ok(TokenType::StripVertex),
            2 => Ok(TokenType::Amp),
            3 => Ok(TokenType::Control),
            other => Err(other),
        }
    }
}

/// Token ids with a parallel list of type tags.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TokenSequenceRepr")]
pub struct TokenSequence {
    bins: u32,
    ids: Vec<u32>,
    types: Vec<TokenType>,
}

#[derive(Deserialize)]
struct TokenSequenceRepr {
    bins: u32,
    ids: Vec<u32>,
    types: Vec<TokenType>,
}

impl TryFrom<TokenSequenceRepr> for TokenSequence {
    type Error = EncodingError;

    fn try_from(r: TokenSequenceRepr) -> Result<Self, Self::Error> {
        TokenSequence::new(r.bins, r.ids, r.types)
    }
}

impl TokenSequence {
    pub fn new(bins: u32, ids: Vec<u32>, types: Vec<TokenType>) -> Result<Self, EncodingError> {
        if ids.len() != types.len() {
            return Err(EncodingError::LengthMismatch {
                expected: ids.len(),
                actual: types.len(),
            });
        }
        Ok(Self { bins, ids, types })
    }

    pub fn bins(&self) -> u32 {
        self.bins
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn types(&self) -> &[TokenType] {
        &self.types
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Coordinate and `&` tokens, i.e. everything that is not control.
    pub fn payload_len(&self) -> usize {
        self.types
            .iter()
            .filter(|t| **t != TokenType::Control)
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("token sequences always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Codec {
    #[default]
    Amt,
    Naive,
}

impl Codec {
    /// Guesses the codec of a stream from its type tags. Naive streams never
    /// use strip or `&` tags and carry more than one whole face in a row;
    /// a lone triangle reads the same under both.
    pub fn detect(tokens: &TokenSequence) -> Codec {
        let mut run = 0usize;
        for t in &tokens.types {
            match t {
                TokenType::StripVertex | TokenType::Amp => return Codec::Amt,
                TokenType::FullFace => {
                    run += 1;
                    if run > 9 {
                        return Codec::Naive;
                    }
                }
                TokenType::Control => run = 0,
            }
        }
        Codec::Amt
    }
}

impl fmt::Display for Codec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Codec::Amt => "amt",
            Codec::Naive => "naive",
        })
    }
}

impl FromStr for Codec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "amt" => Ok(Codec::Amt),
            "naive" => Ok(Codec::Naive),
            _ => Err(format!("unknown codec {s:?} (expected amt or naive)")),
        }
    }
}

/// Output of either tokenizer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MeshSequence {
    Amt(AmtSequence),
    Naive(NaiveSequence),
}

impl MeshSequence {
    pub fn codec(&self) -> Codec {
        match self {
            MeshSequence::Amt(_) => Codec::Amt,
            MeshSequence::Naive(_) => Codec::Naive,
        }
    }

    /// Rebuilds the mesh from this sequence and a key-order vertex table.
    pub fn to_mesh(&self, vertices: &[[u32; 3]]) -> Result<CanonicalMesh, EncodingError> {
        match self {
            MeshSequence::Amt(s) => Ok(amt_codec::detokenize(s, vertices)?),
            MeshSequence::Naive(s) => Ok(naive_codec::detokenize_naive(s, vertices)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error("coordinate {coord} does not fit in {bins} bins")]
    VocabularyOverflow { coord: u32, bins: u32 },
    #[error("item {position}: vertex {index} out of range for {count} vertices")]
    IndexOutOfRange {
        position: usize,
        index: VertexId,
        count: usize,
    },
    #[error("stream uses {found} bins but the vocabulary has {expected}")]
    BinsMismatch { expected: u32, found: u32 },
    #[error("stream does not start with BOS")]
    MissingBos,
    #[error("stream does not end with EOS")]
    MissingEos,
    #[error("token {position}: unexpected control token {id}")]
    UnexpectedControl { position: usize, id: u32 },
    #[error("token {position}: unknown id {id}")]
    UnknownId { position: usize, id: u32 },
    #[error("token {position}: vertex cut short after {coords} coordinates")]
    TruncatedVertex { position: usize, coords: usize },
    #[error("token {position}: `&` in a naive stream")]
    UnexpectedAmp { position: usize },
    #[error("token {position}: type tag {found:?} where {expected:?} belongs")]
    TypeMismatch {
        position: usize,
        expected: TokenType,
        found: TokenType,
    },
    #[error("{actual} type tags for {expected} ids")]
    LengthMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Amt(#[from] AmtError),
    #[error(transparent)]
    Naive(#[from] NaiveError),
}

struct Emitter<'a> {
    vocab: Vocabulary,
    vertices: &'a [[u32; 3]],
    ids: Vec<u32>,
    types: Vec<TokenType>,
}

impl<'a> Emitter<'a> {
    fn new(vocab: Vocabulary, vertices: &'a [[u32; 3]], capacity: usize) -> Self {
        let mut ids = Vec::with_capacity(capacity + 2);
        let mut types = Vec::with_capacity(capacity + 2);
        ids.push(vocab.bos());
        types.push(TokenType::Control);
        Self {
            vocab,
            vertices,
            ids,
            types,
        }
    }

    fn vertex(&mut self, position: usize, v: VertexId, ty: TokenType) -> Result<(), EncodingError> {
        let p = self
            .vertices
            .get(v as usize)
            .ok_or(EncodingError::IndexOutOfRange {
                position,
                index: v,
                count: self.vertices.len(),
            })?;
        for &c in p {
            if !self.vocab.is_coord(c) {
                return Err(EncodingError::VocabularyOverflow {
                    coord: c,
                    bins: self.vocab.coord_bins(),
                });
            }
            self.ids.push(c);
            self.types.push(ty);
        }
        Ok(())
    }

    fn amp(&mut self) {
        self.ids.push(self.vocab.amp());
        self.types.push(TokenType::Amp);
    }

    fn finish(mut self) -> TokenSequence {
        self.ids.push(self.vocab.eos());
        self.types.push(TokenType::Control);
        TokenSequence {
            bins: self.vocab.coord_bins(),
            ids: self.ids,
            types: self.types,
        }
    }
}

/// Type tag of each AMT item: the first three vertices after the start or a
/// restart are whole-face vertices, later ones extend the strip.
fn amt_item_types(items: &[AmtItem]) -> impl Iterator<Item = TokenType> + '_ {
    let mut run = 0usize;
    items.iter().map(move |item| match item {
        AmtItem::Restart => {
            run = 0;
            TokenType::Amp
        }
        AmtItem::Vertex(_) => {
            run += 1;
            if run <= 3 {
                TokenType::FullFace
            } else {
                TokenType::StripVertex
            }
        }
    })
}

pub fn encode_amt(
    seq: &AmtSequence,
    vertices: &[[u32; 3]],
    vocab: Vocabulary,
) -> Result<TokenSequence, EncodingError> {
    let mut out = Emitter::new(vocab, vertices, seq.items.len() * 3);
    for (position, (item, ty)) in seq.items.iter().zip(amt_item_types(&seq.items)).enumerate() {
        match *item {
            AmtItem::Vertex(v) => out.vertex(position, v, ty)?,
            AmtItem::Restart => out.amp(),
        }
    }
    Ok(out.finish())
}

pub fn encode_naive(
    seq: &NaiveSequence,
    vertices: &[[u32; 3]],
    vocab: Vocabulary,
) -> Result<TokenSequence, EncodingError> {
    let mut out = Emitter::new(vocab, vertices, seq.items.len() * 3);
    for (position, &v) in seq.items.iter().enumerate() {
        out.vertex(position, v, TokenType::FullFace)?;
    }
    Ok(out.finish())
}

pub fn encode(
    seq: &MeshSequence,
    vertices: &[[u32; 3]],
    vocab: Vocabulary,
) -> Result<TokenSequence, EncodingError> {
    match seq {
        MeshSequence::Amt(s) => encode_amt(s, vertices, vocab),
        MeshSequence::Naive(s) => encode_naive(s, vertices, vocab),
    }
}

/// A decoded stream: the item sequence plus the vertex table it indexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub sequence: MeshSequence,
    /// Distinct key-order coordinates in order of first appearance.
    pub vertices: Vec<[u32; 3]>,
}

impl Decoded {
    pub fn to_mesh(&self) -> Result<CanonicalMesh, EncodingError> {
        self.sequence.to_mesh(&self.vertices)
    }
}

enum Piece {
    Vertex([u32; 3]),
    Amp,
}

/// Splits the framed payload into vertices and `&` markers.
fn split_payload(
    tokens: &TokenSequence,
    vocab: Vocabulary,
) -> Result<Vec<(usize, Piece)>, EncodingError> {
    if tokens.bins != vocab.coord_bins() {
        return Err(EncodingError::BinsMismatch {
            expected: vocab.coord_bins(),
            found: tokens.bins,
        });
    }
    let ids = &tokens.ids;
    if ids.first() != Some(&vocab.bos()) {
        return Err(EncodingError::MissingBos);
    }
    let mut end = ids.len();
    while end > 1 && ids[end - 1] == vocab.pad() {
        end -= 1;
    }
    if end < 2 || ids[end - 1] != vocab.eos() {
        return Err(EncodingError::MissingEos);
    }
    for position in [0, end - 1].into_iter().chain(end..ids.len()) {
        if tokens.types[position] != TokenType::Control {
            return Err(EncodingError::TypeMismatch {
                position,
                expected: TokenType::Control,
                found: tokens.types[position],
            });
        }
    }

    let mut pieces = Vec::with_capacity((end - 2) / 3 + 1);
    let mut coord = [0u32; 3];
    let mut filled = 0usize;
    for (position, &id) in ids.iter().enumerate().take(end - 1).skip(1) {
        if vocab.is_coord(id) {
            coord[filled] = id;
            filled += 1;
            if filled == 3 {
                pieces.push((position - 2, Piece::Vertex(coord)));
                filled = 0;
            }
        } else if filled > 0 {
            return Err(EncodingError::TruncatedVertex {
                position,
                coords: filled,
            });
        } else if id == vocab.amp() {
            pieces.push((position, Piece::Amp));
        } else if id < vocab.size() {
            return Err(EncodingError::UnexpectedControl { position, id });
        } else {
            return Err(EncodingError::UnknownId { position, id });
        }
    }
    if filled > 0 {
        return Err(EncodingError::TruncatedVertex {
            position: end - 1,
            coords: filled,
        });
    }
    Ok(pieces)
}

struct VertexTable {
    lookup: HashMap<[u32; 3], VertexId>,
    vertices: Vec<[u32; 3]>,
}

impl VertexTable {
    fn new() -> Self {
        Self {
            lookup: HashMap::new(),
            vertices: Vec::new(),
        }
    }

    fn intern(&mut self, p: [u32; 3]) -> VertexId {
        *self.lookup.entry(p).or_insert_with(|| {
            self.vertices.push(p);
            (self.vertices.len() - 1) as VertexId
        })
    }
}

fn check_types(
    tokens: &TokenSequence,
    spans: impl Iterator<Item = (usize, usize, TokenType)>,
) -> Result<(), EncodingError> {
    for (start, len, expected) in spans {
        for position in start..start + len {
            let found = tokens.types[position];
            if found != expected {
                return Err(EncodingError::TypeMismatch {
                    position,
                    expected,
                    found,
                });
            }
        }
    }
    Ok(())
}

pub fn decode_amt(tokens: &TokenSequence, vocab: Vocabulary) -> Result<Decoded, EncodingError> {
    let pieces = split_payload(tokens, vocab)?;
    let mut table = VertexTable::new();
    let items: Vec<AmtItem> = pieces
        .iter()
        .map(|(_, piece)| match piece {
            Piece::Vertex(p) => AmtItem::Vertex(table.intern(*p)),
            Piece::Amp => AmtItem::Restart,
        })
        .collect();
    check_types(
        tokens,
        pieces
            .iter()
            .zip(amt_item_types(&items))
            .map(|((pos, piece), ty)| {
                let len = if matches!(piece, Piece::Vertex(_)) {
                    3
                } else {
                    1
                };
                (*pos, len, ty)
            }),
    )?;
    let mut seq = AmtSequence {
        items,
        face_count: 0,
    };
    seq.validate_structure()?;
    seq.face_count = seq.stats().faces_encoded;
    Ok(Decoded {
        sequence: MeshSequence::Amt(seq),
        vertices: table.vertices,
    })
}

pub fn decode_naive(tokens: &TokenSequence, vocab: Vocabulary) -> Result<Decoded, EncodingError> {
    let pieces = split_payload(tokens, vocab)?;
    let mut table = VertexTable::new();
    let mut items = Vec::with_capacity(pieces.len());
    for (position, piece) in &pieces {
        match piece {
            Piece::Vertex(p) => items.push(table.intern(*p)),
            Piece::Amp => {
                return Err(EncodingError::UnexpectedAmp {
                    position: *position,
                })
            }
        }
    }
    check_types(
        tokens,
        pieces.iter().map(|(pos, _)| (*pos, 3, TokenType::FullFace)),
    )?;
    if items.len() % 3 != 0 {
        return Err(NaiveError::Length(items.len()).into());
    }
    Ok(Decoded {
        sequence: MeshSequence::Naive(NaiveSequence { items }),
        vertices: table.vertices,
    })
}

pub fn decode(
    tokens: &TokenSequence,
    vocab: Vocabulary,
    codec: Codec,
) -> Result<Decoded, EncodingError> {
    match codec {
        Codec::Amt => decode_amt(tokens, vocab),
        Codec::Naive => decode_naive(tokens, vocab),
    }
}

/// `b"AMTK"` read as a little-endian `u32`.
pub const MAGIC: u32 = u32::from_le_bytes(*b"AMTK");
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8;
const RECORD_LEN: usize = 4 + 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("bad magic {0:#010x}")]
    BadMagic(u32),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("expected {expected} bytes, found {actual}")]
    LengthMismatch { expected: u64, actual: u64 },
    #[error("token {position}: bad type tag {tag}")]
    BadTypeTag { position: usize, tag: u8 },
}

/// Binary layout, all integers little-endian:
/// `magic: u32, version: u32, bins: u32, length: u64`, then `length`
/// records of `(id: u32, type: u8)`.
pub fn serialize(tokens: &TokenSequence) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + tokens.len() * RECORD_LEN);
    out.extend_from_slice(&MAGIC.to_le_bytes());
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&tokens.bins.to_le_bytes());
    out.extend_from_slice(&(tokens.len() as u64).to_le_bytes());
    for (&id, &ty) in tokens.ids.iter().zip(&tokens.types) {
        out.extend_from_slice(&id.to_le_bytes());
        out.push(ty as u8);
    }
    out
}

pub fn deserialize(bytes: &[u8]) -> Result<TokenSequence, FormatError> {
    let short = || FormatError::LengthMismatch {
        expected: HEADER_LEN as u64,
        actual: bytes.len() as u64,
    };
    let u32_at = |at: usize| -> Option<u32> {
        Some(u32::from_le_bytes(bytes.get(at..at + 4)?.try_into().ok()?))
    };
    let magic = u32_at(0).ok_or_else(short)?;
    if magic != MAGIC {
        return Err(FormatError::BadMagic(magic));
    }
    let version = u32_at(4).ok_or_else(short)?;
    if version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let bins = u32_at(8).ok_or_else(short)?;
    let length = bytes
        .get(12..20)
        .map(|b| u64::from_le_bytes(b.try_into().unwrap()))
        .ok_or_else(short)?;
    let expected = length
        .checked_mul(RECORD_LEN as u64)
        .and_then(|n| n.checked_add(HEADER_LEN as u64));
    if expected != Some(bytes.len() as u64) {
        return Err(FormatError::LengthMismatch {
            expected: expected.unwrap_or(u64::MAX),
            actual: bytes.len() as u64,
        });
    }
    let mut ids = Vec::with_capacity(length as usize);
    let mut types = Vec::with_capacity(length as usize);
    for (position, rec) in bytes[HEADER_LEN..].chunks_exact(RECORD_LEN).enumerate() {
        ids.push(u32::from_le_bytes(rec[..4].try_into().unwrap()));
        let tag = rec[4];
        types.push(
            TokenType::try_from(tag).map_err(|tag| FormatError::BadTypeTag { position, tag })?,
        );
    }
    Ok(TokenSequence { bins, ids, types })
}
