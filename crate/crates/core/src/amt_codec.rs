//! Adjacent mesh tokenization.
//!
//! The traversal emits the three vertices of the lowest unvisited face, then
//! keeps extending across the edge formed by the last two emitted vertices,
//! one vertex per face. When that edge has no unvisited face left, a
//! [`AmtItem::Restart`] marker is emitted and the walk resumes at the lowest
//! unvisited face.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::canonical::{CanonicalMesh, FaceId, UnvisitedFaces};
use crate::mesh_io::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmtItem {
    Vertex(VertexId),
    /// The `&` marker.
    Restart,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmtSequence {
    pub items: Vec<AmtItem>,
    pub face_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SequenceStats {
    pub vertex_items: usize,
    pub restart_items: usize,
    pub faces_encoded: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AmtError {
    #[error("cannot tokenize a mesh without faces")]
    EmptyMesh,
    #[error("empty sequence")]
    EmptySequence,
    #[error("item {position}: sequence starts with a restart")]
    LeadingRestart { position: usize },
    #[error("item {position}: sequence ends with a restart")]
    TrailingRestart { position: usize },
    #[error("item {position}: consecutive restarts")]
    ConsecutiveRestarts { position: usize },
    #[error("item {position}: restart after only {vertices} vertices")]
    ShortRun { position: usize, vertices: usize },
    #[error("item {position}: vertex {index} out of range for {count} vertices")]
    IndexOutOfRange {
        position: usize,
        index: VertexId,
        count: usize,
    },
    #[error("item {position}: degenerate face")]
    DegenerateFace { position: usize },
    #[error("item {position}: face emitted twice")]
    DuplicateFace { position: usize },
    #[error("sequence encodes {decoded} faces but declares {declared}")]
    FaceCountMismatch { declared: usize, decoded: usize },
    #[error("bad sequence text at token {position}: {token:?}")]
    Parse { position: usize, token: String },
}

impl AmtSequence {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn stats(&self) -> SequenceStats {
        sequence_stats(self)
    }

    /// Checks the restart-placement rules.
    pub fn validate_structure(&self) -> Result<(), AmtError> {
        let items = &self.items;
        if items.is_empty() {
            return Err(AmtError::EmptySequence);
        }
        let mut run = 0usize;
        for (position, item) in items.iter().enumerate() {
            match item {
                AmtItem::Vertex(_) => run += 1,
                AmtItem::Restart => {
                    if position == 0 {
                        return Err(AmtError::LeadingRestart { position });
                    }
                    if items[position - 1] == AmtItem::Restart {
                        return Err(AmtError::ConsecutiveRestarts { position });
                    }
                    if run < 3 {
                        return Err(AmtError::ShortRun {
                            position,
                            vertices: run,
                        });
                    }
                    if position + 1 == items.len() {
                        return Err(AmtError::TrailingRestart { position });
                    }
                    run = 0;
                }
            }
        }
        if run < 3 {
            return Err(AmtError::ShortRun {
                position: items.len(),
                vertices: run,
            });
        }
        Ok(())
    }
}

pub fn sequence_stats(seq: &AmtSequence) -> SequenceStats {
    let restart_items = seq.items.iter().filter(|i| **i == AmtItem::Restart).count();
    let vertex_items = seq.items.len() - restart_items;
    SequenceStats {
        vertex_items,
        restart_items,
        faces_encoded: vertex_items.saturating_sub(2 * (restart_items + 1)),
    }
}

pub fn tokenize(mesh: &CanonicalMesh) -> Result<AmtSequence, AmtError> {
    tokenize_traced(mesh).map(|(seq, _)| seq)
}

/// [`tokenize`], also returning face ids in the order they were consumed.
pub fn tokenize_traced(mesh: &CanonicalMesh) -> Result<(AmtSequence, Vec<FaceId>), AmtError> {
    let face_count = mesh.face_count();
    if face_count == 0 {
        return Err(AmtError::EmptyMesh);
    }
    let faces = mesh.faces();
    let mut unvisited = UnvisitedFaces::all(face_count);
    let mut items = Vec::with_capacity(face_count + 8);
    let mut visit_order = Vec::with_capacity(face_count);

    while let Some(start) = unvisited.pop_first() {
        let [a, b, c] = faces[start as usize];
        items.extend([AmtItem::Vertex(a), AmtItem::Vertex(b), AmtItem::Vertex(c)]);
        visit_order.push(start);
        let (mut p, mut q) = (b, c);
        while let Some((v, face)) = mesh.first_adjacent(p, q, &unvisited) {
            unvisited.remove(face);
            visit_order.push(face);
            items.push(AmtItem::Vertex(v));
            (p, q) = (q, v);
        }
        if !unvisited.is_empty() {
            items.push(AmtItem::Restart);
        }
    }

    Ok((AmtSequence { items, face_count }, visit_order))
}

/// Rebuilds faces from a sequence without canonicalizing them.
/// Used by both [`detokenize`] and the token decoder.
pub(crate) fn faces_from_items(
    seq: &AmtSequence,
    vertex_count: usize,
) -> Result<Vec<[VertexId; 3]>, AmtError> {
    seq.validate_structure()?;
    let mut faces = Vec::with_capacity(seq.face_count);
    let mut seen: HashSet<[VertexId; 3]> = HashSet::with_capacity(seq.face_count);
    let mut window: Vec<VertexId> = Vec::with_capacity(3);

    for (position, item) in seq.items.iter().enumerate() {
        let v = match *item {
            AmtItem::Restart => {
                window.clear();
                continue;
            }
            AmtItem::Vertex(v) => v,
        };
        if v as usize >= vertex_count {
            return Err(AmtError::IndexOutOfRange {
                position,
                index: v,
                count: vertex_count,
            });
        }
        if window.len() < 2 {
            window.push(v);
            continue;
        }
        let (p, q) = (window[window.len() - 2], window[window.len() - 1]);
        if v == p || v == q || p == q {
            return Err(AmtError::DegenerateFace { position });
        }
        let mut tri = [p, q, v];
        tri.sort_unstable();
        if !seen.insert(tri) {
            return Err(AmtError::DuplicateFace { position });
        }
        faces.push(tri);
        window.clear();
        window.extend([q, v]);
    }

    if faces.len() != seq.face_count {
        return Err(AmtError::FaceCountMismatch {
            declared: seq.face_count,
            decoded: faces.len(),
        });
    }
    Ok(faces)
}

/// Inverse of [`tokenize`]. `vertices` is the vertex table in key order.
pub fn detokenize(seq: &AmtSequence, vertices: &[[u32; 3]]) -> Result<CanonicalMesh, AmtError> {
    let faces = faces_from_items(seq, vertices.len())?;
    let (mesh, _) = CanonicalMesh::from_key_vertices(vertices, &faces);
    // coinciding table entries can collapse faces
    if mesh.face_count() != seq.face_count {
        return Err(AmtError::FaceCountMismatch {
            declared: seq.face_count,
            decoded: mesh.face_count(),
        });
    }
    Ok(mesh)
}

/// Compact debug form: `v0 v1 v2 & v3 ...`.
impl fmt::Display for AmtSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match item {
                AmtItem::Vertex(v) => write!(f, "v{v}")?,
                AmtItem::Restart => f.write_str("&")?,
            }
        }
        Ok(())
    }
}

impl FromStr for AmtSequence {
    type Err = AmtError;

    /// Parses the debug form; the face count is inferred from the items.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let items = s
            .split_whitespace()
            .enumerate()
            .map(|(position, tok)| {
                if tok == "&" {
                    return Ok(AmtItem::Restart);
                }
                tok.strip_prefix('v')
                    .and_then(|n| n.parse().ok())
                    .map(AmtItem::Vertex)
                    .ok_or_else(|| AmtError::Parse {
                        position,
                        token: tok.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut seq = AmtSequence {
            items,
            face_count: 0,
        };
        seq.face_count = sequence_stats(&seq).faces_encoded;
        Ok(seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use AmtItem::{Restart as R, Vertex as V};

    /// Vertices at distinct keys `0..n`, so index order is key order.
    fn mesh(n: u32, faces: &[[u32; 3]]) -> CanonicalMesh {
        let vertices: Vec<[u32; 3]> = (0..n).map(|i| [0, 0, i]).collect();
        CanonicalMesh::from_key_vertices(&vertices, faces).0
    }

    fn seq(s: &str) -> AmtSequence {
        s.parse().unwrap()
    }

    #[test]
    fn square_is_one_run() {
        let m = mesh(4, &[[0, 1, 2], [1, 2, 3]]);
        let s = tokenize(&m).unwrap();
        assert_eq!(s.items, vec![V(0), V(1), V(2), V(3)]);
        assert_eq!(s.face_count, 2);
    }

    #[test]
    fn disconnected_pair_restarts() {
        let m = mesh(6, &[[0, 1, 2], [3, 4, 5]]);
        let s = tokenize(&m).unwrap();
        assert_eq!(s.items, vec![V(0), V(1), V(2), R, V(3), V(4), V(5)]);
    }

    #[test]
    fn fan_does_not_turn() {
        let m = mesh(4, &[[0, 1, 2], [0, 2, 3]]);
        let s = tokenize(&m).unwrap();
        assert_eq!(s.items, vec![V(0), V(1), V(2), R, V(0), V(2), V(3)]);
    }

    #[test]
    fn three_face_strip() {
        let m = mesh(5, &[[0, 1, 2], [1, 2, 3], [2, 3, 4]]);
        let s = tokenize(&m).unwrap();
        assert_eq!(s.items, vec![V(0), V(1), V(2), V(3), V(4)]);
        assert_eq!(s.to_string(), "v0 v1 v2 v3 v4");
    }

    #[test]
    fn empty_mesh_rejected() {
        assert_eq!(tokenize(&mesh(3, &[])), Err(AmtError::EmptyMesh));
    }

    #[test]
    fn detokenize_examples() {
        let table: Vec<[u32; 3]> = (0..6).map(|i| [0, 0, i]).collect();
        let m = detokenize(&seq("v0 v1 v2 v3"), &table[..4]).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [1, 2, 3]]);
        let m = detokenize(&seq("v0 v1 v2 & v3 v4 v5"), &table).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [3, 4, 5]]);
    }

    #[test]
    fn malformed_sequences() {
        let table: Vec<[u32; 3]> = (0..6).map(|i| [0, 0, i]).collect();
        let bad = AmtSequence {
            items: vec![V(0), V(1), R, R, V(2)],
            face_count: 0,
        };
        assert_eq!(
            detokenize(&bad, &table),
            Err(AmtError::ShortRun {
                position: 2,
                vertices: 2
            })
        );
        let cases = [
            (
                vec![R, V(0), V(1), V(2)],
                AmtError::LeadingRestart { position: 0 },
            ),
            (
                vec![V(0), V(1), V(2), R, R, V(3), V(4), V(5)],
                AmtError::ConsecutiveRestarts { position: 4 },
            ),
            (
                vec![V(0), V(1), V(2), R],
                AmtError::TrailingRestart { position: 3 },
            ),
            (
                vec![V(0), V(1), V(1)],
                AmtError::DegenerateFace { position: 2 },
            ),
            (
                vec![V(0), V(1), V(2), V(1)],
                AmtError::DegenerateFace { position: 3 },
            ),
            (
                vec![V(0), V(1), V(2), R, V(2), V(1), V(0)],
                AmtError::DuplicateFace { position: 6 },
            ),
            (
                vec![V(0), V(1), V(9)],
                AmtError::IndexOutOfRange {
                    position: 2,
                    index: 9,
                    count: 6,
                },
            ),
            (vec![], AmtError::EmptySequence),
        ];
        for (items, expected) in cases {
            let mut s = AmtSequence {
                items,
                face_count: 0,
            };
            s.face_count = s.stats().faces_encoded;
            assert_eq!(detokenize(&s, &table), Err(expected), "{s}");
        }
    }

    #[test]
    fn declared_face_count_is_checked() {
        let table: Vec<[u32; 3]> = (0..4).map(|i| [0, 0, i]).collect();
        let s = AmtSequence {
            items: vec![V(0), V(1), V(2), V(3)],
            face_count: 3,
        };
        assert_eq!(
            detokenize(&s, &table),
            Err(AmtError::FaceCountMismatch {
                declared: 3,
                decoded: 2
            })
        );
        // two table entries at the same spot collapse a face
        let table = [[0, 0, 0], [0, 0, 1], [0, 0, 2], [0, 0, 0]];
        assert!(matches!(
            detokenize(&seq("v0 v1 v2 v3"), &table),
            Err(AmtError::FaceCountMismatch { .. })
        ));
    }

    #[test]
    fn stats_examples() {
        let s = |t: &str| sequence_stats(&seq(t));
        assert_eq!(
            s("v0 v1 v2 v3"),
            SequenceStats {
                vertex_items: 4,
                restart_items: 0,
                faces_encoded: 2
            }
        );
        assert_eq!(
            s("v0 v1 v2 & v3 v4 v5"),
            SequenceStats {
                vertex_items: 6,
                restart_items: 1,
                faces_encoded: 2
            }
        );
        assert_eq!(
            s("v0 v1 v2"),
            SequenceStats {
                vertex_items: 3,
                restart_items: 0,
                faces_encoded: 1
            }
        );
    }

    #[test]
    fn text_form_round_trip() {
        let s = seq("v0 v1 v2 & v3 v4 v5");
        assert_eq!(s.to_string().parse::<AmtSequence>().unwrap(), s);
        assert!(matches!(
            "v0 x1".parse::<AmtSequence>(),
            Err(AmtError::Parse { position: 1, .. })
        ));
    }

    #[test]
    fn visit_order_is_permutation() {
        let m = mesh(6, &[[0, 1, 2], [0, 2, 3], [2, 3, 4], [3, 4, 5], [0, 1, 5]]);
        let (_, order) = tokenize_traced(&m).unwrap();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..5).collect::<Vec<_>>());
    }
}
