//! Baseline face-list tokenization: every face as its three sorted vertex
//! indices, faces in canonical order.

use std::collections::HashSet;

use crate::canonical::CanonicalMesh;
use crate::mesh_io::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NaiveSequence {
    pub items: Vec<VertexId>,
}

impl NaiveSequence {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn face_count(&self) -> usize {
        self.items.len() / 3
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NaiveError {
    #[error("sequence length {0} is not a multiple of 3")]
    Length(usize),
    #[error("face {face}: degenerate triple")]
    DegenerateFace { face: usize },
    #[error("face {face}: duplicate triple")]
    DuplicateFace { face: usize },
    #[error("item {position}: vertex {index} out of range for {count} vertices")]
    IndexOutOfRange {
        position: usize,
        index: VertexId,
        count: usize,
    },
}

pub fn tokenize_naive(mesh: &CanonicalMesh) -> NaiveSequence {
    NaiveSequence {
        items: mesh.faces().iter().flatten().copied().collect(),
    }
}

pub(crate) fn faces_from_naive(
    seq: &NaiveSequence,
    vertex_count: usize,
) -> Result<Vec<[VertexId; 3]>, NaiveError> {
    if !seq.items.len().is_multiple_of(3) {
        return Err(NaiveError::Length(seq.items.len()));
    }
    if let Some((position, &index)) = seq
        .items
        .iter()
        .enumerate()
        .find(|(_, &v)| v as usize >= vertex_count)
    {
        return Err(NaiveError::IndexOutOfRange {
            position,
            index,
            count: vertex_count,
        });
    }
    let mut seen = HashSet::with_capacity(seq.face_count());
    seq.items
        .chunks_exact(3)
        .enumerate()
        .map(|(face, c)| {
            let mut t = [c[0], c[1], c[2]];
            t.sort_unstable();
            if t[0] == t[1] || t[1] == t[2] {
                return Err(NaiveError::DegenerateFace { face });
            }
            if !seen.insert(t) {
                return Err(NaiveError::DuplicateFace { face });
            }
            Ok(t)
        })
        .collect()
}

/// Inverse of [`tokenize_naive`]; `vertices` is the key-order vertex table.
pub fn detokenize_naive(
    seq: &NaiveSequence,
    vertices: &[[u32; 3]],
) -> Result<CanonicalMesh, NaiveError> {
    let faces = faces_from_naive(seq, vertices.len())?;
    Ok(CanonicalMesh::from_key_vertices(vertices, &faces).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: u32) -> Vec<[u32; 3]> {
        (0..n).map(|i| [0, 0, i]).collect()
    }

    #[test]
    fn square() {
        let (m, _) = CanonicalMesh::from_key_vertices(&table(4), &[[1, 2, 3], [0, 1, 2]]);
        let s = tokenize_naive(&m);
        assert_eq!(s.items, vec![0, 1, 2, 1, 2, 3]);
        assert_eq!(detokenize_naive(&s, &table(4)).unwrap(), m);
    }

    #[test]
    fn single_triangle() {
        let (m, _) = CanonicalMesh::from_key_vertices(&table(3), &[[2, 0, 1]]);
        let s = tokenize_naive(&m);
        assert_eq!(s.items, vec![0, 1, 2]);
        assert_eq!(
            detokenize_naive(&s, &table(3)).unwrap().faces(),
            &[[0, 1, 2]]
        );
    }

    #[test]
    fn errors() {
        let t = table(4);
        let s = |items: Vec<u32>| NaiveSequence { items };
        assert_eq!(
            detokenize_naive(&s(vec![0, 1]), &t),
            Err(NaiveError::Length(2))
        );
        assert_eq!(
            detokenize_naive(&s(vec![0, 1, 2, 3, 3, 1]), &t),
            Err(NaiveError::DegenerateFace { face: 1 })
        );
        assert_eq!(
            detokenize_naive(&s(vec![0, 1, 7]), &t),
            Err(NaiveError::IndexOutOfRange {
                position: 2,
                index: 7,
                count: 4
            })
        );
        assert_eq!(
            detokenize_naive(&s(vec![0, 1, 2, 2, 0, 1]), &t),
            Err(NaiveError::DuplicateFace { face: 1 })
        );
    }

    #[test]
    fn unsorted_triples_are_recanonicalized() {
        let s = NaiveSequence {
            items: vec![3, 2, 1, 2, 1, 0],
        };
        let m = detokenize_naive(&s, &table(4)).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [1, 2, 3]]);
    }
}
