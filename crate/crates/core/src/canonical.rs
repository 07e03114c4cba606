//! Canonical mesh form: deduplicated vertices sorted by (vertical, depth, x),
//! faces as ascending index triples in lexicographic order, and an edge to
//! incident-face index for adjacency queries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mesh_io::{GridMesh, RawMesh, VertexId};

pub type FaceId = u32;

/// Which OBJ axis is vertical. The vertical axis becomes the primary sort key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpAxis {
    #[default]
    Y,
    Z,
}

impl UpAxis {
    /// OBJ `[x, y, z]` to sort-key order `[vertical, depth, x]`.
    pub fn to_key(self, p: [u32; 3]) -> [u32; 3] {
        match self {
            UpAxis::Y => [p[1], p[2], p[0]],
            UpAxis::Z => [p[2], p[1], p[0]],
        }
    }

    pub fn from_key(self, k: [u32; 3]) -> [u32; 3] {
        match self {
            UpAxis::Y => [k[2], k[0], k[1]],
            UpAxis::Z => [k[2], k[1], k[0]],
        }
    }
}

impl fmt::Display for UpAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpAxis::Y => "y",
            UpAxis::Z => "z",
        })
    }
}

impl FromStr for UpAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "y" => Ok(UpAxis::Y),
            "z" => Ok(UpAxis::Z),
            _ => Err(format!("unknown up axis {s:?} (expected y or z)")),
        }
    }
}

/// Counters for everything canonicalization merged or discarded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalizeReport {
    pub merged_vertices: usize,
    pub degenerate_faces: usize,
    pub duplicate_faces: usize,
    pub unreferenced_vertices: usize,
}

/// Compressed edge table. For every vertex `a`, the slice
/// `entries[offsets[a]..offsets[a + 1]]` holds `(b, face)` for each face
/// incident to edge `{a, b}` with `a < b`, sorted by `(b, face)`.
#[derive(Debug, Clone, Default)]
struct EdgeIndex {
    offsets: Vec<u32>,
    entries: Vec<(VertexId, FaceId)>,
}

impl EdgeIndex {
    fn build(vertex_count: usize, faces: &[[VertexId; 3]]) -> Self {
        let mut offsets = vec![0u32; vertex_count + 1];
        for f in faces {
            offsets[f[0] as usize + 1] += 2;
            offsets[f[1] as usize + 1] += 1;
        }
        for i in 0..vertex_count {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor: Vec<u32> = offsets[..vertex_count].to_vec();
        let mut entries = vec![(0, 0); faces.len() * 3];
        let mut push = |lo: VertexId, hi: VertexId, face: FaceId| {
            let slot = &mut cursor[lo as usize];
            entries[*slot as usize] = (hi, face);
            *slot += 1;
        };
        for (id, f) in faces.iter().enumerate() {
            let id = id as FaceId;
            push(f[0], f[1], id);
            push(f[0], f[2], id);
            push(f[1], f[2], id);
        }
        for v in 0..vertex_count {
            entries[offsets[v] as usize..offsets[v + 1] as usize].sort_unstable();
        }
        Self { offsets, entries }
    }

    fn incident(&self, a: VertexId, b: VertexId) -> &[(VertexId, FaceId)] {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let Some(&start) = self.offsets.get(lo as usize) else {
            return &[];
        };
        let Some(&end) = self.offsets.get(lo as usize + 1) else {
            return &[];
        };
        let slice = &self.entries[start as usize..end as usize];
        let first = slice.partition_point(|&(other, _)| other < hi);
        let last = slice.partition_point(|&(other, _)| other <= hi);
        &slice[first..last]
    }
}

/// The unique form of a triangle mesh consumed by both codecs.
#[derive(Debug, Clone)]
pub struct CanonicalMesh {
    vertices: Vec<[u32; 3]>,
    faces: Vec<[VertexId; 3]>,
    edges: EdgeIndex,
}

impl PartialEq for CanonicalMesh {
    fn eq(&self, other: &Self) -> bool {
        // the edge index is a function of the faces
        self.vertices == other.vertices && self.faces == other.faces
    }
}

impl Eq for CanonicalMesh {}

impl CanonicalMesh {
    /// Builds the canonical form from vertices already in key order
    /// `[vertical, depth, x]`.
    ///
    /// # Panics
    /// If a face references a vertex outside `vertices`.
    pub fn from_key_vertices(
        vertices: &[[u32; 3]],
        faces: &[[VertexId; 3]],
    ) -> (Self, CanonicalizeReport) {
        let mut report = CanonicalizeReport::default();
        let n = vertices.len();

        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_unstable_by_key(|&i| vertices[i as usize]);
        let mut rank = vec![0u32; n];
        let mut unique: Vec<[u32; 3]> = Vec::with_capacity(n);
        for &i in &order {
            let p = vertices[i as usize];
            if unique.last() != Some(&p) {
                unique.push(p);
            }
            rank[i as usize] = (unique.len() - 1) as u32;
        }
        report.merged_vertices = n - unique.len();

        let mut tris: Vec<[VertexId; 3]> = Vec::with_capacity(faces.len());
        for f in faces {
            for &i in f {
                assert!(
                    (i as usize) < n,
                    "face index {i} out of range for {n} vertices"
                );
            }
            let mut t = [
                rank[f[0] as usize],
                rank[f[1] as usize],
                rank[f[2] as usize],
            ];
            t.sort_unstable();
            if t[0] == t[1] || t[1] == t[2] {
                report.degenerate_faces += 1;
                continue;
            }
            tris.push(t);
        }
        tris.sort_unstable();
        let before = tris.len();
        tris.dedup();
        report.duplicate_faces = before - tris.len();

        let mut used = vec![false; unique.len()];
        for t in &tris {
            for &i in t {
                used[i as usize] = true;
            }
        }
        let mut remap = vec![u32::MAX; unique.len()];
        let mut kept = Vec::with_capacity(unique.len());
        for (i, p) in unique.into_iter().enumerate() {
            if used[i] {
                remap[i] = kept.len() as u32;
                kept.push(p);
            } else {
                report.unreferenced_vertices += 1;
            }
        }
        // remap is monotone, so triples and the face list stay sorted
        for t in &mut tris {
            for i in t.iter_mut() {
                *i = remap[*i as usize];
            }
        }

        let edges = EdgeIndex::build(kept.len(), &tris);
        (
            Self {
                vertices: kept,
                faces: tris,
                edges,
            },
            report,
        )
    }

    /// Vertices in key order `[vertical, depth, x]`, strictly ascending.
    pub fn vertices(&self) -> &[[u32; 3]] {
        &self.vertices
    }

    /// Ascending index triples in ascending order.
    pub fn faces(&self) -> &[[VertexId; 3]] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Faces incident to the unordered edge `{a, b}`, ascending by face id.
    pub fn incident_faces(&self, a: VertexId, b: VertexId) -> impl Iterator<Item = FaceId> + '_ {
        self.edges.incident(a, b).iter().map(|&(_, f)| f)
    }

    /// Every edge `(a, b)` with `a < b` together with its incident faces.
    pub fn edges(&self) -> Vec<((VertexId, VertexId), Vec<FaceId>)> {
        let mut out: Vec<((VertexId, VertexId), Vec<FaceId>)> = Vec::new();
        for a in 0..self.vertices.len() {
            let s = self.edges.offsets[a] as usize;
            let e = self.edges.offsets[a + 1] as usize;
            for &(b, f) in &self.edges.entries[s..e] {
                match out.last_mut() {
                    Some((key, faces)) if *key == (a as VertexId, b) => faces.push(f),
                    _ => out.push(((a as VertexId, b), vec![f])),
                }
            }
        }
        out
    }

    fn third_vertex(&self, face: FaceId, a: VertexId, b: VertexId) -> VertexId {
        let f = self.faces[face as usize];
        f.into_iter()
            .find(|&v| v != a && v != b)
            .expect("face contains edge")
    }

    /// Third vertices of the unvisited faces on edge `{a, b}`, ascending.
    ///
    /// Only vertices that close an actual face with the edge are returned.
    /// Since vertices are sorted by coordinates, index order is coordinate
    /// order.
    pub fn adjacent_third_vertices(
        &self,
        edge: (VertexId, VertexId),
        unvisited: &UnvisitedFaces,
    ) -> Vec<VertexId> {
        let (a, b) = edge;
        let mut out: Vec<VertexId> = self
            .incident_faces(a, b)
            .filter(|&f| unvisited.contains(f))
            .map(|f| self.third_vertex(f, a, b))
            .collect();
        out.sort_unstable();
        out
    }

    /// The lowest candidate of [`Self::adjacent_third_vertices`] and the face
    /// it closes.
    pub(crate) fn first_adjacent(
        &self,
        a: VertexId,
        b: VertexId,
        unvisited: &UnvisitedFaces,
    ) -> Option<(VertexId, FaceId)> {
        self.incident_faces(a, b)
            .filter(|&f| unvisited.contains(f))
            .map(|f| (self.third_vertex(f, a, b), f))
            .min()
    }

    /// Looks up the id of face `{a, b, c}` in any index order.
    pub fn find_face(&self, a: VertexId, b: VertexId, c: VertexId) -> Option<FaceId> {
        let mut t = [a, b, c];
        t.sort_unstable();
        self.faces.binary_search(&t).ok().map(|i| i as FaceId)
    }

    /// Back to a float mesh with integer coordinates in OBJ axis order.
    pub fn to_raw(&self, up: UpAxis) -> RawMesh {
        let vertices = self
            .vertices
            .iter()
            .map(|&k| {
                let p = up.from_key(k);
                [p[0] as f64, p[1] as f64, p[2] as f64]
            })
            .collect();
        RawMesh::new(vertices, self.faces.clone())
    }

    /// Smallest per-axis bin count able to hold every coordinate.
    pub fn min_bins(&self) -> u32 {
        self.vertices
            .iter()
            .flat_map(|v| v.iter().copied())
            .max()
            .map_or(0, |m| m + 1)
    }
}

pub fn canonicalize(mesh: &GridMesh, up: UpAxis) -> CanonicalMesh {
    canonicalize_with_report(mesh, up).0
}

pub fn canonicalize_with_report(
    mesh: &GridMesh,
    up: UpAxis,
) -> (CanonicalMesh, CanonicalizeReport) {
    let keyed: Vec<[u32; 3]> = mesh.vertices.iter().map(|&p| up.to_key(p)).collect();
    CanonicalMesh::from_key_vertices(&keyed, &mesh.faces)
}

/// Set of faces not yet emitted, with ordered "pop the lowest" access.
#[derive(Debug, Clone)]
pub struct UnvisitedFaces {
    visited: Vec<bool>,
    remaining: usize,
    // every face below `cursor` is visited
    cursor: usize,
}

impl UnvisitedFaces {
    pub fn all(face_count: usize) -> Self {
        Self {
            visited: vec![false; face_count],
            remaining: face_count,
            cursor: 0,
        }
    }

    pub fn contains(&self, face: FaceId) -> bool {
        self.visited.get(face as usize).is_some_and(|v| !v)
    }

    /// Marks `face` visited; returns whether it was unvisited.
    pub fn remove(&mut self, face: FaceId) -> bool {
        match self.visited.get_mut(face as usize) {
            Some(v) if !*v => {
                *v = true;
                self.remaining -= 1;
                true
            }
            _ => false,
        }
    }

    pub fn pop_first(&mut self) -> Option<FaceId> {
        while self.cursor < self.visited.len() && self.visited[self.cursor] {
            self.cursor += 1;
        }
        if self.cursor == self.visited.len() {
            return None;
        }
        let face = self.cursor as FaceId;
        self.remove(face);
        Some(face)
    }

    pub fn len(&self) -> usize {
        self.remaining
    }

    pub fn is_empty(&self) -> bool {
        self.remaining == 0
    }
}
