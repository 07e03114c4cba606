//! Deterministic synthetic meshes with known structure.
//!
//! Meshes come out y-up and normalized into `[-0.5, 0.5]^3`. Strips, grids
//! and soups are laid out on an integer lattice whose side stays small
//! enough (at most 64 steps for the sizes the benches use) that quantizing
//! at 128 bins with a tight box keeps every vertex distinct, so their
//! token counts have closed forms.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mesh_io::RawMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Synthetic {
    /// `faces` triangles `(i, i+1, i+2)` whose vertices ascend in sort order.
    Strip { faces: usize },
    /// Open fan of `faces` triangles around a hub vertex.
    Fan { faces: usize },
    /// `width x height` quads, two triangles each.
    Grid { width: usize, height: usize },
    /// Subdivided icosahedron: `20 * 4^s` faces.
    Icosphere { subdivisions: u32 },
    /// `faces` pairwise disconnected triangles at random lattice points.
    Soup { faces: usize, seed: u64 },
    /// Randomly triangulated height field with holes, non-manifold flaps
    /// and shuffled vertex and face order.
    RandomTriangulation { cells: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntheticError {
    #[error("unknown mesh kind {0:?}")]
    UnknownKind(String),
    #[error("bad parameter {0:?}")]
    BadParam(String),
    #[error("missing parameter {0:?}")]
    MissingParam(&'static str),
    #[error("{0}")]
    Invalid(String),
}

const ICOSPHERE_MAX_SUBDIVISIONS: u32 = 7;
const SOUP_LATTICE: u32 = 64;

impl Synthetic {
    /// Face count of the generated mesh, where it is fixed by the parameters.
    pub fn expected_faces(&self) -> Option<usize> {
        match *self {
            Synthetic::Strip { faces }
            | Synthetic::Fan { faces }
            | Synthetic::Soup { faces, .. } => Some(faces),
            Synthetic::Grid { width, height } => Some(2 * width * height),
            Synthetic::Icosphere { subdivisions } => Some(20 * 4usize.pow(subdivisions)),
            Synthetic::RandomTriangulation { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<(), SyntheticError> {
        let bad = |m: &str| Err(SyntheticError::Invalid(m.to_string()));
        match *self {
            Synthetic::Strip { faces: 0 } => bad("strip needs at least 1 face"),
            Synthetic::Fan { faces: 0 } => bad("fan needs at least 1 face"),
            Synthetic::Grid { width, height } if width == 0 || height == 0 => {
                bad("grid needs positive width and height")
            }
            Synthetic::Icosphere { subdivisions } if subdivisions > ICOSPHERE_MAX_SUBDIVISIONS => {
                bad("icosphere subdivisions above 7")
            }
            Synthetic::Soup { faces: 0, .. } => bad("soup needs at least 1 face"),
            Synthetic::Soup { faces, .. } if 3 * faces > (SOUP_LATTICE.pow(3) / 2) as usize => {
                bad("soup too large for its lattice")
            }
            Synthetic::RandomTriangulation { cells: 0, .. } => {
                bad("random triangulation needs at least 1 cell")
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self) -> Result<RawMesh, SyntheticError> {
        self.validate()?;
        Ok(match *self {
            Synthetic::Strip { faces } => strip(faces),
            Synthetic::Fan { faces } => fan(faces),
            Synthetic::Grid { width, height } => grid(width, height),
            Synthetic::Icosphere { subdivisions } => icosphere(subdivisions),
            Synthetic::Soup { faces, seed } => soup(faces, seed),
            Synthetic::RandomTriangulation { cells, seed } => random_triangulation(cells, seed),
        })
    }

    /// Parses `kind` plus `key=value` parameters, e.g. `("grid", ["w=4", "h=2"])`.
    pub fn from_parts<S: AsRef<str>>(kind: &str, params: &[S]) -> Result<Self, SyntheticError> {
        let mut map: HashMap<String, u64> = HashMap::new();
        for p in params {
            let p = p.as_ref();
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| SyntheticError::BadParam(p.into()))?;
            let v: u64 = v.parse().map_err(|_| SyntheticError::BadParam(p.into()))?;
            map.insert(k.to_ascii_lowercase(), v);
        }
        let get = |keys: &[&'static str]| -> Result<u64, SyntheticError> {
            keys.iter()
                .find_map(|k| map.get(*k).copied())
                .ok_or(SyntheticError::MissingParam(keys[0]))
        };
        let seed = map.get("seed").copied().unwrap_or(0);
        let n = || get(&["n", "faces"]).map(|v| v as usize);
        Ok(match kind.to_ascii_lowercase().as_str() {
            "strip" => Synthetic::Strip { faces: n()? },
            "fan" => Synthetic::Fan { faces: n()? },
            "grid" => Synthetic::Grid {
                width: get(&["w", "width"])? as usize,
                height: get(&["h", "height"])? as usize,
            },
            "icosphere" => Synthetic::Icosphere {
                subdivisions: get(&["s", "subdivisions"])? as u32,
            },
            "soup" => Synthetic::Soup { faces: n()?, seed },
            "random" | "random_triangulation" => Synthetic::RandomTriangulation {
                cells: get(&["n", "cells"])? as usize,
                seed,
            },
            other => return Err(SyntheticError::UnknownKind(other.to_string())),
        })
    }
}

impl fmt::Display for Synthetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Synthetic::Strip { faces } => write!(f, "strip n={faces}"),
            Synthetic::Fan { faces } => write!(f, "fan n={faces}"),
            Synthetic::Grid { width, height } => write!(f, "grid w={width} h={height}"),
            Synthetic::Icosphere { subdivisions } => write!(f, "icosphere s={subdivisions}"),
            Synthetic::Soup { faces, seed } => write!(f, "soup n={faces} seed={seed}"),
            Synthetic::RandomTriangulation { cells, seed } => {
                write!(f, "random n={cells} seed={seed}")
            }
        }
    }
}

impl FromStr for Synthetic {
    type Err = SyntheticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split_whitespace();
        let kind = parts
            .next()
            .ok_or_else(|| SyntheticError::UnknownKind(String::new()))?;
        let params: Vec<&str> = parts.collect();
        Synthetic::from_parts(kind, &params)
    }
}

/// Scales lattice points (given as `[x, y, z]`) into `[-0.5, 0.5]^3`.
fn normalize(points: &[[i64; 3]]) -> Vec<[f64; 3]> {
    let mut lo = [i64::MAX; 3];
    let mut hi = [i64::MIN; 3];
    for p in points {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let side = (0..3).map(|a| hi[a] - lo[a]).max().unwrap_or(0).max(1) as f64;
    points
        .iter()
        .map(|p| {
            let mut q = [0.0; 3];
            for a in 0..3 {
                q[a] = (p[a] - lo[a]) as f64 / side - 0.5;
            }
            q
        })
        .collect()
}

fn strip(faces: usize) -> RawMesh {
    let count = faces + 2;
    let row = ((count as f64).sqrt().ceil() as usize).max(2);
    // vertical layer, then depth, then an x zig-zag; ascending in (y, z, x)
    let points: Vec<[i64; 3]> = (0..count)
        .map(|i| {
            let (layer, j) = (i / row, i % row);
            [(j % 2) as i64, layer as i64, j as i64]
        })
        .collect();
    let tris = (0..faces as u32).map(|i| [i, i + 1, i + 2]).collect();
    RawMesh::new(normalize(&points), tris)
}

fn fan(faces: usize) -> RawMesh {
    let mut vertices = vec![[0.0, 0.0, 0.0]];
    let rim = faces + 1;
    for k in 0..rim {
        let angle = std::f64::consts::TAU * k as f64 / (rim + 1) as f64;
        vertices.push([0.5 * angle.cos(), 0.0, 0.5 * angle.sin()]);
    }
    let tris = (1..=faces as u32).map(|i| [0, i, i + 1]).collect();
    RawMesh::new(vertices, tris)
}

fn grid(width: usize, height: usize) -> RawMesh {
    let stride = width + 1;
    let mut points = Vec::with_capacity(stride * (height + 1));
    for j in 0..=height {
        for i in 0..=width {
            points.push([i as i64, 0, j as i64]);
        }
    }
    let mut tris = Vec::with_capacity(2 * width * height);
    for j in 0..height {
        for i in 0..width {
            let v00 = (j * stride + i) as u32;
            let v10 = v00 + 1;
            let v01 = v00 + stride as u32;
            let v11 = v01 + 1;
            tris.push([v00, v10, v01]);
            tris.push([v10, v11, v01]);
        }
    }
    RawMesh::new(normalize(&points), tris)
}

fn icosphere(subdivisions: u32) -> RawMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let project = |p: [f64; 3]| {
        let len = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        [0.5 * p[0] / len, 0.5 * p[1] / len, 0.5 * p[2] / len]
    };
    for v in vertices.iter_mut() {
        *v = project(*v);
    }
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: u32, b: u32, vertices: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let (p, q) = (vertices[a as usize], vertices[b as usize]);
                vertices.push(project([
                    0.5 * (p[0] + q[0]),
                    0.5 * (p[1] + q[1]),
                    0.5 * (p[2] + q[2]),
                ]));
                (vertices.len() - 1) as u32
            })
        };
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    RawMesh::new(vertices, faces)
}

fn soup(faces: usize, seed: u64) -> RawMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = SOUP_LATTICE as i64;
    let mut taken = HashSet::with_capacity(3 * faces);
    let mut points = Vec::with_capacity(3 * faces);
    // pin two opposite corners so the normalized box spans the full lattice
    for corner in [[0, 0, 0], [side - 1; 3]] {
        taken.insert(corner);
        points.push(corner);
    }
    while points.len() < 3 * faces {
        let p = [
            rng.gen_range(0..side),
            rng.gen_range(0..side),
            rng.gen_range(0..side),
        ];
        if taken.insert(p) {
            points.push(p);
        }
    }
    points.truncate(3 * faces);
    let tris = (0..faces as u32)
        .map(|k| [3 * k, 3 * k + 1, 3 * k + 2])
        .collect();
    RawMesh::new(normalize(&points), tris)
}

fn random_triangulation(cells: usize, seed: u64) -> RawMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stride = cells + 1;
    let mut points: Vec<[i64; 3]> = Vec::with_capacity(stride * stride + cells);
    for j in 0..stride {
        for i in 0..stride {
            points.push([2 * i as i64, rng.gen_range(0..8), 2 * j as i64]);
        }
    }
    let mut faces: Vec<[u32; 3]> = Vec::with_capacity(2 * cells * cells);
    for j in 0..cells {
        for i in 0..cells {
            let v00 = (j * stride + i) as u32;
            let v10 = v00 + 1;
            let v01 = v00 + stride as u32;
            let v11 = v01 + 1;
            let pair = if rng.gen_bool(0.5) {
                [[v00, v10, v01], [v10, v11, v01]]
            } else {
                [[v00, v10, v11], [v00, v11, v01]]
            };
            for f in pair {
                if faces.is_empty() || rng.gen_bool(0.85) {
                    faces.push(f);
                }
            }
        }
    }
    // flaps: extra triangles hinged on existing edges, possibly non-manifold
    let flaps = rng.gen_range(0..=cells);
    for _ in 0..flaps {
        let host = faces[rng.gen_range(0..faces.len())];
        let k = rng.gen_range(0..3);
        let (a, b) = (host[k], host[(k + 1) % 3]);
        let apex = [
            rng.gen_range(0..=2 * cells as i64),
            rng.gen_range(10..20),
            rng.gen_range(0..=2 * cells as i64),
        ];
        points.push(apex);
        faces.push([a, b, (points.len() - 1) as u32]);
    }

    let mut order: Vec<u32> = (0..points.len() as u32).collect();
    order.shuffle(&mut rng);
    let mut new_index = vec![0u32; points.len()];
    let mut shuffled = vec![[0i64; 3]; points.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old as usize] = new as u32;
        shuffled[new] = points[old as usize];
    }
    for f in faces.iter_mut() {
        for v in f.iter_mut() {
            *v = new_index[*v as usize];
        }
        f.rotate_left(rng.gen_range(0..3));
    }
    faces.shuffle(&mut rng);
    RawMesh::new(normalize(&shuffled), faces)
}
