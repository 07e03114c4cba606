//! Wavefront OBJ reading and writing, plus coordinate quantization.
//!
//! Only `v` and `f` records are consumed. Everything else (`vn`, `vt`, `o`,
//! `g`, `usemtl`, ...) is skipped and tallied in the [`ParseReport`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

/// Index into a mesh's vertex table.
pub type VertexId = u32;

/// Float-coordinate triangle mesh as read from disk.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[VertexId; 3]>,
}

impl RawMesh {
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<[VertexId; 3]>) -> Self {
        Self { vertices, faces }
    }

    /// Checks the index-range and non-degeneracy invariants.
    pub fn validate(&self) -> Result<(), ObjError> {
        let count = self.vertices.len();
        for (i, face) in self.faces.iter().enumerate() {
            for &idx in face {
                if idx as usize >= count {
                    return Err(ObjError::IndexOutOfRange {
                        line: i + 1,
                        index: idx as i64,
                        count,
                    });
                }
            }
            if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
                return Err(ObjError::DegenerateFace { line: i + 1 });
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ObjError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: face index {index} out of range for {count} vertices")]
    IndexOutOfRange {
        line: usize,
        index: i64,
        count: usize,
    },
    #[error("line {line}: degenerate face")]
    DegenerateFace { line: usize },
    #[error("mesh has no vertices")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What to do with faces that repeat a vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegeneratePolicy {
    #[default]
    Drop,
    Reject,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    /// Skipped record keywords and how often each occurred.
    pub ignored_records: BTreeMap<String, usize>,
    pub degenerate_faces_dropped: usize,
    /// Faces added by fan triangulation of polygons with more than 3 corners.
    pub polygons_triangulated: usize,
}

/// Parses an ASCII OBJ stream with the default [`DegeneratePolicy::Drop`].
pub fn parse_obj<R: BufRead>(reader: R) -> Result<(RawMesh, ParseReport), ObjError> {
    parse_obj_with(reader, DegeneratePolicy::Drop)
}

pub fn parse_obj_str(text: &str) -> Result<(RawMesh, ParseReport), ObjError> {
    parse_obj(text.as_bytes())
}

pub fn parse_obj_with<R: BufRead>(
    reader: R,
    policy: DegeneratePolicy,
) -> Result<(RawMesh, ParseReport), ObjError> {
    let mut mesh = RawMesh::default();
    let mut report = ParseReport::default();
    let mut polygon: Vec<VertexId> = Vec::with_capacity(4);

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let mut fields = content.split_whitespace();
        let Some(keyword) = fields.next() else {
            continue;
        };
        match keyword {
            "v" => {
                let mut xyz = [0.0f64; 3];
                for slot in xyz.iter_mut() {
                    let tok = fields.next().ok_or_else(|| ObjError::Malformed {
                        line: lineno,
                        message: "vertex needs 3 coordinates".into(),
                    })?;
                    *slot = tok.parse::<f64>().map_err(|_| ObjError::Malformed {
                        line: lineno,
                        message: format!("bad coordinate {tok:?}"),
                    })?;
                    if !slot.is_finite() {
                        return Err(ObjError::Malformed {
                            line: lineno,
                            message: format!("non-finite coordinate {tok:?}"),
                        });
                    }
                }
                // optional w / vertex colors are ignored
                mesh.vertices.push(xyz);
            }
            "f" => {
                polygon.clear();
                for tok in fields {
                    let slot = tok.split('/').next().unwrap_or("");
                    let raw: i64 = slot.parse().map_err(|_| ObjError::Malformed {
                        line: lineno,
                        message: format!("bad face index {tok:?}"),
                    })?;
                    let count = mesh.vertices.len();
                    let resolved = match raw {
                        0 => None,
                        r if r > 0 => Some(r - 1),
                        r => Some(count as i64 + r),
                    };
                    match resolved {
                        Some(i) if i >= 0 && (i as usize) < count => polygon.push(i as VertexId),
                        _ => {
                            return Err(ObjError::IndexOutOfRange {
                                line: lineno,
                                index: raw,
                                count,
                            })
                        }
                    }
                }
                if polygon.len() < 3 {
                    return Err(ObjError::Malformed {
                        line: lineno,
                        message: format!("face has {} corners", polygon.len()),
                    });
                }
                if polygon.len() > 3 {
                    report.polygons_triangulated += polygon.len() - 3;
                }
                for k in 1..polygon.len() - 1 {
                    let tri = [polygon[0], polygon[k], polygon[k + 1]];
                    if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                        match policy {
                            DegeneratePolicy::Drop => {
                                report.degenerate_faces_dropped += 1;
                                continue;
                            }
                            DegeneratePolicy::Reject => {
                                return Err(ObjError::DegenerateFace { line: lineno })
                            }
                        }
                    }
                    mesh.faces.push(tri);
                }
            }
            other => {
                *report.ignored_records.entry(other.to_string()).or_insert(0) += 1;
            }
        }
    }

    if mesh.vertices.is_empty() {
        return Err(ObjError::Empty);
    }
    Ok((mesh, report))
}

/// Renders a mesh as OBJ text.
///
/// Coordinates use Rust's shortest round-trip float formatting, so
/// re-parsing yields bit-identical values (and integer grids stay integral).
pub fn write_obj(mesh: &RawMesh) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 24 + mesh.faces.len() * 16);
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

/// Axis-aligned box, `min` and `max` per axis in OBJ axis order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn cube(min: f64, max: f64) -> Self {
        Self {
            min: [min; 3],
            max: [max; 3],
        }
    }

    /// Tight box around the given points, or `None` when there are none.
    pub fn of_points(points: &[[f64; 3]]) -> Option<Self> {
        let first = points.first()?;
        let mut b = Aabb {
            min: *first,
            max: *first,
        };
        for p in points {
            for (a, &x) in p.iter().enumerate() {
                b.min[a] = b.min[a].min(x);
                b.max[a] = b.max[a].max(x);
            }
        }
        Some(b)
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BboxMode {
    /// Fixed box `[-0.5, 0.5]^3`; the input is assumed to be normalized already.
    UnitCubeCentered,
    /// The mesh's own bounds, widened to a cube around their center so that
    /// aspect ratio is preserved.
    #[default]
    PerMeshTight,
    /// A caller-provided box used as is.
    Explicit(Aabb),
}

/// Per-axis discretization of real coordinates into `bins` integer levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizationSpec {
    pub bins: u32,
    pub bbox_mode: BboxMode,
}

impl Default for QuantizationSpec {
    fn default() -> Self {
        Self {
            bins: 128,
            bbox_mode: BboxMode::PerMeshTight,
        }
    }
}

impl QuantizationSpec {
    pub fn new(bins: u32, bbox_mode: BboxMode) -> Self {
        assert!(bins >= 2, "quantization needs at least 2 bins");
        Self { bins, bbox_mode }
    }

    /// Identity mapping for meshes whose coordinates are already grid integers
    /// in `[0, bins)`.
    pub fn lattice(bins: u32) -> Self {
        Self::new(bins, BboxMode::Explicit(Aabb::cube(0.0, bins as f64)))
    }

    /// Resolves the box actually used for `mesh`.
    pub fn applied_bbox(&self, mesh: &RawMesh) -> Aabb {
        match self.bbox_mode {
            BboxMode::UnitCubeCentered => Aabb::cube(-0.5, 0.5),
            BboxMode::Explicit(b) => b,
            BboxMode::PerMeshTight => {
                let Some(tight) = Aabb::of_points(&mesh.vertices) else {
                    return Aabb::cube(0.0, 0.0);
                };
                let side = (0..3).map(|a| tight.extent(a)).fold(0.0, f64::max);
                let mut b = tight;
                for a in 0..3 {
                    let center = 0.5 * (tight.min[a] + tight.max[a]);
                    b.min[a] = center - 0.5 * side;
                    b.max[a] = center + 0.5 * side;
                }
                b
            }
        }
    }
}

/// Maps one coordinate to its bin: `floor(t * bins + 0.5)` with
/// `t = (value - min) / extent`, clamped to `[0, bins - 1]`.
/// A non-positive extent sends everything to bin 0.
pub fn quantize_scalar(value: f64, min: f64, extent: f64, bins: u32) -> u32 {
    if extent <= 0.0 || !extent.is_finite() {
        return 0;
    }
    let scaled = (value - min) / extent * bins as f64;
    let bin = (scaled + 0.5).floor();
    if bin <= 0.0 {
        0
    } else if bin >= (bins - 1) as f64 {
        bins - 1
    } else {
        bin as u32
    }
}

/// Quantized mesh: integer grid coordinates in OBJ axis order, not yet
/// deduplicated.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMesh {
    pub bins: u32,
    pub bbox: Aabb,
    pub vertices: Vec<[u32; 3]>,
    pub faces: Vec<[VertexId; 3]>,
}

impl GridMesh {
    /// Lower bin edges in the applied box.
    pub fn dequantize(&self) -> RawMesh {
        let step: Vec<f64> = (0..3)
            .map(|a| self.bbox.extent(a) / self.bins as f64)
            .collect();
        let vertices = self
            .vertices
            .iter()
            .map(|c| {
                let mut p = [0.0; 3];
                for a in 0..3 {
                    p[a] = self.bbox.min[a] + c[a] as f64 * step[a];
                }
                p
            })
            .collect();
        RawMesh::new(vertices, self.faces.clone())
    }

    /// Coordinates as plain integers, e.g. for writing a grid mesh to OBJ.
    pub fn to_raw(&self) -> RawMesh {
        let vertices = self
            .vertices
            .iter()
            .map(|c| [c[0] as f64, c[1] as f64, c[2] as f64])
            .collect();
        RawMesh::new(vertices, self.faces.clone())
    }
}

pub fn quantize(mesh: &RawMesh, spec: &QuantizationSpec) -> GridMesh {
    let bbox = spec.applied_bbox(mesh);
    let extent = [bbox.extent(0), bbox.extent(1), bbox.extent(2)];
    let vertices = mesh
        .vertices
        .iter()
        .map(|p| {
            let mut c = [0u32; 3];
            for a in 0..3 {
                c[a] = quantize_scalar(p[a], bbox.min[a], extent[a], spec.bins);
            }
            c
        })
        .collect();
    GridMesh {
        bins: spec.bins,
        bbox,
        vertices,
        faces: mesh.faces.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRI: &str = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";

    #[test]
    fn minimal_triangle() {
        let (mesh, report) = parse_obj_str(TRI).unwrap();
        assert_eq!(mesh.vertices.len(), 3);
        assert_eq!(mesh.faces, vec![[0, 1, 2]]);
        assert!(report.ignored_records.is_empty());
    }

    #[test]
    fn quad_is_fan_triangulated() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        let (mesh, report) = parse_obj_str(text).unwrap();
        assert_eq!(mesh.faces, vec![[0, 1, 2], [0, 2, 3]]);
        assert_eq!(report.polygons_triangulated, 1);
    }

    #[test]
    fn out_of_range_index() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n";
        match parse_obj_str(text) {
            Err(ObjError::IndexOutOfRange { line, index, count }) => {
                assert_eq!((line, index, count), (4, 9, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn slots_negative_indices_and_ignored_records() {
        let text = "# header\no thing\nv 0 0 0\nv 1 0 0\nvt 0 0\nvn 0 0 1\nv 0 1 0 1.0\n\
                    usemtl m\nf -3/1/1 -2/1/1 -1//1\nvn 0 0 1\n";
        let (mesh, report) = parse_obj_str(text).unwrap();
        assert_eq!(mesh.faces, vec![[0, 1, 2]]);
        assert_eq!(report.ignored_records.get("vn"), Some(&2));
        assert_eq!(report.ignored_records.get("vt"), Some(&1));
        assert_eq!(report.ignored_records.get("o"), Some(&1));
        assert_eq!(report.ignored_records.get("usemtl"), Some(&1));
    }

    #[test]
    fn malformed_record_reports_line() {
        let text = "v 0 0 0\nv 1 zero 0\n";
        match parse_obj_str(text) {
            Err(ObjError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_obj_str("v 0 0 0\nv 1 0 0\nf 1 2\n"),
            Err(ObjError::Malformed { line: 3, .. })
        ));
        assert!(matches!(parse_obj_str("# nothing\n"), Err(ObjError::Empty)));
        assert!(matches!(
            parse_obj_str("v 0 0 0\nf 0 1 1\n"),
            Err(ObjError::IndexOutOfRange { index: 0, .. })
        ));
    }

    #[test]
    fn degenerate_policy() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 2\nf 1 2 3\n";
        let (mesh, report) = parse_obj_str(text).unwrap();
        assert_eq!(mesh.faces.len(), 1);
        assert_eq!(report.degenerate_faces_dropped, 1);
        assert!(matches!(
            parse_obj_with(text.as_bytes(), DegeneratePolicy::Reject),
            Err(ObjError::DegenerateFace { line: 4 })
        ));
    }

    #[test]
    fn write_vertices_only_and_deterministic() {
        let mesh = RawMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![],
        );
        let text = write_obj(&mesh);
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 3);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 0);

        let square = RawMesh::new(
            vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 1.0],
            ],
            vec![[0, 1, 2], [1, 3, 2]],
        );
        assert_eq!(write_obj(&square).as_bytes(), write_obj(&square).as_bytes());
        let (back, _) = parse_obj_str(&write_obj(&square)).unwrap();
        assert_eq!(back, square);
    }

    #[test]
    fn write_preserves_awkward_floats() {
        let mesh = RawMesh::new(
            vec![
                [0.1, -1e-300, 1.0 / 3.0],
                [f64::MAX, 2.5e17, -0.0],
                [7.0, 8.0, 9.0],
            ],
            vec![[2, 0, 1]],
        );
        let (back, _) = parse_obj_str(&write_obj(&mesh)).unwrap();
        assert_eq!(back, mesh);
    }

    #[test]
    fn quantize_unit_cube_corners() {
        let spec = QuantizationSpec::new(128, BboxMode::Explicit(Aabb::cube(-0.5, 0.5)));
        let mesh = RawMesh::new(vec![[-0.5; 3], [0.5; 3]], vec![]);
        let q = quantize(&mesh, &spec);
        assert_eq!(q.vertices, vec![[0, 0, 0], [127, 127, 127]]);

        let unit = QuantizationSpec::new(128, BboxMode::UnitCubeCentered);
        assert_eq!(quantize(&mesh, &unit).vertices, q.vertices);
    }

    #[test]
    fn quantize_round_half_up() {
        // t*bins = 1.96, 2.04, 4.0 -> 2, 2, clamp(4) = 3
        let spec = QuantizationSpec::new(4, BboxMode::Explicit(Aabb::cube(0.0, 1.0)));
        let mesh = RawMesh::new(vec![[0.49, 0.51, 1.0]], vec![]);
        assert_eq!(quantize(&mesh, &spec).vertices, vec![[2, 2, 3]]);
        // exact half goes up
        assert_eq!(quantize_scalar(0.125, 0.0, 1.0, 4), 1);
        assert_eq!(quantize_scalar(-3.0, 0.0, 1.0, 4), 0);
    }

    #[test]
    fn zero_extent_axis_maps_to_bin_zero() {
        let b = Aabb {
            min: [0.0, 2.0, 0.0],
            max: [1.0, 2.0, 1.0],
        };
        let spec = QuantizationSpec::new(8, BboxMode::Explicit(b));
        let mesh = RawMesh::new(vec![[0.5, 2.0, 1.0], [1.0, 2.0, 0.0]], vec![]);
        let q = quantize(&mesh, &spec);
        assert_eq!(q.vertices, vec![[4, 0, 7], [7, 0, 0]]);

        // a single point has no extent at all
        let point = RawMesh::new(vec![[3.0, 3.0, 3.0]], vec![]);
        let q = quantize(&point, &QuantizationSpec::default());
        assert_eq!(q.vertices, vec![[0, 0, 0]]);
    }

    #[test]
    fn tight_bbox_preserves_aspect() {
        let mesh = RawMesh::new(vec![[0.0, 0.0, 0.0], [4.0, 1.0, 0.0]], vec![]);
        let b = QuantizationSpec::default().applied_bbox(&mesh);
        for a in 0..3 {
            assert_eq!(b.extent(a), 4.0);
        }
        assert_eq!(b.min[1], -1.5);
    }
}
