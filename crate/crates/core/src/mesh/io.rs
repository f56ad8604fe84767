//! Mesh ingestion (OFF, OBJ, LENGTHS_JSON) and LENGTHS_JSON export.
//!
//! Coordinate formats are reduced to edge lengths on load; positions are not
//! kept. LENGTHS_JSON carries lengths directly, either per face corner
//! (`"lengths"`) or per vertex pair (`"edge_lengths"`). Two optional fields
//! extend it for intrinsic triangulations that have parallel edges or loops:
//! `"face_edges"` gives the explicit gluing (see
//! [`Triangulation::from_glued_faces`]) and a per-entry `"corner"` picks the
//! corner when a face repeats a vertex.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{MeshError, Triangulation};
use crate::geometry::{GeometryError, PLMetric};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFormat {
    Off,
    Obj,
    LengthsJson,
}

impl MeshFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "off" => Some(MeshFormat::Off),
            "obj" => Some(MeshFormat::Obj),
            "json" => Some(MeshFormat::LengthsJson),
            _ => None,
        }
    }
}

impl FromStr for MeshFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            "json" | "lengths_json" | "lengths-json" => Ok(MeshFormat::LengthsJson),
            other => Err(format!("unknown mesh format '{other}'")),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("face {face} has {arity} vertices; only triangles are supported")]
    NonTriangularFace { face: usize, arity: usize },
    #[error("edge between vertices {a} and {b} has zero length")]
    ZeroLengthEdge { a: usize, b: usize },
    #[error("no length given for the edge opposite corner {corner} of face {face}")]
    MissingLength { face: usize, corner: usize },
    #[error("conflicting lengths {first} and {second} for the same edge (face {face})")]
    InconsistentLength {
        face: usize,
        first: f64,
        second: f64,
    },
    #[error("length entry refers to {what}")]
    BadReference { what: String },
    #[error(
        "the vertex-pair form \"edge_lengths\" is ambiguous on meshes with parallel edges or loops"
    )]
    AmbiguousPairForm,
    #[error("document must contain exactly one of \"lengths\" or \"edge_lengths\"")]
    LengthFormMissing,
    #[error("invalid mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("invalid metric: {0}")]
    Geometry(#[from] GeometryError),
}

impl LoadError {
    /// True for syntax-level failures, false for documents that parse but
    /// describe an invalid surface or metric.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            LoadError::Parse { .. } | LoadError::Json(_) | LoadError::LengthFormMissing
        )
    }
}

/// One `"lengths"` entry: the side of `face` opposite vertex `opposite`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthEntry {
    pub face: usize,
    pub opposite: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corner: Option<usize>,
    pub length: f64,
}

/// Serialized LENGTHS_JSON document, optionally with flow-state fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthsDoc {
    pub vertices: usize,
    pub faces: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face_edges: Option<Vec<[usize; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<LengthEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_lengths: Option<Vec<(usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

/// A LENGTHS_JSON document resolved into a triangulation and metric.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub tri: Triangulation,
    pub metric: PLMetric,
    pub u: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub t: Option<f64>,
}

/// Parses a mesh in the given format.
pub fn load_mesh(bytes: &[u8], format: MeshFormat) -> Result<(Triangulation, PLMetric), LoadError> {
    match format {
        MeshFormat::Off => {
            let (pos, faces) = parse_off(text(bytes)?)?;
            from_coordinates(&pos, &faces)
        }
        MeshFormat::Obj => {
            let (pos, faces) = parse_obj(text(bytes)?)?;
            from_coordinates(&pos, &faces)
        }
        MeshFormat::LengthsJson => {
            let s = load_lengths_json(bytes)?;
            Ok((s.tri, s.metric))
        }
    }
}

fn text(bytes: &[u8]) -> Result<&str, LoadError> {
    std::str::from_utf8(bytes).map_err(|e| LoadError::Parse {
        line: 0,
        message: format!("input is not UTF-8: {e}"),
    })
}

/// Triangulation and Euclidean edge lengths from vertex positions.
pub fn from_coordinates(
    positions: &[[f64; 3]],
    faces: &[[usize; 3]],
) -> Result<(Triangulation, PLMetric), LoadError> {
    let tri = Triangulation::from_faces(positions.len(), faces)?;
    let mut len = vec![f64::NAN; tri.edge_id_bound()];
    for (e, edge) in tri.edges() {
        let [a, b] = edge.endpoints;
        let (p, q) = (positions[a], positions[b]);
        let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
        if !(d > 0.0) {
            return Err(LoadError::ZeroLengthEdge { a, b });
        }
        len[e.index()] = d;
    }
    Ok((tri.clone(), PLMetric::new(&tri, len)?))
}

/// Non-empty lines with `#` comments removed, paired with 1-based line numbers.
fn content_lines(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn num<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, LoadError> {
    let tok = tok.ok_or_else(|| LoadError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| LoadError::Parse {
        line,
        message: format!("cannot parse {what} from '{tok}'"),
    })
}

type Polys = (Vec<[f64; 3]>, Vec<[usize; 3]>);

pub fn parse_off(s: &str) -> Result<Polys, LoadError> {
    let mut lines = content_lines(s);
    let (hl, header) = lines.next().ok_or(LoadError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("OFF") {
        return Err(LoadError::Parse {
            line: hl,
            message: "missing OFF header".into(),
        });
    }
    // Counts may follow the header on the same line.
    let rest: Vec<&str> = toks.collect();
    let (cl, counts) = if rest.is_empty() {
        let (l, c) = lines.next().ok_or(LoadError::Parse {
            line: hl,
            message: "missing counts line".into(),
        })?;
        (l, c.split_whitespace().collect::<Vec<_>>())
    } else {
        (hl, rest)
    };
    let mut it = counts.into_iter();
    let nv: usize = num(it.next(), cl, "vertex count")?;
    let nf: usize = num(it.next(), cl, "face count")?;

    let mut pos = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, line) = lines.next().ok_or(LoadError::Parse {
            line: cl,
            message: format!("expected {nv} vertices, found {}", pos.len()),
        })?;
        let mut t = line.split_whitespace();
        let p = [
            num(t.next(), l, "x")?,
            num(t.next(), l, "y")?,
            num(t.next(), l, "z")?,
        ];
        check_finite(&p, l)?;
        pos.push(p);
    }
    let mut faces = Vec::with_capacity(nf);
    for f in 0..nf {
        let (l, line) = lines.next().ok_or(LoadError::Parse {
            line: cl,
            message: format!("expected {nf} faces, found {f}"),
        })?;
        let mut t = line.split_whitespace();
        let k: usize = num(t.next(), l, "face arity")?;
        if k != 3 {
            return Err(LoadError::NonTriangularFace { face: f, arity: k });
        }
        faces.push([
            num(t.next(), l, "vertex index")?,
            num(t.next(), l, "vertex index")?,
            num(t.next(), l, "vertex index")?,
        ]);
    }
    Ok((pos, faces))
}

pub fn parse_obj(s: &str) -> Result<Polys, LoadError> {
    let mut pos = Vec::new();
    let mut faces = Vec::new();
    for (l, line) in content_lines(s) {
        let mut t = line.split_whitespace();
        match t.next() {
            Some("v") => {
                let p = [
                    num(t.next(), l, "x")?,
                    num(t.next(), l, "y")?,
                    num(t.next(), l, "z")?,
                ];
                check_finite(&p, l)?;
                pos.push(p);
            }
            Some("f") => {
                let refs: Vec<&str> = t.collect();
                if refs.len() != 3 {
                    return Err(LoadError::NonTriangularFace {
                        face: faces.len(),
                        arity: refs.len(),
                    });
                }
                let mut tri = [0usize; 3];
                for (slot, r) in tri.iter_mut().zip(refs) {
                    // "v", "v/vt", "v//vn", "v/vt/vn": only the vertex matters.
                    let idx: i64 = num(r.split('/').next(), l, "vertex index")?;
                    let n = pos.len() as i64;
                    let resolved = if idx > 0 { idx - 1 } else { n + idx };
                    if idx == 0 || resolved < 0 {
                        return Err(LoadError::Parse {
                            line: l,
                            message: format!("invalid vertex reference {idx}"),
                        });
                    }
                    *slot = resolved as usize;
                }
                faces.push(tri);
            }
            _ => {}
        }
    }
    Ok((pos, faces))
}

fn check_finite(p: &[f64; 3], line: usize) -> Result<(), LoadError> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(LoadError::Parse {
            line,
            message: "non-finite coordinate".into(),
        })
    }
}

pub fn load_lengths_json(bytes: &[u8]) -> Result<Snapshot, LoadError> {
    let doc: LengthsDoc = serde_json::from_slice(bytes)?;
    resolve(doc)
}

/// Turns a parsed document into a triangulation and metric.
pub fn resolve(doc: LengthsDoc) -> Result<Snapshot, LoadError> {
    let tri = match &doc.face_edges {
        Some(glue) => {
            if glue.len() != doc.faces.len() {
                return Err(LoadError::BadReference {
                    what: format!(
                        "{} face_edges rows for {} faces",
                        glue.len(),
                        doc.faces.len()
                    ),
                });
            }
            Triangulation::from_glued_faces(doc.vertices, &doc.faces, glue)?
        }
        None => Triangulation::from_faces(doc.vertices, &doc.faces)?,
    };
    let mut len = vec![f64::NAN; tri.edge_id_bound()];
    let mut assign = |face: usize, e: crate::mesh::EdgeId, x: f64| -> Result<(), LoadError> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(GeometryError::NonPositiveLength { length: x }.into());
        }
        let slot = &mut len[e.index()];
        if slot.is_nan() {
            *slot = x;
        } else if (*slot - x).abs() > 1e-12 * slot.abs().max(x.abs()) {
            return Err(LoadError::InconsistentLength {
                face,
                first: *slot,
                second: x,
            });
        }
        Ok(())
    };

    match (&doc.lengths, &doc.edge_lengths) {
        (Some(entries), None) => {
            for en in entries {
                if en.face >= tri.face_count() {
                    return Err(LoadError::BadReference {
                        what: format!("face {} (only {} faces)", en.face, tri.face_count()),
                    });
                }
                let face = tri.face(crate::mesh::FaceId(en.face as u32));
                let c = match en.corner {
                    Some(c) if c < 3 && face.vertices[c] == en.opposite => c,
                    Some(c) => {
                        return Err(LoadError::BadReference {
                            what: format!(
                                "corner {c} of face {}, which does not hold vertex {}",
                                en.face, en.opposite
                            ),
                        })
                    }
                    None => {
                        let hits: Vec<usize> = (0..3)
                            .filter(|&c| face.vertices[c] == en.opposite)
                            .collect();
                        match hits.as_slice() {
                            [c] => *c,
                            [] => {
                                return Err(LoadError::BadReference {
                                    what: format!(
                                        "vertex {} opposite in face {}, which does not contain it",
                                        en.opposite, en.face
                                    ),
                                })
                            }
                            _ => {
                                return Err(LoadError::BadReference {
                                    what: format!(
                                    "vertex {} in face {}, which holds it twice; add \"corner\"",
                                    en.opposite, en.face
                                ),
                                })
                            }
                        }
                    }
                };
                assign(en.face, face.edges[c], en.length)?;
            }
        }
        (None, Some(pairs)) => {
            if tri.has_multi_edges() {
                return Err(LoadError::AmbiguousPairForm);
            }
            for &(a, b, x) in pairs {
                let e = tri.find_edge(a, b).ok_or_else(|| LoadError::BadReference {
                    what: format!("vertex pair ({a}, {b}), which is not an edge"),
                })?;
                let face = tri.edge(e)?.sides[0].face.index();
                assign(face, e, x)?;
            }
        }
        _ => return Err(LoadError::LengthFormMissing),
    }

    for (f, face) in tri.faces() {
        for c in 0..3 {
            if len[face.edges[c].index()].is_nan() {
                return Err(LoadError::MissingLength {
                    face: f.index(),
                    corner: c,
                });
            }
        }
    }
    let metric = PLMetric::new(&tri, len)?;
    Ok(Snapshot {
        tri,
        metric,
        u: doc.u,
        alpha: doc.alpha,
        t: doc.t,
    })
}

/// Builds the LENGTHS_JSON document for a triangulation and metric. Uses the
/// per-corner form with one entry per edge; `face_edges` and `corner` are
/// written only when the triangulation needs them.
pub fn to_lengths_doc(tri: &Triangulation, metric: &PLMetric) -> LengthsDoc {
    let (faces, glue, _) = tri.to_glued();
    let needs_glue = tri.has_multi_edges();
    let lengths = tri
        .edges()
        .map(|(e, edge)| {
            let s = edge.sides[0];
            let face = tri.face(s.face);
            let c = s.corner as usize;
            let v = face.vertices;
            let repeated = v[0] == v[1] || v[1] == v[2] || v[2] == v[0];
            LengthEntry {
                face: s.face.index(),
                opposite: v[c],
                corner: repeated.then_some(c),
                length: metric.length(e),
            }
        })
        .collect();
    LengthsDoc {
        vertices: tri.vertex_count(),
        faces,
        face_edges: needs_glue.then_some(glue),
        lengths: Some(lengths),
        edge_lengths: None,
        u: None,
        alpha: None,
        t: None,
    }
}

/// Pretty-printed LENGTHS_JSON.
pub fn write_lengths_json(tri: &Triangulation, metric: &PLMetric) -> String {
    serde_json::to_string_pretty(&to_lengths_doc(tri, metric)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geometry::{curvature, make_delaunay};

    const TET_OFF: &str = "OFF\n# regular tetrahedron\n4 4 6\n\
        0 0 0\n1 0 0\n0.5 0.8660254037844386 0\n0.5 0.28867513459481287 0.816496580927726\n\
        3 0 2 1\n3 0 1 3\n3 1 2 3\n3 0 3 2\n";

    #[test]
    fn off_tetrahedron_unit_lengths() {
        let (t, m) = load_mesh(TET_OFF.as_bytes(), MeshFormat::Off).unwrap();
        assert_eq!(t.edge_count(), 6);
        for e in t.edge_ids() {
            assert!((m.length(e) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn off_counts_on_header_line() {
        let s = "OFF 3 2 3\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n3 1 0 2\n";
        let (t, _) = load_mesh(s.as_bytes(), MeshFormat::Off).unwrap();
        assert_eq!(t.face_count(), 2);
    }

    #[test]
    fn off_rejects_quads_and_garbage() {
        let s = "OFF\n4 1 4\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        assert!(matches!(
            load_mesh(s.as_bytes(), MeshFormat::Off),
            Err(LoadError::NonTriangularFace { face: 0, arity: 4 })
        ));
        let err = load_mesh(b"OFF\n1 x 0\n", MeshFormat::Off).unwrap_err();
        assert!(err.is_parse_error());
        assert!(load_mesh(b"PLY\n", MeshFormat::Off)
            .unwrap_err()
            .is_parse_error());
    }

    #[test]
    fn zero_length_edge() {
        let s = "OFF\n3 2 3\n0 0 0\n0 0 0\n0 1 0\n3 0 1 2\n3 1 0 2\n";
        assert!(matches!(
            load_mesh(s.as_bytes(), MeshFormat::Off),
            Err(LoadError::ZeroLengthEdge { .. })
        ));
    }

    #[test]
    fn obj_cube() {
        let mut s = String::from("# unit cube\no cube\n");
        for p in fixtures::CUBE_POSITIONS {
            s += &format!("v {} {} {}\n", p[0], p[1], p[2]);
        }
        for f in fixtures::CUBE_FACES {
            s += &format!("f {}/1 {}//2 {}\n", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        let (t, m) = load_mesh(s.as_bytes(), MeshFormat::Obj).unwrap();
        assert_eq!(
            (t.vertex_count(), t.edge_count(), t.face_count()),
            (8, 18, 12)
        );
        assert_eq!(t.euler_characteristic(), 2);
        let k = curvature(&t, &m);
        assert!(k
            .iter()
            .all(|k| (k - std::f64::consts::FRAC_PI_2).abs() < 1e-12));
    }

    #[test]
    fn obj_negative_indices_and_quads() {
        let s = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\nf 2 1 3\n";
        let (t, _) = load_mesh(s.as_bytes(), MeshFormat::Obj).unwrap();
        assert_eq!(t.face_count(), 2);
        let q = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n";
        assert!(matches!(
            load_mesh(q.as_bytes(), MeshFormat::Obj),
            Err(LoadError::NonTriangularFace { .. })
        ));
    }

    #[test]
    fn lengths_json_two_face_sphere() {
        let s = r#"{"vertices": 3, "faces": [[0,1,2],[1,0,2]],
            "lengths": [
              {"face": 0, "opposite": 0, "length": 1}, {"face": 0, "opposite": 1, "length": 1},
              {"face": 0, "opposite": 2, "length": 1}, {"face": 1, "opposite": 0, "length": 1},
              {"face": 1, "opposite": 1, "length": 1}, {"face": 1, "opposite": 2, "length": 1.0}]}"#;
        let (t, m) = load_mesh(s.as_bytes(), MeshFormat::LengthsJson).unwrap();
        assert_eq!(t.edge_count(), 3);
        assert!(t.edge_ids().iter().all(|&e| m.length(e) == 1.0));
    }

    #[test]
    fn lengths_json_pair_form() {
        let s = r#"{"vertices": 3, "faces": [[0,1,2],[1,0,2]],
            "edge_lengths": [[0,1,1.0],[1,2,1.5],[2,0,2.0]]}"#;
        let (t, m) = load_mesh(s.as_bytes(), MeshFormat::LengthsJson).unwrap();
        assert_eq!(m.length(t.find_edge(2, 1).unwrap()), 1.5);
    }

    #[test]
    fn lengths_json_errors() {
        let missing = r#"{"vertices": 3, "faces": [[0,1,2],[1,0,2]],
            "edge_lengths": [[0,1,1.0],[1,2,1.5]]}"#;
        assert!(matches!(
            load_mesh(missing.as_bytes(), MeshFormat::LengthsJson),
            Err(LoadError::MissingLength { .. })
        ));
        let conflict = r#"{"vertices": 3, "faces": [[0,1,2],[1,0,2]],
            "edge_lengths": [[0,1,1.0],[1,0,1.5],[1,2,1],[2,0,1]]}"#;
        assert!(matches!(
            load_mesh(conflict.as_bytes(), MeshFormat::LengthsJson),
            Err(LoadError::InconsistentLength { .. })
        ));
        let neither = r#"{"vertices": 3, "faces": [[0,1,2],[1,0,2]]}"#;
        assert!(load_mesh(neither.as_bytes(), MeshFormat::LengthsJson)
            .unwrap_err()
            .is_parse_error());
        let negative = r#"{"vertices": 3, "faces": [[0,1,2],[1,0,2]],
            "edge_lengths": [[0,1,-1.0],[1,2,1],[2,0,1]]}"#;
        assert!(matches!(
            load_mesh(negative.as_bytes(), MeshFormat::LengthsJson),
            Err(LoadError::Geometry(_))
        ));
    }

    #[test]
    fn pair_form_rejected_with_parallel_edges() {
        let t = fixtures::genus2();
        let m = fixtures::random_metric(&t, 1);
        let mut doc = to_lengths_doc(&t, &m);
        doc.lengths = None;
        doc.edge_lengths = Some(vec![(0, 1, 1.0)]);
        assert!(matches!(resolve(doc), Err(LoadError::AmbiguousPairForm)));
    }

    #[test]
    fn round_trip_after_flips() {
        // Flipping on the tetrahedron produces parallel edges; the export must
        // carry an explicit gluing and reload to the same curvature.
        let t = fixtures::tetrahedron();
        let m = fixtures::random_metric(&t, 4);
        let mut m2 = m.clone();
        let mut t2 = t.clone();
        let e = t2.edge_ids()[2];
        crate::geometry::flip_in_place(&mut t2, &mut m2, e).unwrap();
        let json = write_lengths_json(&t2, &m2);
        assert!(json.contains("face_edges"));
        let s = load_lengths_json(json.as_bytes()).unwrap();
        let (k0, k1) = (curvature(&t2, &m2), curvature(&s.tri, &s.metric));
        for (a, b) in k0.iter().zip(&k1) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn round_trip_is_exact() {
        for (t, m) in fixtures::sample_meshes(8) {
            let (t, m, _) = make_delaunay(&t, &m).unwrap();
            let s = load_lengths_json(write_lengths_json(&t, &m).as_bytes()).unwrap();
            assert_eq!(s.tri.canonical_faces(), t.canonical_faces());
            let mut a: Vec<f64> = t.edge_ids().iter().map(|&e| m.length(e)).collect();
            let mut b: Vec<f64> = s
                .tri
                .edge_ids()
                .iter()
                .map(|&e| s.metric.length(e))
                .collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(
            MeshFormat::from_path(Path::new("a/b.OFF")),
            Some(MeshFormat::Off)
        );
        assert_eq!(
            MeshFormat::from_path(Path::new("x.json")),
            Some(MeshFormat::LengthsJson)
        );
        assert_eq!(MeshFormat::from_path(Path::new("x.ply")), None);
    }
}
