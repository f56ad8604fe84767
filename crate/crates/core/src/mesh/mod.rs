//! Closed, oriented triangulated surfaces with intrinsic edge flips.
//!
//! Edges are identified by [`EdgeId`], never by their endpoint pair: after
//! flips an intrinsic triangulation may contain self-edges (both endpoints the
//! same vertex) and several distinct edges joining the same two vertices.
//! Each face stores its three corners in counter-clockwise order together
//! with the edge opposite each corner.

pub mod io;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex index in `0..vertex_count`.
pub type VertexId = usize;

/// Stable edge identifier. A flip retires the flipped edge and allocates a
/// fresh id for the new diagonal; ids are never reused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Face identifier. Flips rewrite the two affected faces in place, so face ids
/// stay valid across flips.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FaceId(pub u32);

impl FaceId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("triangulation has no faces")]
    Empty,
    #[error("face {face} references vertex {vertex}, but only {vertex_count} vertices exist")]
    VertexOutOfRange {
        face: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("face {face} repeats vertex {vertex}")]
    RepeatedVertex { face: usize, vertex: usize },
    #[error("edge {{{a},{b}}} is incident to {count} face sides (expected 2)")]
    NonManifold { a: usize, b: usize, count: usize },
    #[error("the faces around vertex {vertex} do not form a single disk")]
    NonManifoldVertex { vertex: usize },
    #[error("edge {{{a},{b}}} is traversed in the same direction by both incident faces")]
    OrientationConflict { a: usize, b: usize },
    #[error("triangulation is disconnected ({reason})")]
    Disconnected { reason: String },
    #[error("face {face} corner {corner} is glued to edge index {edge}, which is out of range")]
    BadGluing {
        face: usize,
        corner: usize,
        edge: usize,
    },
    #[error("unknown or retired edge {0}")]
    UnknownEdge(EdgeId),
    #[error("flipping {0} would produce an invalid complex")]
    FlipDegeneratesComplex(EdgeId),
}

/// One side of an edge: the face containing it and the corner of that face
/// opposite to the edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Side {
    pub face: FaceId,
    pub corner: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Endpoints in the direction the edge is traversed by `sides[0].face`.
    pub endpoints: [VertexId; 2],
    pub sides: [Side; 2],
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.endpoints[0] == self.endpoints[1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// Corners in counter-clockwise order.
    pub vertices: [VertexId; 3],
    /// `edges[c]` is the edge opposite corner `c`, joining corners `c+1` and `c+2`.
    pub edges: [EdgeId; 3],
}

/// Outcome of a single edge flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlipOutcome {
    pub removed: EdgeId,
    pub created: EdgeId,
    /// Endpoints of the new edge (the two vertices that were opposite the old one).
    pub endpoints: [VertexId; 2],
    /// Boundary edges of the flipped quadrilateral.
    pub quad: [EdgeId; 4],
}

/// A closed, connected, oriented triangulated surface.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    vertex_count: usize,
    faces: Vec<Face>,
    edges: Vec<Option<Edge>>,
    live_edges: usize,
}

#[inline]
pub(crate) fn next(c: usize) -> usize {
    (c + 1) % 3
}

#[inline]
pub(crate) fn prev(c: usize) -> usize {
    (c + 2) % 3
}

impl Triangulation {
    /// Builds a triangulation from vertex triples. Edges are identified by
    /// their unordered endpoint pair, so each pair must be shared by exactly
    /// two faces with opposite orientations.
    pub fn from_faces(vertex_count: usize, faces: &[[VertexId; 3]]) -> Result<Self, MeshError> {
        if faces.is_empty() {
            return Err(MeshError::Empty);
        }
        check_vertices(vertex_count, faces)?;
        for (f, tri) in faces.iter().enumerate() {
            for c in 0..3 {
                if tri[c] == tri[next(c)] {
                    return Err(MeshError::RepeatedVertex {
                        face: f,
                        vertex: tri[c],
                    });
                }
            }
        }

        // unordered pair -> sides (face, corner) in order of appearance
        let mut pairs: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        let mut order: Vec<(usize, usize)> = Vec::new();
        for (f, tri) in faces.iter().enumerate() {
            for c in 0..3 {
                let (a, b) = (tri[next(c)], tri[prev(c)]);
                let key = (a.min(b), a.max(b));
                let entry = pairs.entry(key).or_default();
                if entry.is_empty() {
                    order.push(key);
                }
                entry.push((f, c));
            }
        }

        let mut face_edges = vec![[0usize; 3]; faces.len()];
        for (idx, key) in order.iter().enumerate() {
            let sides = &pairs[key];
            if sides.len() != 2 {
                return Err(MeshError::NonManifold {
                    a: key.0,
                    b: key.1,
                    count: sides.len(),
                });
            }
            for &(f, c) in sides {
                face_edges[f][c] = idx;
            }
        }
        Self::from_glued_faces(vertex_count, faces, &face_edges)
    }

    /// Builds a triangulation from vertex triples plus an explicit gluing:
    /// `face_edges[f][c]` names the edge opposite corner `c` of face `f`.
    /// Each edge index must appear on exactly two face sides. This form
    /// admits loops and multiple edges between the same vertex pair.
    pub fn from_glued_faces(
        vertex_count: usize,
        faces: &[[VertexId; 3]],
        face_edges: &[[usize; 3]],
    ) -> Result<Self, MeshError> {
        if faces.is_empty() {
            return Err(MeshError::Empty);
        }
        check_vertices(vertex_count, faces)?;
        if face_edges.len() != faces.len() {
            return Err(MeshError::BadGluing {
                face: face_edges.len().min(faces.len()),
                corner: 0,
                edge: usize::MAX,
            });
        }
        let edge_count = face_edges.iter().flatten().copied().max().unwrap_or(0) + 1;
        let mut sides: Vec<Vec<Side>> = vec![Vec::new(); edge_count];
        for (f, fe) in face_edges.iter().enumerate() {
            for (c, &e) in fe.iter().enumerate() {
                sides[e].push(Side {
                    face: FaceId(f as u32),
                    corner: c as u8,
                });
            }
        }

        let mut edges = Vec::with_capacity(edge_count);
        for (e, s) in sides.iter().enumerate() {
            if s.len() != 2 {
                // Report by endpoints when we have at least one side.
                let (a, b) = s
                    .first()
                    .map(|side| {
                        let t = &faces[side.face.index()];
                        let c = side.corner as usize;
                        (t[next(c)], t[prev(c)])
                    })
                    .unwrap_or((usize::MAX, usize::MAX));
                if s.is_empty() {
                    return Err(MeshError::BadGluing {
                        face: usize::MAX,
                        corner: usize::MAX,
                        edge: e,
                    });
                }
                return Err(MeshError::NonManifold {
                    a,
                    b,
                    count: s.len(),
                });
            }
            let dir = |side: &Side| {
                let t = &faces[side.face.index()];
                let c = side.corner as usize;
                (t[next(c)], t[prev(c)])
            };
            let (a0, b0) = dir(&s[0]);
            let (a1, b1) = dir(&s[1]);
            // The two sides must traverse the edge in opposite directions.
            if (a1, b1) != (b0, a0) {
                if (a1, b1) == (a0, b0) {
                    return Err(MeshError::OrientationConflict { a: a0, b: b0 });
                }
                return Err(MeshError::NonManifold {
                    a: a0,
                    b: b0,
                    count: 2,
                });
            }
            if s[0] == s[1] {
                return Err(MeshError::NonManifold {
                    a: a0,
                    b: b0,
                    count: 1,
                });
            }
            edges.push(Some(Edge {
                endpoints: [a0, b0],
                sides: [s[0], s[1]],
            }));
        }

        let faces: Vec<Face> = faces
            .iter()
            .zip(face_edges)
            .map(|(v, e)| Face {
                vertices: *v,
                edges: [
                    EdgeId(e[0] as u32),
                    EdgeId(e[1] as u32),
                    EdgeId(e[2] as u32),
                ],
            })
            .collect();
        let tri = Triangulation {
            vertex_count,
            live_edges: edges.len(),
            faces,
            edges,
        };
        tri.check_vertex_links()?;
        tri.check_connected()?;
        Ok(tri)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Number of live edges.
    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    /// One past the largest edge id ever allocated; per-edge arrays are sized by this.
    pub fn edge_id_bound(&self) -> usize {
        self.edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.live_edges as i64 + self.faces.len() as i64
    }

    /// Genus of the (orientable) surface.
    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic()) / 2
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f.index()]
    }

    pub fn faces(&self) -> impl Iterator<Item = (FaceId, &Face)> + '_ {
        self.faces
            .iter()
            .enumerate()
            .map(|(i, f)| (FaceId(i as u32), f))
    }

    pub fn edge(&self, e: EdgeId) -> Result<&Edge, MeshError> {
        self.edges
            .get(e.index())
            .and_then(Option::as_ref)
            .ok_or(MeshError::UnknownEdge(e))
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        matches!(self.edges.get(e.index()), Some(Some(_)))
    }

    /// Live edges in increasing id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().map(|e| (EdgeId(i as u32), e)))
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges().map(|(id, _)| id).collect()
    }

    /// True when two distinct live edges join the same unordered vertex pair,
    /// or some edge is a loop.
    pub fn has_multi_edges(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges().any(|(_, e)| {
            let (a, b) = (e.endpoints[0], e.endpoints[1]);
            a == b || !seen.insert((a.min(b), a.max(b)))
        })
    }

    pub fn has_repeated_face_vertices(&self) -> bool {
        self.faces.iter().any(|f| {
            f.vertices[0] == f.vertices[1]
                || f.vertices[1] == f.vertices[2]
                || f.vertices[2] == f.vertices[0]
        })
    }

    /// Vertex-pair lookup. Ambiguous in the presence of multi-edges; returns
    /// the edge with the smallest id.
    pub fn find_edge(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.edges()
            .find(|(_, e)| {
                (e.endpoints[0] == a && e.endpoints[1] == b)
                    || (e.endpoints[0] == b && e.endpoints[1] == a)
            })
            .map(|(id, _)| id)
    }

    /// Vertex degrees (number of incident face corners).
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for f in &self.faces {
            for &v in &f.vertices {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Flips `e` in place, replacing faces (i,j,k) and (j,i,l) by (k,i,l) and
    /// (l,j,k). The new diagonal {k,l} receives a fresh id.
    pub fn flip(&mut self, e: EdgeId) -> Result<FlipOutcome, MeshError> {
        let edge = self.edge(e)?.clone();
        let [s1, s2] = edge.sides;
        if s1.face == s2.face {
            return Err(MeshError::FlipDegeneratesComplex(e));
        }
        let (f1, c1) = (s1.face.index(), s1.corner as usize);
        let (f2, c2) = (s2.face.index(), s2.corner as usize);
        let t1 = self.faces[f1].clone();
        let t2 = self.faces[f2].clone();

        // f1 = (i, j, k) with k at c1; f2 = (j, i, l) with l at c2.
        let k = t1.vertices[c1];
        let i = t1.vertices[next(c1)];
        let j = t1.vertices[prev(c1)];
        let l = t2.vertices[c2];
        debug_assert_eq!(t2.vertices[next(c2)], j);
        debug_assert_eq!(t2.vertices[prev(c2)], i);

        let e_jk = t1.edges[next(c1)]; // opposite i in f1
        let e_ki = t1.edges[prev(c1)]; // opposite j in f1
        let e_il = t2.edges[next(c2)]; // opposite j in f2
        let e_lj = t2.edges[prev(c2)]; // opposite i in f2

        // When i or j has degree 2 the quad has two of its sides glued
        // (e_ki == e_il or e_jk == e_lj) and the flip yields a self-folded
        // triangle; the updates below handle that case too.
        let created = EdgeId(self.edges.len() as u32);
        // A = (k, i, l): opposite k is il, opposite i is lk (new), opposite l is ki.
        self.faces[f1] = Face {
            vertices: [k, i, l],
            edges: [e_il, created, e_ki],
        };
        // B = (l, j, k): opposite l is jk, opposite j is kl (new), opposite k is lj.
        self.faces[f2] = Face {
            vertices: [l, j, k],
            edges: [e_jk, created, e_lj],
        };

        self.edges[e.index()] = None;
        self.edges.push(Some(Edge {
            // A traverses the new edge from l to k (corners 2 -> 0).
            endpoints: [l, k],
            sides: [
                Side {
                    face: FaceId(f1 as u32),
                    corner: 1,
                },
                Side {
                    face: FaceId(f2 as u32),
                    corner: 1,
                },
            ],
        }));

        // Refresh the side records of the quad's boundary edges.
        for eid in [e_jk, e_ki, e_il, e_lj] {
            self.resync_sides(eid, [f1, f2]);
        }

        Ok(FlipOutcome {
            removed: e,
            created,
            endpoints: [k, l],
            quad: [e_jk, e_ki, e_il, e_lj],
        })
    }

    /// Returns a flipped copy, leaving `self` untouched.
    pub fn flipped(&self, e: EdgeId) -> Result<(Triangulation, FlipOutcome), MeshError> {
        let mut t = self.clone();
        let out = t.flip(e)?;
        Ok((t, out))
    }

    /// Rebuilds the side records of `eid` after the faces in `touched`
    /// changed: sides in other faces are kept, sides in `touched` are read
    /// off the faces. The endpoints follow the first side.
    fn resync_sides(&mut self, eid: EdgeId, touched: [usize; 2]) {
        let old = self.edges[eid.index()]
            .as_ref()
            .expect("face references a live edge")
            .sides;
        let mut sides: Vec<Side> = old
            .iter()
            .copied()
            .filter(|s| !touched.contains(&s.face.index()))
            .collect();
        let mut seen = Vec::new();
        for f in touched {
            if seen.contains(&f) {
                continue;
            }
            seen.push(f);
            for c in 0..3 {
                if self.faces[f].edges[c] == eid {
                    sides.push(Side {
                        face: FaceId(f as u32),
                        corner: c as u8,
                    });
                }
            }
        }
        debug_assert_eq!(sides.len(), 2, "edge {eid} must have two sides");
        let first = sides[0];
        let fv = self.faces[first.face.index()].vertices;
        let c = first.corner as usize;
        let edge = self.edges[eid.index()].as_mut().expect("live edge");
        edge.sides = [sides[0], sides[1]];
        edge.endpoints = [fv[next(c)], fv[prev(c)]];
    }

    /// Faces as rotated vertex triples (smallest vertex first), sorted. Two
    /// triangulations without multi-edges are vertex-labelled isomorphic iff
    /// these agree.
    pub fn canonical_faces(&self) -> Vec<[VertexId; 3]> {
        let mut out: Vec<[VertexId; 3]> = self
            .faces
            .iter()
            .map(|f| {
                let v = f.vertices;
                let r = (0..3).min_by_key(|&c| (v[c], v[next(c)])).unwrap();
                [v[r], v[next(r)], v[prev(r)]]
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Internal consistency check used by tests and after deserialization.
    pub fn validate(&self) -> Result<(), MeshError> {
        for (id, e) in self.edges() {
            for s in e.sides {
                if self.faces[s.face.index()].edges[s.corner as usize] != id {
                    return Err(MeshError::UnknownEdge(id));
                }
            }
        }
        self.check_vertex_links()?;
        self.check_connected()
    }

    /// Each vertex's corners must form one cycle under rotation across edges.
    fn check_vertex_links(&self) -> Result<(), MeshError> {
        let nf = self.faces.len();
        let mut visited = vec![[false; 3]; nf];
        let mut orbits = vec![0usize; self.vertex_count];
        for f in 0..nf {
            for c in 0..3 {
                if visited[f][c] {
                    continue;
                }
                let v = self.faces[f].vertices[c];
                orbits[v] += 1;
                let (mut cf, mut cc) = (f, c);
                loop {
                    visited[cf][cc] = true;
                    // Cross the edge from corner cc to corner cc+1.
                    let eid = self.faces[cf].edges[prev(cc)];
                    let edge = self.edges[eid.index()].as_ref().expect("live edge");
                    let here = Side {
                        face: FaceId(cf as u32),
                        corner: prev(cc) as u8,
                    };
                    let other = if edge.sides[0] == here {
                        edge.sides[1]
                    } else {
                        edge.sides[0]
                    };
                    // In the neighbour the edge runs (v_{cc+1} -> v), so v sits
                    // at corner other.corner + 2.
                    let nf_ = other.face.index();
                    let nc = prev(other.corner as usize);
                    if visited[nf_][nc] {
                        break;
                    }
                    (cf, cc) = (nf_, nc);
                }
            }
        }
        for (v, &o) in orbits.iter().enumerate() {
            if o == 0 {
                return Err(MeshError::Disconnected {
                    reason: format!("vertex {v} is not used by any face"),
                });
            }
            if o > 1 {
                return Err(MeshError::NonManifoldVertex { vertex: v });
            }
        }
        Ok(())
    }

    fn check_connected(&self) -> Result<(), MeshError> {
        let nf = self.faces.len();
        let mut seen = vec![false; nf];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(f) = stack.pop() {
            for &eid in &self.faces[f].edges {
                let edge = self.edges[eid.index()].as_ref().expect("live edge");
                for s in edge.sides {
                    let g = s.face.index();
                    if !seen[g] {
                        seen[g] = true;
                        count += 1;
                        stack.push(g);
                    }
                }
            }
        }
        if count != nf {
            return Err(MeshError::Disconnected {
                reason: format!("only {count} of {nf} faces are reachable from face 0"),
            });
        }
        Ok(())
    }

    /// Explicit gluing table in the form accepted by [`Self::from_glued_faces`],
    /// with edges renumbered densely in id order. Returns the faces, the
    /// gluing, and the id of each dense edge index.
    pub fn to_glued(&self) -> (Vec<[VertexId; 3]>, Vec<[usize; 3]>, Vec<EdgeId>) {
        let ids = self.edge_ids();
        let mut dense = vec![usize::MAX; self.edges.len()];
        for (i, id) in ids.iter().enumerate() {
            dense[id.index()] = i;
        }
        let faces = self.faces.iter().map(|f| f.vertices).collect();
        let glue = self
            .faces
            .iter()
            .map(|f| {
                [
                    dense[f.edges[0].index()],
                    dense[f.edges[1].index()],
                    dense[f.edges[2].index()],
                ]
            })
            .collect();
        (faces, glue, ids)
    }
}

fn check_vertices(vertex_count: usize, faces: &[[VertexId; 3]]) -> Result<(), MeshError> {
    for (f, tri) in faces.iter().enumerate() {
        for &v in tri {
            if v >= vertex_count {
                return Err(MeshError::VertexOutOfRange {
                    face: f,
                    vertex: v,
                    vertex_count,
                });
            }
        }
    }
    Ok(())
}
