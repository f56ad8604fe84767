//! Metric quantities on a triangulation: angles, curvature, the cotangent
//! Jacobian, the α-Laplacian and intrinsic Delaunay flips.

mod angles;
mod delaunay;
mod laplacian;

pub use angles::{face_angles, face_cotangents, triangle_angles, triangle_cotangents, FaceShape};
pub use delaunay::{
    edge_excess, first_delaunay_crossing, flip_in_place, flip_length, is_delaunay, is_delaunay_all,
    make_delaunay, make_delaunay_in_place, max_excess, surgery, transport, FlipRecord,
};
pub use laplacian::{alpha_laplacian_apply, cot_weight, extended_jacobian, jacobian_l, CotMatrix};

use std::f64::consts::PI;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{EdgeId, FaceId, Triangulation};

/// Slack on the Delaunay test: an edge violates only if its opposite angles
/// exceed π by more than this.
pub const EPS_DEL: f64 = 1e-12;
/// Cotangent assigned to extended angles: cot(0) = +CLAMP, cot(π) = −CLAMP.
pub const CLAMP: f64 = 1e12;
/// ∂K_i/∂u_j = −C_JAC · (cot θ_k + cot θ_l) for vertex scaling l_ij = w_i w_j d_ij.
pub const C_JAC: f64 = 1.0;
/// Largest accepted |u_i|; beyond this exp(2u) overflows.
pub const U_MAX: f64 = 300.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("edge length {length} is not positive and finite")]
    NonPositiveLength { length: f64 },
    #[error("metric has {got} entries but the triangulation needs {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("edge {0} has no length")]
    MissingLength(EdgeId),
    #[error("face {0} is degenerate")]
    DegenerateFace(FaceId),
    #[error("log-factor u[{vertex}] = {value} is out of range")]
    FactorOutOfRange { vertex: usize, value: f64 },
    #[error("quadrilateral around {0} is not convex; it cannot be flipped")]
    NonConvexQuad(EdgeId),
    #[error("edge flip limit of {limit} exceeded")]
    FlipLimitExceeded { limit: usize },
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
}

/// Positive lengths indexed by [`EdgeId`]. Retired edge slots hold NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct PLMetric {
    len: Vec<f64>,
}

impl PLMetric {
    /// `lengths` is indexed by edge id and must cover every live edge.
    pub fn new(tri: &Triangulation, lengths: Vec<f64>) -> Result<Self, GeometryError> {
        if lengths.len() != tri.edge_id_bound() {
            return Err(GeometryError::SizeMismatch {
                expected: tri.edge_id_bound(),
                got: lengths.len(),
            });
        }
        for (e, _) in tri.edges() {
            let x = lengths[e.index()];
            if !(x > 0.0 && x.is_finite()) {
                return Err(GeometryError::NonPositiveLength { length: x });
            }
        }
        Ok(PLMetric { len: lengths })
    }

    /// Builds a metric by evaluating `f` on every live edge.
    pub fn from_fn(
        tri: &Triangulation,
        mut f: impl FnMut(EdgeId) -> f64,
    ) -> Result<Self, GeometryError> {
        let mut len = vec![f64::NAN; tri.edge_id_bound()];
        for (e, _) in tri.edges() {
            len[e.index()] = f(e);
        }
        Self::new(tri, len)
    }

    /// Every edge gets length `x`.
    pub fn uniform(tri: &Triangulation, x: f64) -> Result<Self, GeometryError> {
        Self::from_fn(tri, |_| x)
    }

    #[inline]
    pub fn length(&self, e: EdgeId) -> f64 {
        self.len[e.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.len
    }

    /// Lengths of a face's sides, `l[c]` opposite corner `c`.
    #[inline]
    pub fn face_lengths(&self, tri: &Triangulation, f: FaceId) -> [f64; 3] {
        let e = tri.face(f).edges;
        [self.length(e[0]), self.length(e[1]), self.length(e[2])]
    }

    /// Strict triangle inequalities hold on `f`.
    pub fn is_nondegenerate(&self, tri: &Triangulation, f: FaceId) -> bool {
        FaceShape::new(self.face_lengths(tri, f)).is_nondegenerate()
    }

    /// First degenerate face, if any.
    pub fn first_degenerate_face(&self, tri: &Triangulation) -> Option<FaceId> {
        tri.faces()
            .map(|(f, _)| f)
            .find(|&f| !self.is_nondegenerate(tri, f))
    }

    pub(crate) fn set(&mut self, e: EdgeId, x: f64) {
        if e.index() >= self.len.len() {
            self.len.resize(e.index() + 1, f64::NAN);
        }
        self.len[e.index()] = x;
    }

    pub(crate) fn retire(&mut self, e: EdgeId) {
        self.len[e.index()] = f64::NAN;
    }
}

/// Per-vertex log conformal factors `u_i = ln w_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogFactors(Vec<f64>);

impl LogFactors {
    pub fn new(u: Vec<f64>) -> Result<Self, GeometryError> {
        check_factors(&u)?;
        Ok(LogFactors(u))
    }

    pub fn zeros(n: usize) -> Self {
        LogFactors(vec![0.0; n])
    }

    pub fn weights(&self) -> Vec<f64> {
        self.0.iter().map(|u| u.exp()).collect()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for LogFactors {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn check_factors(u: &[f64]) -> Result<(), GeometryError> {
    for (i, &x) in u.iter().enumerate() {
        if !(x.is_finite() && x.abs() <= U_MAX) {
            return Err(GeometryError::FactorOutOfRange {
                vertex: i,
                value: x,
            });
        }
    }
    Ok(())
}

/// Applies vertex scaling: each edge {i,j} gets `exp(u_i + u_j) · base`.
pub fn scale_metric(
    tri: &Triangulation,
    base: &PLMetric,
    u: &[f64],
) -> Result<PLMetric, GeometryError> {
    if u.len() != tri.vertex_count() {
        return Err(GeometryError::SizeMismatch {
            expected: tri.vertex_count(),
            got: u.len(),
        });
    }
    check_factors(u)?;
    let mut len = vec![f64::NAN; tri.edge_id_bound()];
    for (e, edge) in tri.edges() {
        let [a, b] = edge.endpoints;
        len[e.index()] = (u[a] + u[b]).exp() * base.length(e);
    }
    PLMetric::new(tri, len)
}

/// Angle sum defect `K_i = 2π − Σ θ` at every vertex, using extended angles
/// on degenerate faces.
pub fn curvature(tri: &Triangulation, metric: &PLMetric) -> Vec<f64> {
    let mut k = vec![2.0 * PI; tri.vertex_count()];
    for (f, face) in tri.faces() {
        let th = face_angles(tri, metric, f);
        for c in 0..3 {
            k[face.vertices[c]] -= th[c];
        }
    }
    k
}

/// Per-vertex curvature summary for a given α.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    #[serde(rename = "K")]
    pub k: Vec<f64>,
    #[serde(rename = "R_alpha")]
    pub r_alpha: Vec<f64>,
    pub alpha: f64,
    #[serde(rename = "sum_K")]
    pub sum_k: f64,
    #[serde(rename = "R_av")]
    pub r_av: f64,
    pub max_dev: f64,
}

/// `R_α,i = K_i / w_i^α` and `R_av = 2πχ / Σ w_i^α`.
pub fn alpha_curvature(k: &[f64], u: &[f64], alpha: f64, chi: i64) -> CurvatureReport {
    let r_alpha: Vec<f64> = k
        .iter()
        .zip(u)
        .map(|(k, u)| k * (-alpha * u).exp())
        .collect();
    let denom: f64 = u.iter().map(|u| (alpha * u).exp()).sum();
    let r_av = 2.0 * PI * chi as f64 / denom;
    let max_dev = r_alpha.iter().map(|r| (r - r_av).abs()).fold(0.0, f64::max);
    CurvatureReport {
        sum_k: k.iter().sum(),
        k: k.to_vec(),
        r_alpha,
        alpha,
        r_av,
        max_dev,
    }
}

/// Curvature report of `base` scaled by `u`.
pub fn curvature_report(
    tri: &Triangulation,
    base: &PLMetric,
    u: &[f64],
    alpha: f64,
) -> Result<CurvatureReport, GeometryError> {
    let m = scale_metric(tri, base, u)?;
    let k = curvature(tri, &m);
    Ok(alpha_curvature(&k, u, alpha, tri.euler_characteristic()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn identity_scaling() {
        let t = fixtures::torus9();
        let m = fixtures::flat_torus_metric(&t, [1.0, 0.0], [0.3, 1.1]);
        let s = scale_metric(&t, &m, &[0.0; 9]).unwrap();
        assert_eq!(s, m);
    }

    #[test]
    fn single_edge_scaling() {
        // d = 5, w = (2, 3): 2 * 3 * 5 = 30.
        let t = Triangulation::from_faces(3, &[[0, 1, 2], [1, 0, 2]]).unwrap();
        let m = PLMetric::uniform(&t, 5.0).unwrap();
        let u = [2f64.ln(), 3f64.ln(), 0.0];
        let s = scale_metric(&t, &m, &u).unwrap();
        let e = t.find_edge(0, 1).unwrap();
        assert!((s.length(e) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_rejects_huge_factors() {
        let t = fixtures::tetrahedron();
        let m = PLMetric::uniform(&t, 1.0).unwrap();
        assert!(matches!(
            scale_metric(&t, &m, &[301.0, 0.0, 0.0, 0.0]),
            Err(GeometryError::FactorOutOfRange { vertex: 0, .. })
        ));
    }

    #[test]
    fn global_scale_multiplies_lengths_and_r_alpha() {
        let t = fixtures::tetrahedron();
        let m = fixtures::random_metric(&t, 3);
        let u0 = [0.1, -0.2, 0.05, 0.0];
        let lam: f64 = 1.7;
        let u1: Vec<f64> = u0.iter().map(|x| x + lam.ln()).collect();
        let s0 = scale_metric(&t, &m, &u0).unwrap();
        let s1 = scale_metric(&t, &m, &u1).unwrap();
        for e in t.edge_ids() {
            assert!((s1.length(e) - lam * lam * s0.length(e)).abs() < 1e-12);
        }
        for alpha in [-2.0, 0.0, 1.0, 2.5] {
            let r0 = curvature_report(&t, &m, &u0, alpha).unwrap();
            let r1 = curvature_report(&t, &m, &u1, alpha).unwrap();
            for i in 0..4 {
                let want = r0.r_alpha[i] * lam.powf(-alpha);
                assert!((r1.r_alpha[i] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tetrahedron_curvature() {
        let t = fixtures::tetrahedron();
        let m = PLMetric::uniform(&t, 1.0).unwrap();
        let k = curvature(&t, &m);
        for ki in &k {
            assert!((ki - PI).abs() < 1e-14);
        }
        let r = alpha_curvature(&k, &[0.0; 4], -1.0, 2);
        assert!((r.r_av - PI).abs() < 1e-14);
        assert!(r.max_dev < 1e-14);
    }

    #[test]
    fn flat_torus_curvature() {
        let t = fixtures::torus9();
        let m = fixtures::flat_torus_metric(&t, [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]);
        let k = curvature(&t, &m);
        assert!(k.iter().all(|k| k.abs() < 1e-13));
        let r = alpha_curvature(&k, &[0.0; 9], 2.0, 0);
        assert!(r.r_alpha.iter().all(|r| r.abs() < 1e-13));
    }

    #[test]
    fn cube_curvature() {
        let (t, m) = fixtures::cube();
        let k = curvature(&t, &m);
        for ki in &k {
            assert!((ki - PI / 2.0).abs() < 1e-13, "{k:?}");
        }
        assert!((k.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn alpha_curvature_examples() {
        let k = [PI; 4];
        let r = alpha_curvature(&k, &[0.0; 4], 0.0, 2);
        assert_eq!(r.r_alpha, k.to_vec());
        assert!((r.r_av - PI).abs() < 1e-15);

        let r = alpha_curvature(&k, &[2f64.ln(), 0.0, 0.0, 0.0], 1.0, 2);
        assert!((r.r_alpha[0] - PI / 2.0).abs() < 1e-15);
        assert!((r.r_alpha[1] - PI).abs() < 1e-15);
        assert!((r.r_av - 4.0 * PI / 5.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_bonnet_on_degenerate_metric() {
        let t = fixtures::tetrahedron();
        // One very long edge makes two faces degenerate.
        let mut len = vec![1.0; 6];
        len[0] = 2.5;
        let m = PLMetric::new(&t, len).unwrap();
        assert!(m.first_degenerate_face(&t).is_some());
        let k = curvature(&t, &m);
        assert!((k.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn metric_rejects_bad_lengths() {
        let t = fixtures::tetrahedron();
        assert!(matches!(
            PLMetric::new(&t, vec![1.0, 1.0, 0.0, 1.0, 1.0, 1.0]),
            Err(GeometryError::NonPositiveLength { .. })
        ));
        assert!(matches!(
            PLMetric::new(&t, vec![1.0; 5]),
            Err(GeometryError::SizeMismatch { .. })
        ));
    }
}
