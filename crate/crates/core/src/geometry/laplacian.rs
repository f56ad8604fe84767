use nalgebra::DMatrix;

use super::{FaceShape, GeometryError, PLMetric, C_JAC};
use crate::mesh::{next, prev, EdgeId, Triangulation};

/// Sparse symmetric N×N matrix in compressed-row form.
#[derive(Clone, Debug, PartialEq)]
pub struct CotMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CotMatrix {
    /// Assembles from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut trip: Vec<(usize, usize, f64)>) -> Self {
        trip.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<f64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        CotMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[row.clone()].binary_search(&j) {
            Ok(k) => self.vals[row.start + k],
            Err(_) => 0.0,
        }
    }

    /// Nonzero entries of row `i` as (column, value).
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// Returns a copy with `d[i]` added to each diagonal entry.
    pub fn add_diagonal(&self, d: &[f64]) -> CotMatrix {
        let mut trip = self.triplets();
        trip.extend(d.iter().enumerate().map(|(i, &v)| (i, i, v)));
        CotMatrix::from_triplets(self.n, trip)
    }

    fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .collect()
    }
}

/// `cot θ_k + cot θ_l` over the two angles facing `e`.
pub fn cot_weight(tri: &Triangulation, metric: &PLMetric, e: EdgeId) -> Result<f64, GeometryError> {
    let edge = tri.edge(e)?;
    Ok(edge
        .sides
        .iter()
        .map(|s| FaceShape::new(metric.face_lengths(tri, s.face)).cotangents()[s.corner as usize])
        .sum())
}

fn assemble(
    tri: &Triangulation,
    metric: &PLMetric,
    skip_degenerate: bool,
) -> Result<CotMatrix, GeometryError> {
    let n = tri.vertex_count();
    let mut trip = Vec::with_capacity(9 * tri.face_count());
    for (f, face) in tri.faces() {
        let shape = FaceShape::new(metric.face_lengths(tri, f));
        if !shape.is_nondegenerate() {
            if skip_degenerate {
                // Extended angles are locally constant: no contribution.
                continue;
            }
            return Err(GeometryError::DegenerateFace(f));
        }
        let ct = shape.cotangents();
        // Side opposite corner c joins corners c+1 and c+2.
        for (c, &cot) in ct.iter().enumerate() {
            let w = C_JAC * cot;
            let a = face.vertices[next(c)];
            let b = face.vertices[prev(c)];
            trip.push((a, b, -w));
            trip.push((b, a, -w));
            trip.push((a, a, w));
            trip.push((b, b, w));
        }
    }
    Ok(CotMatrix::from_triplets(n, trip))
}

/// The curvature Jacobian `L = ∂K/∂u`: off-diagonal entries are minus the
/// summed cotangent weights of the edges joining i and j, rows sum to zero.
pub fn jacobian_l(tri: &Triangulation, metric: &PLMetric) -> Result<CotMatrix, GeometryError> {
    assemble(tri, metric, false)
}

/// Jacobian of the extended curvature `K̃`: degenerate faces contribute zero.
pub fn extended_jacobian(tri: &Triangulation, metric: &PLMetric) -> CotMatrix {
    assemble(tri, metric, true).expect("degenerate faces are skipped")
}

/// `(Δ_α f)_i = w_i^{−α} Σ_e cot_weight(e) (f_j − f_i)` with `metric` the
/// current (scaled) metric. Loops contribute nothing.
pub fn alpha_laplacian_apply(
    tri: &Triangulation,
    metric: &PLMetric,
    u: &[f64],
    alpha: f64,
    f: &[f64],
) -> Vec<f64> {
    let mut out = vec![0.0; tri.vertex_count()];
    for (fid, face) in tri.faces() {
        let ct = FaceShape::new(metric.face_lengths(tri, fid)).cotangents();
        for (c, &cot) in ct.iter().enumerate() {
            let a = face.vertices[next(c)];
            let b = face.vertices[prev(c)];
            let d = f[b] - f[a];
            out[a] += cot * d;
            out[b] -= cot * d;
        }
    }
    for (o, ui) in out.iter_mut().zip(u) {
        *o *= (-alpha * ui).exp();
    }
    out
}
