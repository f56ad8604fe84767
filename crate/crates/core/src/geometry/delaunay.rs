use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{FaceShape, GeometryError, PLMetric, EPS_DEL};
use crate::mesh::{next, prev, EdgeId, Triangulation};

/// One intrinsic flip performed by [`make_delaunay`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlipRecord {
    pub removed: EdgeId,
    pub created: EdgeId,
    pub old_length: f64,
    pub new_length: f64,
}

/// `θ_k + θ_l − π` for the two angles facing `e`; positive means non-Delaunay.
pub fn edge_excess(
    tri: &Triangulation,
    metric: &PLMetric,
    e: EdgeId,
) -> Result<f64, GeometryError> {
    let edge = tri.edge(e)?;
    let s: f64 = edge
        .sides
        .iter()
        .map(|s| FaceShape::new(metric.face_lengths(tri, s.face)).angles()[s.corner as usize])
        .sum();
    Ok(s - PI)
}

/// Whether `e` satisfies `θ_k + θ_l ≤ π` (up to [`EPS_DEL`]).
pub fn is_delaunay(
    tri: &Triangulation,
    metric: &PLMetric,
    e: EdgeId,
) -> Result<bool, GeometryError> {
    Ok(edge_excess(tri, metric, e)? <= EPS_DEL)
}

/// All edges violating the Delaunay condition, in id order.
pub fn is_delaunay_all(tri: &Triangulation, metric: &PLMetric) -> Vec<EdgeId> {
    tri.edges()
        .map(|(e, _)| e)
        .filter(|&e| {
            edge_excess(tri, metric, e)
                .map(|x| x > EPS_DEL)
                .unwrap_or(false)
        })
        .collect()
}

/// Length of the other diagonal of the quadrilateral formed by the two faces
/// of `e`, laid out flat across `e`.
pub fn flip_length(
    tri: &Triangulation,
    metric: &PLMetric,
    e: EdgeId,
) -> Result<f64, GeometryError> {
    let edge = tri.edge(e)?;
    let [s1, s2] = edge.sides;
    let (c1, c2) = (s1.corner as usize, s2.corner as usize);
    let l1 = metric.face_lengths(tri, s1.face);
    let l2 = metric.face_lengths(tri, s2.face);
    let sh1 = FaceShape::new(l1);
    let sh2 = FaceShape::new(l2);
    if !sh1.is_nondegenerate() {
        return Err(GeometryError::DegenerateFace(s1.face));
    }
    if !sh2.is_nondegenerate() {
        return Err(GeometryError::DegenerateFace(s2.face));
    }
    let (a1, a2) = (sh1.angles(), sh2.angles());
    // Face 1 is (i, j, k) with k at c1; face 2 is (j, i, l) with l at c2.
    let at_i = a1[next(c1)] + a2[prev(c2)];
    let at_j = a1[prev(c1)] + a2[next(c2)];
    if at_i >= PI || at_j >= PI {
        return Err(GeometryError::NonConvexQuad(e));
    }
    let l_ik = l1[prev(c1)];
    let l_il = l2[next(c2)];
    let d2 = l_ik * l_ik + l_il * l_il - 2.0 * l_ik * l_il * at_i.cos();
    Ok(d2.max(0.0).sqrt())
}

/// Flips `e` in place, updating both the combinatorics and the metric.
/// Also returns the four boundary edges of the flipped quadrilateral.
pub fn flip_in_place(
    tri: &mut Triangulation,
    metric: &mut PLMetric,
    e: EdgeId,
) -> Result<(FlipRecord, [EdgeId; 4]), GeometryError> {
    let new_length = flip_length(tri, metric, e)?;
    let old_length = metric.length(e);
    let out = tri.flip(e)?;
    metric.set(out.created, new_length);
    metric.retire(e);
    Ok((
        FlipRecord {
            removed: e,
            created: out.created,
            old_length,
            new_length,
        },
        out.quad,
    ))
}

/// Flips non-Delaunay edges until none remain. The metric is carried along
/// isometrically: every vertex keeps its cone angle.
pub fn make_delaunay_in_place(
    tri: &mut Triangulation,
    metric: &mut PLMetric,
) -> Result<Vec<FlipRecord>, GeometryError> {
    if let Some(f) = metric.first_degenerate_face(tri) {
        return Err(GeometryError::DegenerateFace(f));
    }
    let limit = 100 * tri.edge_count() * tri.edge_count();
    let mut queue: VecDeque<EdgeId> = tri.edges().map(|(e, _)| e).collect();
    let mut queued = vec![true; tri.edge_id_bound()];
    let mut log = Vec::new();
    while let Some(e) = queue.pop_front() {
        if e.index() < queued.len() {
            queued[e.index()] = false;
        }
        if !tri.contains_edge(e) || edge_excess(tri, metric, e)? <= EPS_DEL {
            continue;
        }
        if log.len() >= limit {
            return Err(GeometryError::FlipLimitExceeded { limit });
        }
        let (rec, quad) = flip_in_place(tri, metric, e)?;
        log.push(rec);
        if queued.len() < tri.edge_id_bound() {
            queued.resize(tri.edge_id_bound(), false);
        }
        for q in quad {
            if !queued[q.index()] {
                queued[q.index()] = true;
                queue.push_back(q);
            }
        }
    }
    Ok(log)
}

/// Non-mutating form of [`make_delaunay_in_place`].
pub fn make_delaunay(
    tri: &Triangulation,
    metric: &PLMetric,
) -> Result<(Triangulation, PLMetric, Vec<FlipRecord>), GeometryError> {
    let mut t = tri.clone();
    let mut m = metric.clone();
    let log = make_delaunay_in_place(&mut t, &mut m)?;
    Ok((t, m, log))
}

/// Largest Delaunay excess over all edges; degenerate faces count through
/// their extended angles.
pub fn max_excess(tri: &Triangulation, metric: &PLMetric) -> f64 {
    let mut angles = vec![[0.0; 3]; tri.face_count()];
    for (f, _) in tri.faces() {
        angles[f.index()] = FaceShape::new(metric.face_lengths(tri, f)).angles();
    }
    tri.edges()
        .map(|(_, e)| {
            e.sides
                .iter()
                .map(|s| angles[s.face.index()][s.corner as usize])
                .sum::<f64>()
                - PI
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Along `u + s·du` on the fixed triangulation, the first `s` in `(0, s_max]`
/// at which some edge stops being Delaunay, located to within 1e-14 and
/// rounded up so the edge is already (barely) violating. Returns `s_max` when
/// the whole segment stays Delaunay. Sampling uses `samples` equal steps, so
/// an excursion shorter than one step can be missed.
pub fn first_delaunay_crossing(
    tri: &Triangulation,
    base: &PLMetric,
    u: &[f64],
    du: &[f64],
    s_max: f64,
    samples: usize,
) -> Result<f64, GeometryError> {
    let mut p = u.to_vec();
    let mut h = |s: f64| -> Result<f64, GeometryError> {
        for (i, pi) in p.iter_mut().enumerate() {
            *pi = u[i] + s * du[i];
        }
        let m = super::scale_metric(tri, base, &p)?;
        Ok(max_excess(tri, &m))
    };
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=samples {
        let s = s_max * k as f64 / samples as f64;
        if h(s)? > EPS_DEL {
            hi = Some(s);
            break;
        }
        lo = s;
    }
    let Some(mut hi) = hi else {
        return Ok(s_max);
    };
    while hi - lo > 1e-14 * s_max.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid)? > EPS_DEL {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Restores the Delaunay property of `base` scaled by `u` by flipping, and
/// rewrites the base length of each new edge as its current length divided
/// by `exp(u_k + u_l)`. Returns the flips with current-metric lengths.
pub fn surgery(
    tri: &mut Triangulation,
    base: &mut PLMetric,
    u: &[f64],
) -> Result<Vec<FlipRecord>, GeometryError> {
    let mut current = super::scale_metric(tri, base, u)?;
    let log = make_delaunay_in_place(tri, &mut current)?;
    if log.is_empty() {
        return Ok(log);
    }
    let snapshot = tri.clone();
    // Replay in order so edges created and removed again are retired.
    for rec in &log {
        base.retire(rec.removed);
        base.set(rec.created, f64::NAN);
    }
    for rec in &log {
        if let Ok(edge) = snapshot.edge(rec.created) {
            let [a, b] = edge.endpoints;
            base.set(rec.created, rec.new_length / (u[a] + u[b]).exp());
        }
    }
    Ok(log)
}

/// Carries `(tri, base)` from `u = 0` to `u`: first flips the base metric to
/// Delaunay, then walks the segment `s·u`, flipping at every point where an
/// edge stops being Delaunay. Flips made this way happen on cocircular quads,
/// so the result does not depend on how `u` was reached; flipping directly at
/// `u` would in general leave the discrete conformal class.
pub fn transport(
    tri: &mut Triangulation,
    base: &mut PLMetric,
    u: &[f64],
) -> Result<Vec<FlipRecord>, GeometryError> {
    let n = tri.vertex_count();
    let mut p = vec![0.0; n];
    let mut log = surgery(tri, base, &p)?;
    let mut rounds = 0usize;
    loop {
        let du: Vec<f64> = u.iter().zip(&p).map(|(a, b)| a - b).collect();
        let s = first_delaunay_crossing(tri, base, &p, &du, 1.0, TRANSPORT_SAMPLES)?;
        if s >= 1.0 {
            p.copy_from_slice(u);
        } else {
            for (pi, d) in p.iter_mut().zip(&du) {
                *pi += s * d;
            }
        }
        log.extend(surgery(tri, base, &p)?);
        if s >= 1.0 {
            return Ok(log);
        }
        rounds += 1;
        let limit = 100 * tri.edge_count().pow(2).max(1);
        if rounds > limit {
            return Err(GeometryError::FlipLimitExceeded { limit });
        }
    }
}

const TRANSPORT_SAMPLES: usize = 16;
