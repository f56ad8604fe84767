use super::lobachevsky::lobachevsky;
use super::{classify, Admissibility, SolverError};
use crate::geometry::{
    check_factors, curvature, extended_jacobian, scale_metric, CotMatrix, FaceShape, PLMetric,
};
use crate::mesh::Triangulation;
use crate::numeric::{adaptive_gl, gl_integrate};

/// Extended angles of a triangle with base sides `l` after scaling its
/// corners by `u`: side `c` becomes `exp(u[c+1] + u[c+2]) · l[c]`.
fn corner_angles(l: [f64; 3], u: [f64; 3]) -> [f64; 3] {
    let s = [
        (u[1] + u[2]).exp() * l[0],
        (u[2] + u[0]).exp() * l[1],
        (u[0] + u[1]).exp() * l[2],
    ];
    FaceShape::new(s).angles()
}

/// The extended triangle energy `F̃(u) − F̃(u0) = ∫ θ̃₁du₁ + θ̃₂du₂ + θ̃₃du₃`
/// along the straight segment from `u0` to `u`. Base side `l[c]` is opposite
/// corner `c`. Concave in `u`, with `∂/∂u_c = θ̃_c`.
pub fn triangle_energy(l: [f64; 3], u: [f64; 3], u0: [f64; 3]) -> f64 {
    let du = [u[0] - u0[0], u[1] - u0[1], u[2] - u0[2]];
    if du == [0.0; 3] {
        return 0.0;
    }
    let at = |s: f64| [u0[0] + s * du[0], u0[1] + s * du[1], u0[2] + s * du[2]];
    // The integrand has a kink wherever the triangle degenerates along the
    // path; integrate each smooth piece separately.
    let slack = |s: f64| {
        let p = at(s);
        let t = [
            l[0] * (p[1] + p[2]).exp(),
            l[1] * (p[2] + p[0]).exp(),
            l[2] * (p[0] + p[1]).exp(),
        ];
        let sum = t[0] + t[1] + t[2];
        (0..3)
            .map(|c| sum - 2.0 * t[c])
            .fold(f64::INFINITY, f64::min)
    };
    let mut cuts = vec![0.0];
    const PIECES: usize = 32;
    for k in 0..PIECES {
        let (mut lo, mut hi) = (k as f64 / PIECES as f64, (k + 1) as f64 / PIECES as f64);
        let inside = slack(lo) > 0.0;
        if (slack(hi) > 0.0) == inside {
            continue;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (slack(mid) > 0.0) == inside {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        cuts.push(0.5 * (lo + hi));
    }
    cuts.push(1.0);
    cuts.windows(2)
        .map(|w| {
            adaptive_gl(
                |s| {
                    let th = corner_angles(l, at(s));
                    th[0] * du[0] + th[1] * du[1] + th[2] * du[2]
                },
                w[0],
                w[1],
                64,
                1e-10,
            )
        })
        .sum()
}

/// Closed form of [`triangle_energy`] through the Lobachevsky function:
/// `π Σu − Σ θ̃_c ln l̃_c − Σ Л(θ̃_c)`, differenced between `u` and `u0`.
pub fn triangle_energy_closed_form(l: [f64; 3], u: [f64; 3], u0: [f64; 3]) -> f64 {
    let g = |p: [f64; 3]| {
        let th = corner_angles(l, p);
        let ln_l = [
            p[1] + p[2] + l[0].ln(),
            p[2] + p[0] + l[1].ln(),
            p[0] + p[1] + l[2].ln(),
        ];
        let mut v = std::f64::consts::PI * (p[0] + p[1] + p[2]);
        for c in 0..3 {
            v -= th[c] * ln_l[c] + lobachevsky(th[c]);
        }
        v
    };
    g(u) - g(u0)
}

/// Value, gradient and Hessian of the Ricci energy `W_α` on a fixed
/// triangulation, measured from `u_ref`.
#[derive(Clone, Debug)]
pub struct EnergyReport {
    pub value: f64,
    /// `K̃_i − R̄_i w_i^α`.
    pub gradient: Vec<f64>,
    /// `L̃ − α diag(R̄_i w_i^α)`.
    pub hessian: CotMatrix,
    /// Unsupported targets still get a value; the flag records the lost convexity.
    pub admissibility: Admissibility,
}

/// `−Σ_f F̃_f(u) + Σ_i [2π(u_i − u_ref,i) − R̄_i (w_i^α − w_ref,i^α)/α]`, with the
/// last term read as `R̄_i (u_i − u_ref,i)` when α = 0.
pub fn energy_w_alpha(
    tri: &Triangulation,
    base: &PLMetric,
    u: &[f64],
    alpha: f64,
    rbar: &[f64],
    u_ref: &[f64],
) -> Result<EnergyReport, SolverError> {
    let n = tri.vertex_count();
    for v in [u.len(), rbar.len(), u_ref.len()] {
        if v != n {
            return Err(SolverError::TargetSize {
                expected: n,
                got: v,
            });
        }
    }
    check_factors(u)?;
    check_factors(u_ref)?;
    let mut value = 0.0;
    for (f, face) in tri.faces() {
        let l = base.face_lengths(tri, f);
        let v = face.vertices;
        value -= triangle_energy(
            l,
            [u[v[0]], u[v[1]], u[v[2]]],
            [u_ref[v[0]], u_ref[v[1]], u_ref[v[2]]],
        );
    }
    for i in 0..n {
        value += 2.0 * std::f64::consts::PI * (u[i] - u_ref[i]);
        value -= rbar[i] * weight_integral(alpha, u_ref[i], u[i]);
    }
    let metric = scale_metric(tri, base, u)?;
    let k = curvature(tri, &metric);
    let wa: Vec<f64> = u.iter().map(|x| (alpha * x).exp()).collect();
    let gradient = (0..n).map(|i| k[i] - rbar[i] * wa[i]).collect();
    let diag: Vec<f64> = (0..n).map(|i| -alpha * rbar[i] * wa[i]).collect();
    let hessian = extended_jacobian(tri, &metric).add_diagonal(&diag);
    Ok(EnergyReport {
        value,
        gradient,
        hessian,
        admissibility: classify(alpha, rbar),
    })
}

/// `∫_{a}^{b} e^{αx} dx`.
fn weight_integral(alpha: f64, a: f64, b: f64) -> f64 {
    if alpha == 0.0 {
        b - a
    } else {
        ((alpha * b).exp() - (alpha * a).exp()) / alpha
    }
}

/// `W_α(u_to) − W_α(u_from)` on a fixed triangulation, as the line integral
/// of the gradient along the segment (16-point Gauss–Legendre).
///
/// Differences near a minimizer are far smaller than the energy itself, so
/// integrating the gradient keeps them accurate where subtracting two
/// energy values would not.
pub fn energy_difference(
    tri: &Triangulation,
    base: &PLMetric,
    u_from: &[f64],
    u_to: &[f64],
    alpha: f64,
    rbar: &[f64],
) -> Result<f64, SolverError> {
    let n = tri.vertex_count();
    let du: Vec<f64> = u_to.iter().zip(u_from).map(|(b, a)| b - a).collect();
    check_factors(u_to)?;
    let mut p = vec![0.0; n];
    let mut err = None;
    let v = gl_integrate(
        |s| {
            for i in 0..n {
                p[i] = u_from[i] + s * du[i];
            }
            match scale_metric(tri, base, &p) {
                Ok(m) => {
                    let k = curvature(tri, &m);
                    (0..n)
                        .map(|i| (k[i] - rbar[i] * (alpha * p[i]).exp()) * du[i])
                        .sum()
                }
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        16,
    );
    match err {
        Some(e) => Err(e.into()),
        None => Ok(v),
    }
}
