//! Convex Ricci energy, Newton's method for prescribed α-curvature, and the
//! multi-start rigidity check.

mod energy;
mod lobachevsky;
mod newton;
mod rigidity;

pub use energy::{
    energy_difference, energy_w_alpha, triangle_energy, triangle_energy_closed_form, EnergyReport,
};
pub use lobachevsky::{clausen2, lobachevsky};
pub use newton::{
    conserved, newton_solve, NewtonConfig, NewtonResult, NewtonTraceRow, NEWTON_TRACE_HEADER,
};
pub use rigidity::{rigidity_check, RigidityReport, RigidityVerdict};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::mesh::Triangulation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("target is not admissible: α·R̄ has a positive entry ({entry} at vertex {vertex})")]
    UnsupportedTarget { vertex: usize, entry: f64 },
    #[error("target cannot be met: {reason}")]
    InfeasibleTarget { reason: String },
    #[error("target has {got} entries for {expected} vertices")]
    TargetSize { expected: usize, got: usize },
    #[error("line search stalled at iteration {iter} (gradient norm {grad_inf:e})")]
    LineSearchStalled { iter: usize, grad_inf: f64 },
    #[error("no convergence after {iterations} iterations (gradient norm {grad_inf:e})")]
    MaxIterations { iterations: usize, grad_inf: f64 },
    #[error("linear solve failed: Hessian is singular")]
    SingularHessian,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Desired α-curvature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// The constant `2πχ / Σ w_i^α`, with `w` taken at the reference point.
    Constant,
    Prescribed(Vec<f64>),
}

impl Target {
    /// Per-vertex target values; the constant target is evaluated at `u_ref`.
    pub fn resolve(
        &self,
        tri: &Triangulation,
        u_ref: &[f64],
        alpha: f64,
    ) -> Result<Vec<f64>, SolverError> {
        let n = tri.vertex_count();
        match self {
            Target::Constant => {
                let s: f64 = u_ref.iter().map(|u| (alpha * u).exp()).sum();
                let c = 2.0 * PI * tri.euler_characteristic() as f64 / s;
                Ok(vec![c; n])
            }
            Target::Prescribed(r) => {
                if r.len() != n {
                    return Err(SolverError::TargetSize {
                        expected: n,
                        got: r.len(),
                    });
                }
                Ok(r.clone())
            }
        }
    }
}

/// Convexity class of the energy for a target, following the sign of α·R̄.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    /// α·R̄ ≡ 0: solutions are unique up to adding a constant to u.
    Singular,
    /// α·R̄ ≤ 0 and not identically 0: at most one solution.
    Definite,
    /// α·R̄ has a positive entry: no convexity, no uniqueness claim.
    Unsupported,
}

fn admissibility_tol(alpha: f64) -> f64 {
    1e-12 * alpha.abs().max(1.0)
}

pub fn classify(alpha: f64, rbar: &[f64]) -> Admissibility {
    let tol = admissibility_tol(alpha);
    if rbar.iter().any(|r| alpha * r > tol) {
        Admissibility::Unsupported
    } else if rbar.iter().all(|r| (alpha * r).abs() <= tol) {
        Admissibility::Singular
    } else {
        Admissibility::Definite
    }
}

/// Classifies and rejects unsupported targets.
pub(crate) fn check_admissible(alpha: f64, rbar: &[f64]) -> Result<Admissibility, SolverError> {
    let class = classify(alpha, rbar);
    if class == Admissibility::Unsupported {
        let (vertex, entry) = rbar
            .iter()
            .enumerate()
            .map(|(i, r)| (i, alpha * r))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        return Err(SolverError::UnsupportedTarget { vertex, entry });
    }
    Ok(class)
}

/// Gauss–Bonnet obstruction for the singular class: with α = 0 the targets
/// must sum to 2πχ; with α ≠ 0 (so R̄ ≡ 0) the surface must be a torus.
pub(crate) fn check_feasible(
    tri: &Triangulation,
    alpha: f64,
    rbar: &[f64],
    class: Admissibility,
) -> Result<(), SolverError> {
    if class != Admissibility::Singular {
        return Ok(());
    }
    let want = 2.0 * PI * tri.euler_characteristic() as f64;
    if alpha == 0.0 {
        let s: f64 = rbar.iter().sum();
        if (s - want).abs() > 1e-9 * (1.0 + want.abs()) {
            return Err(SolverError::InfeasibleTarget {
                reason: format!("targets sum to {s}, but Gauss–Bonnet requires {want}"),
            });
        }
    } else if want != 0.0 {
        return Err(SolverError::InfeasibleTarget {
            reason: format!(
                "a zero target needs χ = 0, the surface has χ = {}",
                tri.euler_characteristic()
            ),
        });
    }
    Ok(())
}
