use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{
    check_admissible, check_feasible, energy_difference, Admissibility, SolverError, Target,
};
use crate::geometry::{
    check_factors, curvature, curvature_report, extended_jacobian, first_delaunay_crossing,
    scale_metric, surgery, transport, CurvatureReport, FlipRecord, GeometryError, PLMetric,
};
use crate::mesh::Triangulation;

pub const NEWTON_TRACE_HEADER: &str = "iter,grad_inf,value,step,flips";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    /// Stop when the largest gradient entry is below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// One row of the solver trace. `value` is the energy relative to the start,
/// `step` the accepted fraction of the Newton step, `flips` the running total.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonTraceRow {
    pub iter: usize,
    pub grad_inf: f64,
    pub value: f64,
    pub step: f64,
    pub flips: usize,
}

#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub tri: Triangulation,
    /// Base lengths on the final triangulation.
    pub base: PLMetric,
    pub u: Vec<f64>,
    pub rbar: Vec<f64>,
    pub admissibility: Admissibility,
    pub trace: Vec<NewtonTraceRow>,
    pub flips: Vec<FlipRecord>,
    pub report: CurvatureReport,
}

impl NewtonResult {
    pub fn iterations(&self) -> usize {
        self.trace.last().map(|r| r.iter).unwrap_or(0)
    }

    pub fn trace_csv(&self) -> String {
        let mut s = String::from(NEWTON_TRACE_HEADER);
        s.push('\n');
        for r in &self.trace {
            s += &format!(
                "{},{:.16e},{:.16e},{:.16e},{}\n",
                r.iter, r.grad_inf, r.value, r.step, r.flips
            );
        }
        s
    }
}

const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
const CROSSING_SAMPLES: usize = 8;

/// Damped Newton minimization of `W_α` for the given target, keeping the
/// triangulation Delaunay by flipping whenever a step reaches a Delaunay
/// boundary.
pub fn newton_solve(
    tri: &Triangulation,
    base: &PLMetric,
    u0: &[f64],
    alpha: f64,
    target: &Target,
    cfg: &NewtonConfig,
) -> Result<NewtonResult, SolverError> {
    let n = tri.vertex_count();
    if u0.len() != n {
        return Err(SolverError::TargetSize {
            expected: n,
            got: u0.len(),
        });
    }
    check_factors(u0)?;
    let rbar = target.resolve(tri, u0, alpha)?;
    let class = check_admissible(alpha, &rbar)?;
    check_feasible(tri, alpha, &rbar, class)?;

    let mut tri = tri.clone();
    let mut base = base.clone();
    let mut u = u0.to_vec();
    let mut flips = transport(&mut tri, &mut base, &u)?;
    let start = scale_metric(&tri, &base, &u)?;
    if let Some(f) = start.first_degenerate_face(&tri) {
        return Err(GeometryError::DegenerateFace(f).into());
    }

    let gauge = Gauge::new(alpha, u0);
    let mut value = 0.0;
    let mut trace = Vec::new();
    let mut step_taken = 0.0;
    for iter in 0..=cfg.max_iter {
        let metric = scale_metric(&tri, &base, &u)?;
        let k = curvature(&tri, &metric);
        let wa: Vec<f64> = u.iter().map(|x| (alpha * x).exp()).collect();
        let g: Vec<f64> = (0..n).map(|i| k[i] - rbar[i] * wa[i]).collect();
        let grad_inf = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        trace.push(NewtonTraceRow {
            iter,
            grad_inf,
            value,
            step: step_taken,
            flips: flips.len(),
        });
        log::debug!("newton iter {iter}: |g| = {grad_inf:e}, W = {value:e}");
        if grad_inf < cfg.tol {
            let report = curvature_report(&tri, &base, &u, alpha)?;
            return Ok(NewtonResult {
                tri,
                base,
                u,
                rbar,
                admissibility: class,
                trace,
                flips,
                report,
            });
        }
        if iter == cfg.max_iter {
            return Err(SolverError::MaxIterations {
                iterations: iter,
                grad_inf,
            });
        }

        let mut h = extended_jacobian(&tri, &metric).to_dense();
        for i in 0..n {
            h[(i, i)] -= alpha * rbar[i] * wa[i];
        }
        if class == Admissibility::Singular {
            // The kernel is spanned by the constant vector; lift it.
            h.add_scalar_mut(1.0 / n as f64);
        }
        let delta = solve(h, &g)?;
        let slope: f64 = g.iter().zip(&delta).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            return Err(SolverError::LineSearchStalled { iter, grad_inf });
        }

        let cap = first_delaunay_crossing(&tri, &base, &u, &delta, 1.0, CROSSING_SAMPLES)?;
        let mut t = cap;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + t * d).collect();
            if check_factors(&trial).is_ok() {
                let m = scale_metric(&tri, &base, &trial)?;
                if m.first_degenerate_face(&tri).is_none() {
                    let dw = energy_difference(&tri, &base, &u, &trial, alpha, &rbar)?;
                    if dw <= ARMIJO_C * t * slope {
                        accepted = Some((trial, dw));
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        let Some((mut next, dw)) = accepted else {
            return Err(SolverError::LineSearchStalled { iter, grad_inf });
        };
        if class == Admissibility::Singular {
            gauge.apply(&mut next);
        }
        value += dw;
        u = next;
        step_taken = t;
        flips.extend(surgery(&mut tri, &mut base, &u)?);
    }
    unreachable!("loop returns on its last iteration")
}

fn solve(h: DMatrix<f64>, g: &[f64]) -> Result<Vec<f64>, SolverError> {
    let rhs = -DVector::from_column_slice(g);
    if let Some(ch) = h.clone().cholesky() {
        return Ok(ch.solve(&rhs).iter().copied().collect());
    }
    h.lu()
        .solve(&rhs)
        .map(|x| x.iter().copied().collect())
        .ok_or(SolverError::SingularHessian)
}

/// Fixes the additive freedom of the singular case the same way the flows
/// conserve it: `Σu` for α = 0, `Σw^α` otherwise.
pub(crate) struct Gauge {
    alpha: f64,
    target: f64,
}

impl Gauge {
    pub(crate) fn new(alpha: f64, u0: &[f64]) -> Self {
        Gauge {
            alpha,
            target: conserved(alpha, u0),
        }
    }

    pub(crate) fn apply(&self, u: &mut [f64]) {
        let c = if self.alpha == 0.0 {
            (self.target - u.iter().sum::<f64>()) / u.len() as f64
        } else {
            let s: f64 = u.iter().map(|x| (self.alpha * x).exp()).sum();
            (self.target / s).ln() / self.alpha
        };
        for x in u.iter_mut() {
            *x += c;
        }
    }
}

/// `Σu` when α = 0, `Σ w^α` otherwise.
pub fn conserved(alpha: f64, u: &[f64]) -> f64 {
    if alpha == 0.0 {
        u.iter().sum()
    } else {
        u.iter().map(|x| (alpha * x).exp()).sum()
    }
}
