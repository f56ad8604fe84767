//! The normalized α-Yamabe and α-Calabi flows in log-factor coordinates,
//! integrated with an energy-guarded adaptive step and surgery by flipping.
//!
//! Yamabe: `du_i/dt = R_av − R_α,i`. Calabi: `du_i/dt = (Δ_α R_α)_i`.
//! Both conserve `Σ w_i^α` (or `Σ u_i` when α = 0) and decrease the Ricci
//! energy `W_α` with `R̄ ≡ R_av`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    alpha_curvature, alpha_laplacian_apply, check_factors, curvature, first_delaunay_crossing,
    scale_metric, surgery, transport, CurvatureReport, FlipRecord, GeometryError, PLMetric,
};
use crate::mesh::io::{to_lengths_doc, LengthsDoc};
use crate::mesh::{EdgeId, FaceId, Triangulation};
use crate::solver::{conserved, energy_difference, SolverError};

/// Smallest step before the integrator gives up.
pub const DT_MIN: f64 = 1e-16;
/// Halvings allowed within one step.
pub const MAX_HALVINGS: usize = 40;
/// Consecutive accepted steps before dt grows.
pub const GROW_AFTER: usize = 5;
pub const GROW_FACTOR: f64 = 1.2;
/// Tolerated energy increase per step, relative to Σ|Δu|.
pub const ENERGY_SLACK: f64 = 1e-12;

pub const HISTORY_HEADER: &str = "t,max_dev,conserved,energy,flips,dt";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("step size fell below {DT_MIN:e} at t = {t} ({reason})")]
    StepSizeUnderflow {
        t: f64,
        face: Option<FaceId>,
        reason: String,
    },
    #[error("history has {points} usable points; at least 3 are needed for a fit")]
    InsufficientTail { points: usize },
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    Yamabe,
    Calabi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Euler,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub kind: FlowKind,
    /// Initial and largest step.
    pub dt: f64,
    /// Convergence threshold on `max_i |R_α,i − R_av|`.
    pub tol: f64,
    pub max_steps: usize,
    pub surgery: bool,
    pub integrator: Integrator,
    pub renormalize: bool,
}

impl FlowConfig {
    pub fn new(kind: FlowKind) -> Self {
        FlowConfig {
            kind,
            dt: match kind {
                FlowKind::Yamabe => 0.1,
                FlowKind::Calabi => 0.01,
            },
            tol: 1e-8,
            max_steps: 100_000,
            surgery: true,
            integrator: Integrator::Euler,
            renormalize: true,
        }
    }

    pub fn yamabe() -> Self {
        Self::new(FlowKind::Yamabe)
    }

    pub fn calabi() -> Self {
        Self::new(FlowKind::Calabi)
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(FlowError::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(FlowError::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// A flip performed during a flow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowFlip {
    pub t: f64,
    pub step: usize,
    pub removed: EdgeId,
    pub created: EdgeId,
    pub old_length: f64,
    pub new_length: f64,
}

/// The evolving object of a flow. The current metric is `base` scaled by `u`.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub tri: Triangulation,
    /// Lengths at `u = 0` on the current triangulation.
    pub base: PLMetric,
    pub u: Vec<f64>,
    pub alpha: f64,
    pub t: f64,
    pub flips: Vec<FlowFlip>,
    pub step_count: usize,
    /// Step size the next step will try first.
    pub dt: f64,
    /// Consecutive accepted steps since dt last changed.
    pub streak: usize,
    /// `W_α(u) − W_α(u0)` accumulated over accepted steps.
    pub energy: f64,
    /// Initial value of the conserved quantity.
    pub conserved0: f64,
    /// `R_av` at the start; constant along the flow.
    pub r_bar: f64,
}

impl FlowState {
    /// Validates the input. Does not flip; see [`FlowState::make_delaunay`].
    pub fn new(
        tri: Triangulation,
        base: PLMetric,
        u0: Vec<f64>,
        alpha: f64,
    ) -> Result<Self, FlowError> {
        if u0.len() != tri.vertex_count() {
            return Err(FlowError::InvalidConfig(format!(
                "u has {} entries for {} vertices",
                u0.len(),
                tri.vertex_count()
            )));
        }
        if !alpha.is_finite() {
            return Err(FlowError::InvalidConfig("alpha must be finite".into()));
        }
        check_factors(&u0)?;
        let m = scale_metric(&tri, &base, &u0)?;
        if let Some(f) = m.first_degenerate_face(&tri) {
            return Err(GeometryError::DegenerateFace(f).into());
        }
        let conserved0 = conserved(alpha, &u0);
        let sw: f64 = u0.iter().map(|x| (alpha * x).exp()).sum();
        let r_bar = 2.0 * PI * tri.euler_characteristic() as f64 / sw;
        Ok(FlowState {
            tri,
            base,
            u: u0,
            alpha,
            t: 0.0,
            flips: Vec::new(),
            step_count: 0,
            dt: 0.0,
            streak: 0,
            energy: 0.0,
            conserved0,
            r_bar,
        })
    }

    pub fn metric(&self) -> Result<PLMetric, GeometryError> {
        scale_metric(&self.tri, &self.base, &self.u)
    }

    pub fn report(&self) -> Result<CurvatureReport, GeometryError> {
        let k = curvature(&self.tri, &self.metric()?);
        Ok(alpha_curvature(
            &k,
            &self.u,
            self.alpha,
            self.tri.euler_characteristic(),
        ))
    }

    pub fn conserved(&self) -> f64 {
        conserved(self.alpha, &self.u)
    }

    /// Flips until the current metric is Delaunay, logging each flip.
    pub fn make_delaunay(&mut self) -> Result<usize, GeometryError> {
        let log = surgery(&mut self.tri, &mut self.base, &self.u)?;
        let n = log.len();
        self.log_flips(log);
        Ok(n)
    }

    fn log_flips(&mut self, log: Vec<FlipRecord>) {
        for r in log {
            self.flips.push(FlowFlip {
                t: self.t,
                step: self.step_count,
                removed: r.removed,
                created: r.created,
                old_length: r.old_length,
                new_length: r.new_length,
            });
        }
    }

    /// LENGTHS_JSON document of the base lengths with `u`, `alpha` and `t`.
    pub fn snapshot(&self) -> LengthsDoc {
        let mut doc = to_lengths_doc(&self.tri, &self.base);
        doc.u = Some(self.u.clone());
        doc.alpha = Some(self.alpha);
        doc.t = Some(self.t);
        doc
    }
}

/// Right-hand side of `kind` at `u` on a fixed triangulation. Fails when the
/// metric at `u` has a degenerate face.
pub fn rhs_at(
    tri: &Triangulation,
    base: &PLMetric,
    u: &[f64],
    alpha: f64,
    kind: FlowKind,
) -> Result<Vec<f64>, GeometryError> {
    let m = scale_metric(tri, base, u)?;
    if let Some(f) = m.first_degenerate_face(tri) {
        return Err(GeometryError::DegenerateFace(f));
    }
    let k = curvature(tri, &m);
    let rep = alpha_curvature(&k, u, alpha, tri.euler_characteristic());
    Ok(match kind {
        FlowKind::Yamabe => rep.r_alpha.iter().map(|r| rep.r_av - r).collect(),
        FlowKind::Calabi => alpha_laplacian_apply(tri, &m, u, alpha, &rep.r_alpha),
    })
}

/// `du/dt = R_av − R_α` at the current state.
pub fn yamabe_rhs(state: &FlowState) -> Result<Vec<f64>, GeometryError> {
    rhs_at(
        &state.tri,
        &state.base,
        &state.u,
        state.alpha,
        FlowKind::Yamabe,
    )
}

/// `du/dt = Δ_α R_α` at the current state.
pub fn calabi_rhs(state: &FlowState) -> Result<Vec<f64>, GeometryError> {
    rhs_at(
        &state.tri,
        &state.base,
        &state.u,
        state.alpha,
        FlowKind::Calabi,
    )
}

/// Outcome of one accepted step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    /// Time advanced; shorter than the attempted step when the step was cut
    /// at a Delaunay boundary.
    pub dt: f64,
    pub rejections: usize,
    pub flips: usize,
    pub energy_change: f64,
}

enum Attempt {
    Accepted {
        u: Vec<f64>,
        dt: f64,
        dw: f64,
    },
    Rejected {
        face: Option<FaceId>,
        reason: String,
    },
}

fn axpy(u: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    u.iter().zip(x).map(|(u, x)| u + a * x).collect()
}

fn attempt(state: &FlowState, cfg: &FlowConfig, dt: f64) -> Result<Attempt, FlowError> {
    let (tri, base, u, alpha) = (&state.tri, &state.base, &state.u, state.alpha);
    let f = |p: &[f64]| rhs_at(tri, base, p, alpha, cfg.kind);
    let stage = |r: Result<Vec<f64>, GeometryError>| match r {
        Ok(v) => Ok(Ok(v)),
        Err(GeometryError::DegenerateFace(face)) => Ok(Err(Attempt::Rejected {
            face: Some(face),
            reason: "an integrator stage degenerates a face".into(),
        })),
        Err(GeometryError::FactorOutOfRange { .. }) => Ok(Err(Attempt::Rejected {
            face: None,
            reason: "log-factors overflow".into(),
        })),
        Err(e) => Err(FlowError::from(e)),
    };
    macro_rules! try_stage {
        ($e:expr) => {
            match stage($e)? {
                Ok(v) => v,
                Err(rej) => return Ok(rej),
            }
        };
    }

    let k1 = try_stage!(f(u));
    let du: Vec<f64> = match cfg.integrator {
        Integrator::Euler => k1.iter().map(|x| dt * x).collect(),
        Integrator::Rk4 => {
            let k2 = try_stage!(f(&axpy(u, 0.5 * dt, &k1)));
            let k3 = try_stage!(f(&axpy(u, 0.5 * dt, &k2)));
            let k4 = try_stage!(f(&axpy(u, dt, &k3)));
            (0..u.len())
                .map(|i| dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect()
        }
    };

    // Stop the step where an edge first turns non-Delaunay so that the flip
    // happens on a nearly cocircular quad.
    let frac = if cfg.surgery {
        match first_delaunay_crossing(tri, base, u, &du, 1.0, 2) {
            Ok(s) => s,
            Err(GeometryError::FactorOutOfRange { .. }) => {
                return Ok(Attempt::Rejected {
                    face: None,
                    reason: "log-factors overflow".into(),
                })
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        1.0
    };
    let mut next = axpy(u, frac, &du);
    if cfg.renormalize {
        renormalize(alpha, state.conserved0, &mut next);
    }
    if check_factors(&next).is_err() {
        return Ok(Attempt::Rejected {
            face: None,
            reason: "log-factors overflow".into(),
        });
    }
    let m = scale_metric(tri, base, &next)?;
    if let Some(face) = m.first_degenerate_face(tri) {
        return Ok(Attempt::Rejected {
            face: Some(face),
            reason: "the step degenerates a face".into(),
        });
    }
    let n = tri.vertex_count();
    let dw = energy_difference(tri, base, u, &next, alpha, &vec![state.r_bar; n])?;
    let moved: f64 = next.iter().zip(u).map(|(a, b)| (a - b).abs()).sum();
    if dw > ENERGY_SLACK * moved {
        return Ok(Attempt::Rejected {
            face: None,
            reason: format!("energy increased by {dw:e}"),
        });
    }
    Ok(Attempt::Accepted {
        u: next,
        dt: frac * dt,
        dw,
    })
}

/// Shifts `u` by a constant so the conserved quantity equals `target`.
pub fn renormalize(alpha: f64, target: f64, u: &mut [f64]) {
    let c = if alpha == 0.0 {
        (target - u.iter().sum::<f64>()) / u.len() as f64
    } else {
        let s: f64 = u.iter().map(|x| (alpha * x).exp()).sum();
        (target / s).ln() / alpha
    };
    for x in u.iter_mut() {
        *x += c;
    }
}

/// One accepted step: integrate, cut at the first Delaunay crossing,
/// renormalize, then flip. Rejected attempts halve dt.
pub fn step(state: &mut FlowState, cfg: &FlowConfig) -> Result<StepReport, FlowError> {
    cfg.validate()?;
    if !(state.dt > 0.0) {
        state.dt = cfg.dt;
    }
    let mut dt = state.dt.min(cfg.dt);
    let mut rejections = 0;
    let mut last_face = None;
    let mut last_reason = String::new();
    loop {
        if dt < DT_MIN || rejections > MAX_HALVINGS {
            return Err(FlowError::StepSizeUnderflow {
                t: state.t,
                face: last_face,
                reason: last_reason,
            });
        }
        match attempt(state, cfg, dt)? {
            Attempt::Accepted { u, dt: taken, dw } => {
                state.u = u;
                state.t += taken;
                state.energy += dw;
                state.step_count += 1;
                if rejections > 0 {
                    state.streak = 0;
                    state.dt = dt;
                } else {
                    state.streak += 1;
                    if state.streak >= GROW_AFTER {
                        state.dt = (dt * GROW_FACTOR).min(cfg.dt);
                        state.streak = 0;
                    }
                }
                let flips = if cfg.surgery {
                    state.make_delaunay()?
                } else {
                    0
                };
                return Ok(StepReport {
                    dt: taken,
                    rejections,
                    flips,
                    energy_change: dw,
                });
            }
            Attempt::Rejected { face, reason } => {
                log::debug!("step rejected at dt = {dt:e}: {reason}");
                last_face = face;
                last_reason = reason;
                rejections += 1;
                dt *= 0.5;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub t: f64,
    pub max_dev: f64,
    pub conserved: f64,
    pub energy: f64,
    /// Total flips so far.
    pub flips: usize,
    /// Time advanced by the step that produced this row.
    pub dt: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowHistory {
    pub rows: Vec<HistoryRow>,
}

impl FlowHistory {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(HISTORY_HEADER);
        s.push('\n');
        for r in &self.rows {
            s += &format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}\n",
                r.t, r.max_dev, r.conserved, r.energy, r.flips, r.dt
            );
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunOutcome {
    Converged,
    MaxSteps,
    Failed(FlowError),
}

#[derive(Clone, Debug)]
pub struct FlowRun {
    pub state: FlowState,
    pub history: FlowHistory,
    pub outcome: RunOutcome,
    /// α·χ > 0: convergence is not guaranteed.
    pub unsupported_regime: bool,
    pub final_report: CurvatureReport,
}

/// Runs a flow until `max_dev < tol`, the step budget runs out, or a step
/// fails. With surgery on, the triangulation is first carried from `u = 0`
/// to `u0` (see [`transport`]) so the start is Delaunay.
pub fn run_flow(
    tri: &Triangulation,
    base: &PLMetric,
    u0: &[f64],
    alpha: f64,
    cfg: &FlowConfig,
) -> Result<FlowRun, FlowError> {
    cfg.validate()?;
    let (mut tri_t, mut base_t) = (tri.clone(), base.clone());
    let initial_flips = if cfg.surgery {
        transport(&mut tri_t, &mut base_t, u0)?
    } else {
        Vec::new()
    };
    let mut state = FlowState::new(tri_t, base_t, u0.to_vec(), alpha)?;
    state.log_flips(initial_flips);
    state.dt = cfg.dt;
    let unsupported_regime = alpha * tri.euler_characteristic() as f64 > 0.0;
    if unsupported_regime {
        log::warn!("unsupported regime: alpha * chi > 0, convergence is not guaranteed");
    }
    let mut history = FlowHistory::default();
    let mut last_dt = 0.0;
    let outcome = loop {
        let rep = state.report()?;
        history.rows.push(HistoryRow {
            t: state.t,
            max_dev: rep.max_dev,
            conserved: state.conserved(),
            energy: state.energy,
            flips: state.flips.len(),
            dt: last_dt,
        });
        if rep.max_dev < cfg.tol {
            break RunOutcome::Converged;
        }
        if state.step_count >= cfg.max_steps {
            break RunOutcome::MaxSteps;
        }
        match step(&mut state, cfg) {
            Ok(r) => last_dt = r.dt,
            Err(e @ FlowError::StepSizeUnderflow { .. }) => {
                log::warn!("flow failed: {e}");
                break RunOutcome::Failed(e);
            }
            Err(e) => return Err(e),
        }
    };
    let final_report = state.report()?;
    Ok(FlowRun {
        state,
        history,
        outcome,
        unsupported_regime,
        final_report,
    })
}

/// Finite-difference `dR_α/dt` along the flow (centered, step `cfg.dt`) minus
/// the closed-form evolution: `Δ_α R + α R (R − R_av)` for Yamabe and
/// `−Δ_α² R − α R Δ_α R` for Calabi.
pub fn curvature_evolution_residual(
    state: &FlowState,
    cfg: &FlowConfig,
) -> Result<Vec<f64>, FlowError> {
    let (tri, base, u, alpha) = (&state.tri, &state.base, &state.u, state.alpha);
    let h = cfg.dt;
    let v = rhs_at(tri, base, u, alpha, cfg.kind)?;
    let r_at = |p: &[f64]| -> Result<Vec<f64>, FlowError> {
        let m = scale_metric(tri, base, p)?;
        let k = curvature(tri, &m);
        Ok(alpha_curvature(&k, p, alpha, tri.euler_characteristic()).r_alpha)
    };
    let rp = r_at(&axpy(u, h, &v))?;
    let rm = r_at(&axpy(u, -h, &v))?;

    let m = scale_metric(tri, base, u)?;
    let k = curvature(tri, &m);
    let rep = alpha_curvature(&k, u, alpha, tri.euler_characteristic());
    let r = &rep.r_alpha;
    let lap = alpha_laplacian_apply(tri, &m, u, alpha, r);
    let closed: Vec<f64> = match cfg.kind {
        FlowKind::Yamabe => (0..r.len())
            .map(|i| lap[i] + alpha * r[i] * (r[i] - rep.r_av))
            .collect(),
        FlowKind::Calabi => {
            let lap2 = alpha_laplacian_apply(tri, &m, u, alpha, &lap);
            (0..r.len())
                .map(|i| -lap2[i] - alpha * r[i] * lap[i])
                .collect()
        }
    };
    Ok((0..r.len())
        .map(|i| (rp[i] - rm[i]) / (2.0 * h) - closed[i])
        .collect())
}

/// Least-squares fit of `ln(max_dev)` against `t` over the tail of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    /// `0.8 · α · R_av`: the slope must not exceed this.
    pub bound: f64,
    pub points: usize,
    pub satisfied: bool,
}

/// Fits the decay rate over the second half of the rows with positive
/// `max_dev` above the rounding floor.
pub fn exponential_rate_probe(
    history: &FlowHistory,
    alpha: f64,
    r_av: f64,
) -> Result<RateFit, FlowError> {
    let pts: Vec<(f64, f64)> = history
        .rows
        .iter()
        .filter(|r| r.max_dev > 1e-13 && r.max_dev.is_finite())
        .map(|r| (r.t, r.max_dev.ln()))
        .collect();
    let tail = &pts[pts.len() / 2..];
    if tail.len() < 3 {
        return Err(FlowError::InsufficientTail { points: tail.len() });
    }
    let n = tail.len() as f64;
    let mt = tail.iter().map(|p| p.0).sum::<f64>() / n;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = tail.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = tail.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(FlowError::InsufficientTail { points: tail.len() });
    }
    let slope = sxy / sxx;
    let bound = 0.8 * alpha * r_av;
    Ok(RateFit {
        slope,
        bound,
        points: tail.len(),
        satisfied: slope <= bound,
    })
}
