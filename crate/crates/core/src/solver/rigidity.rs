use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{classify, newton_solve, Admissibility, NewtonConfig, SolverError, Target};
use crate::geometry::PLMetric;
use crate::mesh::Triangulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RigidityVerdict {
    Pass,
    Fail,
    /// Target not admissible; no uniqueness claim is made.
    Unsupported,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub verdict: RigidityVerdict,
    pub admissibility: Admissibility,
    pub trials: usize,
    /// Largest ∞-norm distance between any solution and the first one, after
    /// removing the additive constant in the singular case.
    pub max_discrepancy: f64,
    pub starts: Vec<Vec<f64>>,
    pub solutions: Vec<Vec<f64>>,
}

/// Solutions from different starts must agree to this ∞-norm distance.
pub const RIGIDITY_TOL: f64 = 1e-6;

/// Runs Newton from `trials` seeded random starts and checks that all
/// solutions coincide (modulo a constant when α·R̄ ≡ 0). The constant target
/// is resolved once, at u = 0, so every start aims at the same R̄.
pub fn rigidity_check(
    tri: &Triangulation,
    base: &PLMetric,
    alpha: f64,
    target: &Target,
    trials: usize,
    seed: u64,
) -> Result<RigidityReport, SolverError> {
    let n = tri.vertex_count();
    let rbar = target.resolve(tri, &vec![0.0; n], alpha)?;
    let class = classify(alpha, &rbar);
    if class == Admissibility::Unsupported {
        return Ok(RigidityReport {
            verdict: RigidityVerdict::Unsupported,
            admissibility: class,
            trials: 0,
            max_discrepancy: f64::NAN,
            starts: Vec::new(),
            solutions: Vec::new(),
        });
    }
    let fixed = Target::Prescribed(rbar);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = NewtonConfig::default();
    let mut starts = Vec::with_capacity(trials);
    let mut solutions = Vec::with_capacity(trials);
    while solutions.len() < trials {
        let u0: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
        let r = newton_solve(tri, base, &u0, alpha, &fixed, &cfg)?;
        let mut u = r.u;
        if class == Admissibility::Singular {
            let mean = u.iter().sum::<f64>() / n as f64;
            u.iter_mut().for_each(|x| *x -= mean);
        }
        starts.push(u0);
        solutions.push(u);
    }
    let max_discrepancy = solutions
        .iter()
        .map(|s| {
            s.iter()
                .zip(&solutions[0])
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        })
        .fold(0.0, f64::max);
    Ok(RigidityReport {
        verdict: if max_discrepancy <= RIGIDITY_TOL {
            RigidityVerdict::Pass
        } else {
            RigidityVerdict::Fail
        },
        admissibility: class,
        trials,
        max_discrepancy,
        starts,
        solutions,
    })
}
