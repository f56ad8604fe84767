//! Combinatorial α-curvature on piecewise-linear surfaces.
//!
//! A closed triangulated surface carries a PL metric given by edge lengths.
//! Vertex scaling by per-vertex log-factors `u` changes the metric within its
//! discrete conformal class, and the α-curvature `K_i / w_i^α` measures how far
//! the metric is from having constant curvature. This crate provides:
//!
//! * [`mesh`]: triangulations with stable edge identities and edge flips,
//!   plus OFF / OBJ / JSON ingestion ([`mesh::io`]);
//! * [`geometry`]: angles, curvature, the cotangent Jacobian, the α-Laplacian,
//!   and intrinsic Delaunay flipping;
//! * [`flows`]: the α-Yamabe and α-Calabi flows with surgery by flipping;
//! * [`solver`]: the convex Ricci energy, damped Newton minimization and a
//!   multi-start rigidity check;
//! * [`cli`]: the `plcurv` command-line front end.

// `!(x > 0.0)` is used on purpose so that NaN takes the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod fixtures;
pub mod flows;
pub mod geometry;
pub mod mesh;
pub mod numeric;
pub mod solver;

pub use flows::{FlowConfig, FlowHistory, FlowKind, FlowState, Integrator, RunOutcome};
pub use geometry::{CotMatrix, CurvatureReport, GeometryError, LogFactors, PLMetric};
pub use mesh::{EdgeId, FaceId, MeshError, Triangulation, VertexId};
pub use solver::{Admissibility, EnergyReport, SolverError, Target};

use thiserror::Error;

/// Umbrella error for operations that cross module boundaries.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Load(#[from] mesh::io::LoadError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Flow(#[from] flows::FlowError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}
