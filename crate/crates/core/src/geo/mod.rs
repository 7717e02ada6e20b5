//! Rigid-body geometry and the alignment solvers that register scanned
//! scenes against the robot map.
//!
//! Three problems are covered:
//! - point-to-point registration with known matches ([`solve_rigid_3d3d`]),
//! - reconstruction-to-map alignment through a top-down map projection
//!   ([`solve_map_alignment`]),
//! - camera pose from 3D/2D matches ([`solve_pnp`]).
//!
//! The two iterative solvers share one Gauss–Newton core operating on
//! left-multiplied SE(3) increments.

mod gauss_newton;
mod map_align;
mod pnp;
mod procrustes;
mod transform;

pub use gauss_newton::{GaussNewtonOptions, GaussNewtonReport};
pub use map_align::{map_residuals, solve_map_alignment, MapAlignment, MapProjection};
pub use pnp::{
    pnp_residuals, reprojection_residual, solve_pnp, CameraIntrinsics, Correspondence3D2D,
    PnpSolution, Reprojection,
};
pub use procrustes::{solve_rigid_3d3d, RigidFit};
pub use transform::{hat, rotation_angle, so3_exp, so3_log, RigidTransform};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("no convergence after {iterations} iterations (cost {cost:e})")]
    NoConvergence { iterations: usize, cost: f64 },
    #[error("point {index} has non-positive depth {depth}")]
    BehindCamera { index: usize, depth: f64 },
    #[error("need at least {needed} correspondences, got {got}")]
    TooFewCorrespondences { needed: usize, got: usize },
    #[error("invalid rigid transform: {0}")]
    InvalidTransform(String),
    #[error("non-finite input at correspondence {0}")]
    NonFinite(usize),
}
