//! Interior-point solver for conic programs over generalized power,
//! power-mean, and relative-entropy cones (plus zero and nonnegative blocks).
//!
//! The solver follows a homogeneous self-dual embedding with dual scaling:
//! all curvature information comes from the dual barrier Hessians, whose
//! diagonal-plus-low-rank structure is kept explicit and carried into a
//! sparse quasi-definite LDLᵀ factorization of the expanded KKT system.
//! Primal barrier values — needed only for the centrality check — are
//! recovered through conjugacy with one scalar Newton solve per cone.

pub mod algebra;
pub mod cones;
pub mod bench;
pub mod conjugacy;
pub mod io;
pub mod kkt;
pub mod problem;
pub mod solver;

pub use algebra::CscMatrix;
pub use cones::{ConeSide, ConeSpec};
pub use problem::ProblemData;
pub use solver::{solve, Settings, SolveResult, Status};
