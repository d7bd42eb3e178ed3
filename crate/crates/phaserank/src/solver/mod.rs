//! Self-contained small dense convex solvers: a two-phase simplex for linear
//! programs and a primal-dual interior-point method for semidefinite
//! programs. Problem sizes here are tiny, so robustness and determinism
//! matter more than asymptotic speed.

pub mod lp;
pub mod sdp;

pub use lp::{solve_lp, Bound, LinearProgram, LpSolution};
pub use sdp::{solve_sdp, BlockKind, ConicProgram, SdpSolution, SymCoeffs};

/// Outcome classification shared by both solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}
