//! Feedback closure of the compatibility condition and the damped Picard
//! iteration that couples the forward and backward solves.

mod config;
mod feedback;
mod hamiltonian;
mod picard;

pub use config::SolverConfig;
pub use feedback::{feedback_newton, feedback_residual, feedback_solve, JACOBIAN_STEP};
pub use hamiltonian::{hamiltonian, hamiltonian_grad};
pub use picard::{
    best_response, compatibility_residual, picard_solve, picard_solve_from, write_history_csv, HistoryRow,
    PicardFailure, ResidualNorms, SolutionState, HISTORY_HEADER,
};
