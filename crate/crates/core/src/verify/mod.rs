//! Checks on solved states: cost functionals, Nash stationarity through
//! Gateaux derivatives, the linearised density, estimate quantities and
//! the sampled Lagrangian inequalities.

mod cost;
mod diagnostics;
mod gateaux;
mod lemma;
mod linearized;

pub use cost::cost_functional;
pub use diagnostics::{run_diagnostics, DiagnosticsReport};
pub use gateaux::{gateaux_check, smooth_direction, GateauxEstimate};
pub use lemma::{lemma_sample, InequalityFit, LemmaConfig, LemmaReport, LemmaSource, LemmaWitness};
pub use linearized::{
    embed_direction, linearized_oracle, observed_orders, solve_linearized_fp, solve_linearized_fp_with, LinearizedDensity,
};
