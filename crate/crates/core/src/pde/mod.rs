//! Time integrators for the forward density equation and the backward
//! value system, and the pointwise Lagrangian.
//!
//! Both directions use the same IMEX splitting: unit diffusion implicit
//! (backward Euler, conjugate gradients), drift and Lagrangian explicit.

mod backward;
mod forward;
mod lagrangian;
mod linear;
mod scheme;

pub use backward::{bellman_step, solve_backward, solve_backward_with};
pub use forward::{drift_field, fp_step, solve_forward, solve_forward_with, NEGATIVE_TOLERANCE};
pub use lagrangian::{eval_lagrangian, lagrangian_field};
pub use linear::{solve_helmholtz, CG_ACCEPT, CG_TARGET};
pub use scheme::{StabilityReport, StepScheme};

pub(crate) use forward::check_density;
pub(crate) use lagrangian::{node_gradients, node_major};
