//! Periodic space-time grid, field containers and discrete operators.

mod field;
pub mod io;
mod ops;
mod spec;

pub use field::{DensityTrajectory, FieldTrajectory, MultiField, ScalarField, Trajectory};
pub use ops::{div_upwind, div_upwind_tangent, gradient, integrate_pnorm, laplacian, KINK_RATIO};
pub use spec::{GridSpec, MAX_DIM};
