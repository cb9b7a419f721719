//! Game data `(f, g)`, structural constants, parameter gates and the
//! randomised assumption sampler.

mod assumptions;
mod constants;
mod game;
mod gates;
mod prototype;

pub use assumptions::{
    sample_assumptions, AssumptionEntry, AssumptionId, AssumptionReport, SamplePoint, SamplerConfig,
    HESSIAN_STEP, HESSIAN_TOLERANCE, STABILITY_FACTOR,
};
pub use constants::ModelConstants;
pub use game::{density_weighted, eval_drift, eval_model, projected_gradients, DriftEval, GameModel, PayoffEval};
pub(crate) use game::drift_velocity;
pub use gates::{check_gates, exponent_ratios, GateEntry, GateId, GateReport};
pub use prototype::{DriftOffset, PrototypeModel, QuarticModel};
pub(crate) use prototype::pow0;
