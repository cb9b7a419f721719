//! Scenario files, the model registry and the command runner behind the
//! `mfgb` binary.

mod registry;
mod run;
mod scenario;

pub use registry::ModelRegistry;
pub use run::{exit_code_for, run_scenario, Command, RunOutcome, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_OK};
pub use scenario::{
    parse_config, parse_config_str, DiagnosticKind, FieldInit, GateMode, ModelSpec, OutputFormat, OutputSpec, Scenario,
    SineProfile, VerifySpec,
};
