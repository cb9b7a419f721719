//! Plug a user-defined game into the scenario runner.
//!
//! The model has a spatially varying control matrix `A(x) = 1 + 0.5 cos(2 pi x)`
//! and no closed-form feedback, so the Newton path is used.

use std::f64::consts::PI;

use mfgb::cli::{parse_config_str, run_scenario, Command, GateMode, ModelRegistry};
use mfgb::model::{GameModel, ModelConstants, PayoffEval};

struct Modulated {
    constants: ModelConstants,
}

impl GameModel for Modulated {
    fn name(&self) -> &str {
        "modulated"
    }

    fn constants(&self) -> &ModelConstants {
        &self.constants
    }

    fn payoff(&self, _t: f64, _x: &[f64], m: f64, v: &[f64]) -> PayoffEval {
        let w = 1.0 + m;
        PayoffEval {
            f: v.iter().map(|vi| w * vi * vi + 0.1 * vi.powi(4) + 1.0).collect(),
            f_v: v.iter().map(|vi| 2.0 * w * vi + 0.4 * vi.powi(3)).collect(),
            f_m: v.iter().map(|vi| vi * vi).collect(),
        }
    }

    fn b1(&self, _m: f64) -> f64 {
        1.0
    }

    fn b1_dm(&self, _m: f64) -> f64 {
        0.0
    }

    fn control_matrix(&self, _player: usize, _t: f64, x: &[f64], out: &mut [f64]) {
        out[0] = 1.0 + 0.5 * (2.0 * PI * x[0]).cos();
    }
}

fn main() -> mfgb::error::Result<()> {
    let mut registry = ModelRegistry::with_builtins();
    registry.register("modulated", |spec| Ok(Box::new(Modulated { constants: spec.constants.clone() })));

    let text = r#"{
        "model": { "id": "modulated", "N": 2 },
        "grid": { "d": 1, "n": 48, "nt": 96 },
        "initial": { "m0": { "sine": { "amplitude": 0.5 } }, "u_T": { "sine": { "amplitude": 0.3 } } },
        "output": { "samples": 2000 }
    }"#;
    let scenario = parse_config_str(text, std::path::Path::new("."), GateMode::Warn)?;
    let out = std::env::temp_dir().join("mfgb-custom");
    for command in [Command::Solve, Command::Diagnose] {
        let outcome = run_scenario(&scenario, command, &registry, &out);
        println!("{:?}: exit {} - {}", command, outcome.exit_code, outcome.message);
    }
    println!("{}", std::fs::read_to_string(out.join("report.txt"))?);
    Ok(())
}
