//! Drive the four commands from a scenario file, as the binary does.
//!
//!     cargo run --example run_scenario -- scenarios/reference.json

use std::path::PathBuf;

use mfgb::cli::{parse_config, run_scenario, Command, GateMode, ModelRegistry};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/reference.json"));
    let scenario = match parse_config(&path, GateMode::Warn) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let registry = ModelRegistry::with_builtins();
    let root = std::env::temp_dir().join("mfgb-run");
    for command in [Command::Check, Command::Solve, Command::Verify, Command::Diagnose] {
        let dir = root.join(command.label());
        let outcome = run_scenario(&scenario, command, &registry, &dir);
        println!("{:<8} exit {}  {}  ({} files)", command.label(), outcome.exit_code, outcome.message, outcome.artifacts.len());
    }
    println!("artifacts under {}", root.display());
}
