use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use mfgb::cli::{exit_code_for, parse_config, run_scenario, Command, GateMode, ModelRegistry};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Evaluate parameter gates and sample the structural assumptions.
    Check,
    /// Run the Picard iteration and dump the equilibrium.
    Solve,
    /// Gateaux stationarity check and linearized density oracle.
    Verify,
    /// A-priori estimate quantities and inequality constants.
    Diagnose,
}

#[derive(Debug, Parser)]
#[command(name = "mfgb", version, about = "Nash equilibria of multi-population mean-field games")]
struct Args {
    command: Cmd,
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides output.directory from the scenario.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat a failed parameter gate as an error.
    #[arg(long)]
    strict: bool,
    /// Overrides solver.seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let mode = if args.strict { GateMode::Strict } else { GateMode::Warn };
    let mut scenario = match parse_config(&args.config, mode) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("mfgb: {e}");
            return ExitCode::from(exit_code_for(&e) as u8);
        }
    };
    if let Some(seed) = args.seed {
        scenario.solver.seed = seed;
    }
    let out = args.out.unwrap_or_else(|| scenario.output.directory.clone());
    let command = match args.command {
        Cmd::Check => Command::Check,
        Cmd::Solve => Command::Solve,
        Cmd::Verify => Command::Verify,
        Cmd::Diagnose => Command::Diagnose,
    };
    let outcome = run_scenario(&scenario, command, &ModelRegistry::with_builtins(), &out);
    if outcome.exit_code == 0 {
        println!("{}", outcome.message);
    } else {
        eprintln!("mfgb: {}", outcome.message);
    }
    println!("artifacts in {}", out.display());
    ExitCode::from(outcome.exit_code as u8)
}
