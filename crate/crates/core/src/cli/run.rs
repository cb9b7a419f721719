use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::registry::ModelRegistry;
use super::scenario::{DiagnosticKind, OutputFormat, Scenario};
use crate::coupling::{picard_solve, write_history_csv, HistoryRow, SolutionState};
use crate::error::{Error, Result};
use crate::grid::io::{write_csv, FieldDump};
use crate::model::{sample_assumptions, GameModel, SamplerConfig};
use crate::verify::{
    gateaux_check, lemma_sample, linearized_oracle, observed_orders, run_diagnostics, smooth_direction, LemmaConfig,
    LemmaSource,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Check,
    Solve,
    Verify,
    Diagnose,
}

impl Command {
    pub fn label(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Solve => "solve",
            Command::Verify => "verify",
            Command::Diagnose => "diagnose",
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Exit code of a failed run: solver failures map to 1, everything else
/// (configuration, schema, gates, I/O) to 2.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::PicardNotConverged(_) | Error::Newton { .. } | Error::LinearSolver { .. } | Error::Unstable { .. } => {
            EXIT_NOT_CONVERGED
        }
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub message: String,
    /// Files written, relative to the output directory, manifest last.
    pub artifacts: Vec<PathBuf>,
}

struct Artifacts<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Artifacts<'_> {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.written.push(PathBuf::from(name));
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let mut w = self.create(name)?;
        w.write_all(body.as_bytes())?;
        Ok(w.flush()?)
    }
}

#[derive(Serialize)]
struct PicardSummary {
    converged: bool,
    iterations: usize,
    final_residual: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    exit_code: i32,
    message: &'a str,
    scenario: &'a Scenario,
    stability: crate::pde::StabilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    picard: Option<PicardSummary>,
    artifacts: Vec<String>,
}

/// Runs `command` on `scenario`, writing artifacts into `out_dir`.
/// A manifest is written in every case, including failures.
pub fn run_scenario(scenario: &Scenario, command: Command, registry: &ModelRegistry, out_dir: &Path) -> RunOutcome {
    let mut arts = Artifacts { dir: out_dir, written: Vec::new() };
    let mut picard = None;
    let result = fs::create_dir_all(out_dir)
        .map_err(Error::from)
        .and_then(|_| registry.build(&scenario.model))
        .and_then(|model| execute(scenario, command, model.as_ref(), &mut arts, &mut picard));
    let (exit_code, message) = match result {
        Ok(msg) => (EXIT_OK, msg),
        Err(e) => {
            if let Error::PicardNotConverged(f) = &e {
                let _ = arts.create("history.csv").and_then(|w| write_history_csv(w, &f.history));
                let summary = format!("{e}\n");
                let _ = arts.text("report.txt", &summary);
            }
            (exit_code_for(&e), e.to_string())
        }
    };

    let mut artifacts: Vec<PathBuf> = Vec::new();
    for a in arts.written {
        if !artifacts.contains(&a) {
            artifacts.push(a);
        }
    }
    let manifest = Manifest {
        command: command.label(),
        exit_code,
        message: &message,
        scenario,
        stability: scenario.solver.scheme.report(&scenario.grid),
        picard,
        artifacts: artifacts.iter().map(|p| p.display().to_string()).collect(),
    };
    let written = fs::create_dir_all(out_dir).is_ok()
        && serde_json::to_string_pretty(&manifest)
            .ok()
            .and_then(|s| fs::write(out_dir.join("manifest.json"), s + "\n").ok())
            .is_some();
    if written {
        artifacts.push(PathBuf::from("manifest.json"));
    }
    RunOutcome { exit_code, message, artifacts }
}

fn solve_state(
    scenario: &Scenario,
    model: &dyn GameModel,
    arts: &mut Artifacts<'_>,
    picard: &mut Option<PicardSummary>,
) -> Result<SolutionState> {
    let m0 = scenario.initial_density()?;
    let u_t = scenario.terminal_values()?;
    let outcome = picard_solve(model, &m0, &u_t, &scenario.solver);
    let history: &[HistoryRow] = match &outcome {
        Ok(s) => &s.history,
        Err(Error::PicardNotConverged(f)) => &f.history,
        Err(_) => &[],
    };
    *picard = Some(PicardSummary {
        converged: outcome.is_ok(),
        iterations: history.len(),
        final_residual: history.last().map_or(f64::NAN, |h| h.residual),
    });
    let state = outcome?;
    write_history_csv(arts.create("history.csv")?, &state.history)?;
    Ok(state)
}

fn execute(
    scenario: &Scenario,
    command: Command,
    model: &dyn GameModel,
    arts: &mut Artifacts<'_>,
    picard: &mut Option<PicardSummary>,
) -> Result<String> {
    let mut report = String::new();
    writeln!(report, "command: {}", command.label()).ok();
    writeln!(report, "model: {} (N = {}, d = {})", scenario.model.id, model.constants().players, scenario.grid.dim).ok();
    writeln!(report, "sigma = {}", scenario.gates.sigma).ok();
    for g in &scenario.gates.entries {
        writeln!(report, "gate {:<16} {} ({})", g.id.label(), if g.passed { "pass" } else { "FAIL" }, g.detail).ok();
    }
    if !scenario.defaults_applied.is_empty() {
        writeln!(report, "defaults applied: {}", scenario.defaults_applied.join(", ")).ok();
    }

    let summary = match command {
        Command::Check => {
            let cfg = SamplerConfig { samples: scenario.output.samples, seed: scenario.solver.seed, ..Default::default() };
            let rep = sample_assumptions(model, &cfg);
            writeln!(report, "assumptions ({} samples, seed {})", rep.samples, rep.seed).ok();
            for e in &rep.entries {
                writeln!(
                    report,
                    "  {:<22} {} fitted {:.6e}{}",
                    e.id.label(),
                    if e.passed { "pass" } else { "FAIL" },
                    e.fitted,
                    e.declared.map_or(String::new(), |d| format!(" (declared {d})")),
                )
                .ok();
            }
            serde_json::to_writer_pretty(arts.create("assumptions.json")?, &rep)?;
            let failed = rep.entries.iter().filter(|e| !e.passed).count();
            format!("check finished: {} gates failed, {failed} assumptions failed", scenario.gates.failures().count())
        }
        Command::Solve => {
            let state = solve_state(scenario, model, arts, picard)?;
            let formats = &scenario.output.formats;
            if formats.contains(&OutputFormat::Binary) {
                FieldDump::from_density_trajectory(&state.m).write_to(arts.create("m.mfgb")?)?;
                FieldDump::from_field_trajectory(&state.u).write_to(arts.create("u.mfgb")?)?;
                FieldDump::from_field_trajectory(&state.v).write_to(arts.create("v.mfgb")?)?;
            }
            if formats.contains(&OutputFormat::Csv) {
                write_csv(arts.create("m_final.csv")?, &scenario.grid, &[state.m.last().values()])?;
                let u0: Vec<&[f64]> = state.u.slice(0).components().iter().map(|c| c.values()).collect();
                write_csv(arts.create("u_initial.csv")?, &scenario.grid, &u0)?;
            }
            writeln!(report, "picard converged in {} iterations, residual {:.6e}", state.iterations(), state.last_residual()).ok();
            format!("solve converged in {} iterations", state.iterations())
        }
        Command::Verify => {
            let state = solve_state(scenario, model, arts, picard)?;
            let c = model.constants();
            let z = smooth_direction(&scenario.grid, c.control_dim);
            let dirs: Vec<_> = (0..c.players).map(|i| (i, z.clone())).collect();
            let est = gateaux_check(model, &state, &dirs, scenario.verify.step)?;
            let mut w = arts.create("gateaux.csv")?;
            writeln!(w, "player,step,derivative,scale,normalized")?;
            for e in &est {
                writeln!(w, "{},{:e},{:e},{:e},{:e}", e.player, e.step, e.derivative, e.scale, e.normalized)?;
                writeln!(report, "gateaux player {}: dJ/ds = {:.6e}, normalized {:.6e}", e.player, e.derivative, e.normalized).ok();
            }
            w.flush()?;
            let errs = linearized_oracle(model, &state, 0, &z, &scenario.verify.oracle_steps)?;
            let mut w = arts.create("linearized.csv")?;
            writeln!(w, "step,relative_error")?;
            for (s, e) in &errs {
                writeln!(w, "{s:e},{e:e}")?;
                writeln!(report, "linearized density, s = {s:e}: relative L2 gap {e:.6e}").ok();
            }
            w.flush()?;
            for o in observed_orders(&errs) {
                writeln!(report, "linearized density observed order {o:.4}").ok();
            }
            "verify finished".to_string()
        }
        Command::Diagnose => {
            let state = solve_state(scenario, model, arts, picard)?;
            let mut diag = run_diagnostics(model, &state);
            if scenario.output.diagnostics.contains(&DiagnosticKind::Lemma) {
                let cfg = LemmaConfig { samples: scenario.output.samples, seed: scenario.solver.seed, eps0: None };
                diag.lemma = Some(lemma_sample(model, LemmaSource::State(&state), &cfg)?);
            }
            if scenario.output.diagnostics.contains(&DiagnosticKind::Estimate) || diag.lemma.is_some() {
                diag.write_csv(arts.create("diagnostics.csv")?)?;
            }
            let mut text = Vec::new();
            diag.write_text(&mut text)?;
            report.push_str(&String::from_utf8_lossy(&text));
            "diagnose finished".to_string()
        }
    };
    writeln!(report, "{summary}").ok();
    arts.text("report.txt", &report)?;
    Ok(summary)
}
