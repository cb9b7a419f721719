//! Scenario files: JSON with a fixed schema. Unknown keys are rejected;
//! omitted optional keys take documented defaults, which are listed in the
//! resolved scenario.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coupling::SolverConfig;
use crate::error::{Error, Result};
use crate::grid::io::FieldDump;
use crate::grid::{GridSpec, MultiField, ScalarField};
use crate::model::{check_gates, DriftOffset, GateReport, ModelConstants};
use crate::pde::StepScheme;

/// What to do when a parameter gate fails at load time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateMode {
    Strict,
    Warn,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    model: RawModel,
    grid: RawGrid,
    initial: Option<RawInitial>,
    solver: Option<RawSolver>,
    output: Option<RawOutput>,
    verify: Option<RawVerify>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawModel {
    id: String,
    N: usize,
    M: Option<usize>,
    r: Option<f64>,
    s: Option<f64>,
    s0: Option<f64>,
    alpha: Option<f64>,
    K: Option<f64>,
    C0: Option<f64>,
    C1: Option<f64>,
    gamma: Option<f64>,
    K_bound: Option<f64>,
    B: Option<Vec<Vec<f64>>>,
    A: Option<Vec<Vec<f64>>>,
    b0: Option<RawOffset>,
    params: Option<serde_json::Map<String, serde_json::Value>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawOffset {
    Named(String),
    Polynomial(RawPolynomial),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolynomial {
    polynomial: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawGrid {
    d: usize,
    n: usize,
    T: Option<f64>,
    nt: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawInitial {
    m0: Option<FieldInit>,
    u_T: Option<TerminalInit>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum TerminalInit {
    Shared(FieldInit),
    PerPlayer(Vec<FieldInit>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    theta: Option<f64>,
    picard_tol: Option<f64>,
    max_picard: Option<usize>,
    newton_tol: Option<f64>,
    max_newton: Option<usize>,
    seed: Option<u64>,
    explicit_diffusion: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<String>,
    formats: Option<Vec<OutputFormat>>,
    diagnostics: Option<Vec<DiagnosticKind>>,
    samples: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    step: Option<f64>,
    oracle_steps: Option<Vec<f64>>,
}

/// Initial or terminal profile of one scalar field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldInit {
    Constant(f64),
    Sine(SineProfile),
    /// Binary field dump, resolved relative to the scenario file.
    File(PathBuf),
}

/// `offset + amplitude * sin(2 pi frequency x_axis + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SineProfile {
    pub amplitude: f64,
    pub offset: Option<f64>,
    #[serde(default)]
    pub axis: usize,
    #[serde(default)]
    pub phase: f64,
    #[serde(default = "one")]
    pub frequency: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Binary,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Estimate,
    Lemma,
}

/// Model section after defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub id: String,
    pub constants: ModelConstants,
    /// `N` rows of length `N*M`.
    pub linear: Vec<Vec<f64>>,
    /// `N` row-major `d x M` matrices.
    pub matrices: Vec<Vec<f64>>,
    pub offset: DriftOffset,
    pub params: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSpec {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub diagnostics: Vec<DiagnosticKind>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySpec {
    pub step: f64,
    pub oracle_steps: Vec<f64>,
}

/// A validated scenario with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub model: ModelSpec,
    pub grid: GridSpec,
    pub m0: FieldInit,
    pub u_t: Vec<FieldInit>,
    pub solver: SolverConfig,
    pub output: OutputSpec,
    pub verify: VerifySpec,
    /// Dotted names of keys that were absent and took their default.
    pub defaults_applied: Vec<String>,
    pub gate_mode: GateMode,
    pub gates: GateReport,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

struct Defaults(Vec<String>);

impl Defaults {
    fn take<T>(&mut self, name: &str, value: Option<T>, default: T) -> T {
        value.unwrap_or_else(|| {
            self.0.push(name.to_string());
            default
        })
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Reads and validates a scenario file.
pub fn parse_config(path: &Path, mode: GateMode) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config_str(&text, &base_dir, mode)
}

/// Parses scenario text; relative file references resolve against `base_dir`.
pub fn parse_config_str(text: &str, base_dir: &Path, mode: GateMode) -> Result<Scenario> {
    let raw: RawScenario = serde_json::from_str(text).map_err(|e| config_err(format!("schema error: {e}")))?;
    let mut defaults = Defaults(Vec::new());

    let grid_raw = raw.grid;
    let horizon = defaults.take("grid.T", grid_raw.T, 1.0);
    let steps = defaults.take("grid.nt", grid_raw.nt, 2 * grid_raw.n);
    let grid = GridSpec::new(grid_raw.d, grid_raw.n, horizon, steps).map_err(|e| config_err(e.to_string()))?;

    let model = resolve_model(raw.model, grid.dim, &mut defaults)?;
    let n_players = model.constants.players;

    let initial = raw.initial.unwrap_or(RawInitial { m0: None, u_T: None });
    let m0 = defaults.take("initial.m0", initial.m0, FieldInit::Constant(1.0));
    let u_t = match defaults.take("initial.u_T", initial.u_T, TerminalInit::Shared(FieldInit::Constant(0.0))) {
        TerminalInit::Shared(f) => vec![f; n_players],
        TerminalInit::PerPlayer(list) => {
            if list.len() != n_players {
                return Err(config_err(format!("initial.u_T needs {n_players} entries, got {}", list.len())));
            }
            list
        }
    };
    for f in std::iter::once(&m0).chain(&u_t) {
        check_init(f, &grid, base_dir)?;
    }

    let solver_raw = raw.solver.unwrap_or(RawSolver {
        theta: None,
        picard_tol: None,
        max_picard: None,
        newton_tol: None,
        max_newton: None,
        seed: None,
        explicit_diffusion: None,
    });
    let base = SolverConfig::default();
    let explicit = defaults.take("solver.explicit_diffusion", solver_raw.explicit_diffusion, false);
    let solver = SolverConfig {
        theta: defaults.take("solver.theta", solver_raw.theta, base.theta),
        picard_tol: defaults.take("solver.picard_tol", solver_raw.picard_tol, base.picard_tol),
        max_picard: defaults.take("solver.max_picard", solver_raw.max_picard, base.max_picard),
        newton_tol: defaults.take("solver.newton_tol", solver_raw.newton_tol, base.newton_tol),
        max_newton: defaults.take("solver.max_newton", solver_raw.max_newton, base.max_newton),
        seed: defaults.take("solver.seed", solver_raw.seed, base.seed),
        strict_gates: mode == GateMode::Strict,
        scheme: if explicit { StepScheme::explicit() } else { StepScheme::implicit() },
    };
    solver.validate()?;

    let out_raw = raw.output.unwrap_or(RawOutput { directory: None, formats: None, diagnostics: None, samples: None });
    let output = OutputSpec {
        directory: PathBuf::from(defaults.take("output.directory", out_raw.directory, "mfgb-out".to_string())),
        formats: defaults.take("output.formats", out_raw.formats, vec![OutputFormat::Binary, OutputFormat::Csv]),
        diagnostics: defaults.take(
            "output.diagnostics",
            out_raw.diagnostics,
            vec![DiagnosticKind::Estimate, DiagnosticKind::Lemma],
        ),
        samples: defaults.take("output.samples", out_raw.samples, 10_000),
    };
    if output.samples == 0 {
        return Err(config_err("output.samples must be positive"));
    }

    let ver_raw = raw.verify.unwrap_or(RawVerify { step: None, oracle_steps: None });
    let verify = VerifySpec {
        step: defaults.take("verify.step", ver_raw.step, 1e-3),
        oracle_steps: defaults.take("verify.oracle_steps", ver_raw.oracle_steps, vec![1e-2, 1e-3]),
    };
    let positive = |s: f64| s.is_finite() && s > 0.0;
    if !positive(verify.step) || !verify.oracle_steps.iter().all(|s| positive(*s)) {
        return Err(config_err("verification steps must be positive"));
    }

    let gates = check_gates(&model.constants, model.id == "prototype");
    for g in gates.failures() {
        let msg = format!("{}: {}", g.id.label(), g.detail);
        match mode {
            GateMode::Strict => return Err(Error::Gate(msg)),
            GateMode::Warn => log::warn!("gate failed: {msg}"),
        }
    }

    Ok(Scenario {
        model,
        grid,
        m0,
        u_t,
        solver,
        output,
        verify,
        defaults_applied: defaults.0,
        gate_mode: mode,
        gates,
        base_dir: base_dir.to_path_buf(),
    })
}

fn resolve_model(raw: RawModel, dim: usize, defaults: &mut Defaults) -> Result<ModelSpec> {
    let mut c = ModelConstants::new(raw.N, 1, dim);
    c.control_dim = defaults.take("model.M", raw.M, dim);
    c.r = defaults.take("model.r", raw.r, c.r);
    c.s = defaults.take("model.s", raw.s, c.s);
    c.s0 = defaults.take("model.s0", raw.s0, c.s0);
    c.alpha = defaults.take("model.alpha", raw.alpha, c.alpha);
    c.k = defaults.take("model.K", raw.K, c.k);
    c.c0 = defaults.take("model.C0", raw.C0, c.c0);
    c.c1 = defaults.take("model.C1", raw.C1, c.c1);
    c.gamma = defaults.take("model.gamma", raw.gamma, c.gamma);
    c.k_bound = raw.K_bound;
    c.validate().map_err(|e| config_err(e.to_string()))?;

    let (n, m) = (c.players, c.control_dim);
    let linear = defaults.take("model.B", raw.B, vec![vec![0.0; n * m]; n]);
    if linear.len() != n || linear.iter().any(|row| row.len() != n * m) {
        return Err(config_err(format!("model.B must be {n} rows of {} entries", n * m)));
    }
    let eye: Vec<f64> = (0..dim * m).map(|p| if p / m == p % m { 1.0 } else { 0.0 }).collect();
    let matrices = defaults.take("model.A", raw.A, vec![eye; n]);
    if matrices.len() != n || matrices.iter().any(|a| a.len() != dim * m) {
        return Err(config_err(format!("model.A must be {n} row-major {dim}x{m} matrices")));
    }
    let offset = match defaults.take("model.b0", raw.b0, RawOffset::Named("zero".into())) {
        RawOffset::Named(name) if name == "zero" => DriftOffset::Zero,
        RawOffset::Named(other) => return Err(config_err(format!("model.b0: unknown choice {other:?}"))),
        RawOffset::Polynomial(p) => {
            if p.polynomial.len() != dim {
                return Err(config_err(format!("model.b0.polynomial needs {dim} coefficient lists")));
            }
            DriftOffset::Polynomial(p.polynomial)
        }
    };
    let params = raw.params.unwrap_or_default();
    Ok(ModelSpec { id: raw.id, constants: c, linear, matrices, offset, params })
}

fn check_init(f: &FieldInit, grid: &GridSpec, base_dir: &Path) -> Result<()> {
    match f {
        FieldInit::Constant(c) if !c.is_finite() => Err(config_err("constant profile must be finite")),
        FieldInit::Sine(s) if s.axis >= grid.dim => {
            Err(config_err(format!("sine axis {} out of range for d = {}", s.axis, grid.dim)))
        }
        FieldInit::File(p) => {
            let full = base_dir.join(p);
            if full.is_file() {
                Ok(())
            } else {
                Err(config_err(format!("referenced file {} does not exist", full.display())))
            }
        }
        _ => Ok(()),
    }
}

fn build_field(f: &FieldInit, grid: &GridSpec, base_dir: &Path, default_offset: f64) -> Result<ScalarField> {
    match f {
        FieldInit::Constant(c) => Ok(ScalarField::constant(*grid, *c)),
        FieldInit::Sine(s) => {
            let offset = s.offset.unwrap_or(default_offset);
            Ok(ScalarField::from_fn(*grid, |x| {
                offset + s.amplitude * (2.0 * std::f64::consts::PI * s.frequency * x[s.axis] + s.phase).sin()
            }))
        }
        FieldInit::File(p) => {
            let file = fs::File::open(base_dir.join(p))?;
            FieldDump::read_from(std::io::BufReader::new(file))?.into_scalar(*grid)
        }
    }
}

impl Scenario {
    /// Initial density; sine profiles default to offset one.
    pub fn initial_density(&self) -> Result<ScalarField> {
        let m0 = build_field(&self.m0, &self.grid, &self.base_dir, 1.0)?;
        if m0.min() < 0.0 {
            return Err(config_err(format!("initial density is negative (min {})", m0.min())));
        }
        Ok(m0)
    }

    /// Terminal values; sine profiles default to offset zero.
    pub fn terminal_values(&self) -> Result<MultiField> {
        let comps = self
            .u_t
            .iter()
            .map(|f| build_field(f, &self.grid, &self.base_dir, 0.0))
            .collect::<Result<Vec<_>>>()?;
        MultiField::new(comps)
    }
}
