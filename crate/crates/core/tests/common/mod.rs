#![allow(dead_code)]

use std::f64::consts::PI;

use mfgb::coupling::{picard_solve, SolutionState, SolverConfig};
use mfgb::grid::{FieldTrajectory, GridSpec, MultiField, ScalarField};
use mfgb::model::{GameModel, ModelConstants, PayoffEval, PrototypeModel};

/// Reference coupled setting: d = 1, N = 2, M = 1, r = 1, s = s0 = 0, K = 1.
pub struct Reference {
    pub grid: GridSpec,
    pub model: PrototypeModel,
    pub m0: ScalarField,
    pub u_t: MultiField,
}

pub fn reference(n: usize, steps: usize) -> Reference {
    let grid = GridSpec::new(1, n, 1.0, steps).unwrap();
    let model = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1)).unwrap();
    Reference { grid, model, m0: bumped_density(grid), u_t: reference_terminal(grid) }
}

/// Same data with `A = 0`, so controls never enter the drift.
pub fn decoupled(n: usize, steps: usize) -> Reference {
    let mut r = reference(n, steps);
    r.model = r.model.with_matrices(vec![vec![0.0]; 2]).unwrap();
    r
}

pub fn bumped_density(grid: GridSpec) -> ScalarField {
    ScalarField::from_fn(grid, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin())
}

pub fn reference_terminal(grid: GridSpec) -> MultiField {
    MultiField::new(vec![
        ScalarField::from_fn(grid, |x| 0.2 * (2.0 * PI * x[0]).cos()),
        ScalarField::from_fn(grid, |x| -0.1 * (2.0 * PI * x[0]).sin()),
    ])
    .unwrap()
}

impl Reference {
    pub fn solve(&self, tol: f64) -> SolutionState {
        let cfg = SolverConfig { picard_tol: tol, ..Default::default() };
        picard_solve(&self.model, &self.m0, &self.u_t, &cfg).unwrap()
    }
}

/// `z(t, x) = sin(2 pi x) cos(pi t)` in one control component.
pub fn wave_direction(grid: GridSpec) -> FieldTrajectory {
    let slices = (0..=grid.steps)
        .map(|k| {
            let t = grid.time(k);
            MultiField::new(vec![ScalarField::from_fn(grid, |x| (2.0 * PI * x[0]).sin() * (PI * t).cos())]).unwrap()
        })
        .collect();
    FieldTrajectory::new(grid, slices).unwrap()
}

/// `f = 0`, `g = 0`.
pub struct Degenerate {
    pub constants: ModelConstants,
}

impl Degenerate {
    pub fn new(players: usize, dim: usize) -> Self {
        Self { constants: ModelConstants::new(players, 1, dim) }
    }
}

impl GameModel for Degenerate {
    fn constants(&self) -> &ModelConstants {
        &self.constants
    }

    fn payoff(&self, _t: f64, _x: &[f64], _m: f64, v: &[f64]) -> PayoffEval {
        let n = self.constants.players;
        PayoffEval { f: vec![0.0; n], f_v: vec![0.0; v.len()], f_m: vec![0.0; n] }
    }

    fn b1(&self, _m: f64) -> f64 {
        0.0
    }

    fn b1_dm(&self, _m: f64) -> f64 {
        0.0
    }

    fn control_matrix(&self, _player: usize, _t: f64, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// Prototype pay-offs with the drift factor `b1(m) = e^m`, which grows
/// faster than any power of `m`.
pub struct ExponentialDrift(pub PrototypeModel);

impl GameModel for ExponentialDrift {
    fn constants(&self) -> &ModelConstants {
        self.0.constants()
    }

    fn payoff(&self, t: f64, x: &[f64], m: f64, v: &[f64]) -> PayoffEval {
        self.0.payoff(t, x, m, v)
    }

    fn b1(&self, m: f64) -> f64 {
        m.exp()
    }

    fn b1_dm(&self, m: f64) -> f64 {
        m.exp()
    }

    fn control_matrix(&self, player: usize, t: f64, x: &[f64], out: &mut [f64]) {
        self.0.control_matrix(player, t, x, out)
    }
}

/// Scalar prototype pay-off written out independently of the library, for
/// one player with a scalar control and no linear term.
pub fn scalar_prototype(r: f64, k: f64, s0: f64, m: f64, v: f64) -> f64 {
    let density_term = if s0 == 0.0 { 1.0 } else { m.powf(2.0 * s0) };
    (1.0 + m).powf(r) * v * v + k * (1.0 + density_term)
}

/// Fourth-order central difference.
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// Relative `L^2` error at time `t` of the forward solver with `g = 0`
/// against `offset + amp e^{-4 pi^2 t} sin(2 pi x)`.
pub fn heat_forward_error(n: usize, steps: usize, t: f64, offset: f64, amp: f64) -> f64 {
    use mfgb::pde::solve_forward;
    let grid = GridSpec::new(1, n, t, steps).unwrap();
    let model = Degenerate::new(1, 1);
    let m0 = ScalarField::from_fn(grid, |x| offset + amp * (2.0 * PI * x[0]).sin());
    let m = solve_forward(&model, &FieldTrajectory::zeros(grid, 1), &m0).unwrap();
    heat_gap(grid, m.last(), t, offset, amp)
}

/// Same for the backward solver with `L = 0`, comparing `u(0)` with the
/// terminal profile decayed over the horizon `t`.
pub fn heat_backward_error(n: usize, steps: usize, t: f64, offset: f64, amp: f64) -> f64 {
    use mfgb::grid::DensityTrajectory;
    use mfgb::pde::solve_backward;
    let grid = GridSpec::new(1, n, t, steps).unwrap();
    let model = Degenerate::new(1, 1);
    let u_t = MultiField::new(vec![ScalarField::from_fn(grid, |x| offset + amp * (2.0 * PI * x[0]).sin())]).unwrap();
    let m = DensityTrajectory::constant(grid, 1.0);
    let u = solve_backward(&model, &m, &FieldTrajectory::zeros(grid, 1), &u_t).unwrap();
    heat_gap(grid, u.slice(0).component(0), t, offset, amp)
}

fn heat_gap(grid: GridSpec, f: &ScalarField, t: f64, offset: f64, amp: f64) -> f64 {
    let decay = (-4.0 * PI * PI * t).exp();
    let exact = ScalarField::from_fn(grid, |x| offset + amp * decay * (2.0 * PI * x[0]).sin());
    rel_l2(f.values(), exact.values())
}

pub fn order(coarse: f64, fine: f64, ratio: f64) -> f64 {
    (coarse / fine).ln() / ratio.ln()
}
