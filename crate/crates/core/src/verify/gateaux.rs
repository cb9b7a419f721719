use rayon::prelude::*;
use serde::Serialize;

use super::cost::cost_functional;
use super::linearized::embed_direction;
use crate::coupling::SolutionState;
use crate::error::Result;
use crate::grid::{DensityTrajectory, FieldTrajectory, GridSpec, MultiField, ScalarField};
use crate::model::{projected_gradients, GameModel};
use crate::pde::{node_gradients, node_major, solve_forward};

/// Central-difference estimate of `d/ds J^i(v + s z^i)` at `s = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateauxEstimate {
    pub player: usize,
    pub step: f64,
    pub derivative: f64,
    /// `||z|| (||m f_{v^i}|| + ||m b1 grad u^i A^i|| + ||m||)`, all in `L^2(Q)`.
    pub scale: f64,
    pub normalized: f64,
}

/// `L^2(Q)` norms of `m f_{v^i}` and `m b1 grad u^i A^i` for player `i`.
fn first_order_norms(model: &dyn GameModel, state: &SolutionState, player: usize) -> (f64, f64) {
    let grid = *state.m.grid();
    let c = model.constants();
    let (mm, nm, nd, d) = (c.control_dim, c.control_len(), c.players * grid.dim, grid.dim);
    let weights = grid.time_weights();
    let per_slice: Vec<(f64, f64)> = (0..=grid.steps)
        .into_par_iter()
        .map(|k| {
            let vs = node_major(state.v.slice(k));
            let gs = node_gradients(state.u.slice(k));
            let mut acc = (0.0, 0.0);
            for p in 0..grid.nodes() {
                let x = grid.coords(p);
                let m = state.m.slice(k)[p].max(0.0);
                let t = grid.time(k);
                let f_v = model.payoff(t, &x[..d], m, &vs[p * nm..(p + 1) * nm]).f_v;
                let proj = projected_gradients(model, t, &x[..d], &gs[p * nd..(p + 1) * nd]);
                let b1 = model.b1(m);
                for j in player * mm..(player + 1) * mm {
                    acc.0 += (m * f_v[j]).powi(2);
                    acc.1 += (m * b1 * proj[j]).powi(2);
                }
            }
            acc
        })
        .collect();
    let w = grid.cell_volume();
    let (a, b) = per_slice
        .iter()
        .zip(&weights)
        .fold((0.0, 0.0), |(a, b), ((x, y), wt)| (a + wt * w * x, b + wt * w * y));
    (a.sqrt(), b.sqrt())
}

/// Central differences of each player's cost along the given directions,
/// re-solving the density for both perturbed controls.
pub fn gateaux_check(
    model: &dyn GameModel,
    state: &SolutionState,
    directions: &[(usize, FieldTrajectory)],
    step: f64,
) -> Result<Vec<GateauxEstimate>> {
    let m0 = state.m.slice(0);
    let u_t = state.u.last();
    directions
        .iter()
        .map(|(player, z)| {
            let dz = embed_direction(model, *player, z)?;
            let plus_v = state.v.axpy(step, &dz);
            let minus_v = state.v.axpy(-step, &dz);
            let solve = |v: &FieldTrajectory| -> Result<(DensityTrajectory, Vec<f64>)> {
                let m = solve_forward(model, v, m0)?;
                let j = cost_functional(model, v, &m, u_t)?;
                Ok((m, j))
            };
            let (plus, minus) = rayon::join(|| solve(&plus_v), || solve(&minus_v));
            let (_, jp) = plus?;
            let (_, jm) = minus?;
            let derivative = (jp[*player] - jm[*player]) / (2.0 * step);
            let (fv_norm, proj_norm) = first_order_norms(model, state, *player);
            let scale = z.l2_norm() * (fv_norm + proj_norm + state.m.l2_norm());
            let normalized = if derivative == 0.0 { 0.0 } else { derivative.abs() / scale };
            Ok(GateauxEstimate { player: *player, step, derivative, scale, normalized })
        })
        .collect()
}

/// `z(t, x) = sin(2 pi x_1)` in every control component, constant in time.
pub fn smooth_direction(grid: &GridSpec, control_dim: usize) -> FieldTrajectory {
    let f = ScalarField::from_fn(*grid, |x| (2.0 * std::f64::consts::PI * x[0]).sin());
    let slice = MultiField::new(vec![f; control_dim]).expect("components share the grid");
    FieldTrajectory::new(*grid, vec![slice; grid.steps + 1]).expect("one slice per time node")
}
