use rayon::prelude::*;

use crate::coupling::SolutionState;
use crate::error::{Error, Result};
use crate::grid::{div_upwind_tangent, laplacian, DensityTrajectory, FieldTrajectory, MultiField, ScalarField};
use crate::model::GameModel;
use crate::pde::{drift_field, node_major, solve_helmholtz, StepScheme};

/// Density sensitivity `M^i` to a perturbation of player `i`'s control.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedDensity {
    pub player: usize,
    pub trajectory: DensityTrajectory,
}

/// Embeds a direction for player `i` (`M` components) into the full control space.
pub fn embed_direction(model: &dyn GameModel, player: usize, z: &FieldTrajectory) -> Result<FieldTrajectory> {
    let c = model.constants();
    if player >= c.players {
        return Err(Error::domain(format!("player {player} out of range")));
    }
    if z.components() != c.control_dim {
        return Err(Error::shape(format!("direction needs {} components, got {}", c.control_dim, z.components())));
    }
    let grid = *z.grid();
    let slices = z
        .slices()
        .iter()
        .map(|zk| {
            let mut full = MultiField::zeros(grid, c.control_len());
            for j in 0..c.control_dim {
                *full.component_mut(player * c.control_dim + j) = zk.component(j).clone();
            }
            full
        })
        .collect();
    FieldTrajectory::new(grid, slices)
}

/// Tangent of the drift at `(m, v)` in direction `(dm, dv)`:
/// `g_m dm + sum_j g_{v^j} dv^j`.
fn drift_tangent(model: &dyn GameModel, t: f64, m: &ScalarField, v: &MultiField, dm: &ScalarField, dv: &MultiField) -> MultiField {
    let grid = *m.grid();
    let c = model.constants();
    let (d, mm, nm) = (grid.dim, c.control_dim, c.control_len());
    let vs = node_major(v);
    let dvs = node_major(dv);
    let data: Vec<f64> = (0..grid.nodes())
        .into_par_iter()
        .flat_map_iter(|p| {
            let x = grid.coords(p);
            let mp = m[p].max(0.0);
            let (b1, b1_dm) = (model.b1(mp), model.b1_dm(mp));
            let mut out = vec![0.0; d];
            model.b0_dm(mp, &mut out);
            out.iter_mut().for_each(|o| *o *= dm[p]);
            let mut a = vec![0.0; d * mm];
            let vp = &vs[p * nm..(p + 1) * nm];
            let dvp = &dvs[p * nm..(p + 1) * nm];
            for j in 0..c.players {
                model.control_matrix(j, t, &x[..d], &mut a);
                for k in 0..d {
                    for l in 0..mm {
                        let akl = a[k * mm + l];
                        out[k] += b1_dm * dm[p] * akl * vp[j * mm + l] + b1 * akl * dvp[j * mm + l];
                    }
                }
            }
            out
        })
        .collect();
    MultiField::from_node_major(grid, d, &data)
}

/// Solves the linearised density equation
/// `M_t - Lap M = -div(M g + m g_m M + m g_{v^i} z)`, `M(0) = 0`, with the
/// tangent of the forward scheme (same donor cells, same implicit diffusion).
pub fn solve_linearized_fp(
    model: &dyn GameModel,
    state: &SolutionState,
    player: usize,
    z: &FieldTrajectory,
) -> Result<LinearizedDensity> {
    solve_linearized_fp_with(model, state, player, z, StepScheme::default())
}

pub fn solve_linearized_fp_with(
    model: &dyn GameModel,
    state: &SolutionState,
    player: usize,
    z: &FieldTrajectory,
    scheme: StepScheme,
) -> Result<LinearizedDensity> {
    scheme.check(state.m.grid())?;
    let grid = *state.m.grid();
    grid.check_same(z.grid())?;
    let dz = embed_direction(model, player, z)?;
    let dt = grid.dt();
    let mut slices = Vec::with_capacity(grid.steps + 1);
    slices.push(ScalarField::zeros(grid));
    for k in 0..grid.steps {
        let t = grid.time(k);
        let (m_k, v_k) = (state.m.slice(k), state.v.slice(k));
        let big_m = &slices[k];
        let g = drift_field(model, t, m_k, v_k);
        let dg = drift_tangent(model, t, m_k, v_k, big_m, dz.slice(k));
        let rhs = big_m.axpy(-dt, &div_upwind_tangent(m_k, &g, big_m, &dg));
        let next = if scheme.implicit_diffusion {
            ScalarField::from_vec_unchecked(grid, solve_helmholtz(&grid, dt, rhs.values())?)
        } else {
            rhs.axpy(dt, &laplacian(big_m))
        };
        slices.push(next);
    }
    Ok(LinearizedDensity { player, trajectory: DensityTrajectory::new(grid, slices)? })
}

/// Relative `L^2(Q)` gap between the linearised density and the one-sided
/// difference `(m(v + s z^i) - m(v)) / s`, for each step `s`.
pub fn linearized_oracle(
    model: &dyn GameModel,
    state: &SolutionState,
    player: usize,
    z: &FieldTrajectory,
    steps: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let lin = solve_linearized_fp(model, state, player, z)?;
    let dz = embed_direction(model, player, z)?;
    let lin_norm = lin.trajectory.l2_norm();
    steps
        .iter()
        .map(|&s| {
            let perturbed = crate::pde::solve_forward(model, &state.v.axpy(s, &dz), state.m.slice(0))?;
            let quotient = perturbed.axpy(-1.0, &state.m);
            let gap = quotient.axpy(-s, &lin.trajectory).l2_norm() / s;
            Ok((s, if lin_norm > 0.0 { gap / lin_norm } else { gap }))
        })
        .collect()
}

/// Observed orders between successive `(s, error)` pairs.
pub fn observed_orders(errors: &[(f64, f64)]) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect()
}
