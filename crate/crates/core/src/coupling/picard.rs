use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::config::SolverConfig;
use super::feedback::{feedback_residual, feedback_solve};
use crate::error::{Error, Result};
use crate::grid::{DensityTrajectory, FieldTrajectory, MultiField, ScalarField};
use crate::model::{check_gates, GameModel};
use crate::pde::{node_gradients, node_major, solve_backward_with, solve_forward_with};

/// One Picard iteration of the convergence history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoryRow {
    pub iteration: usize,
    /// `L^2(Q)` norm of the compatibility residual at `(v^k, m^k, u^k)`.
    pub residual: f64,
    pub dm_rel: f64,
    pub du_rel: f64,
    pub dv_rel: f64,
}

/// Density, values and controls on the full space-time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionState {
    pub m: DensityTrajectory,
    pub u: FieldTrajectory,
    pub v: FieldTrajectory,
    pub history: Vec<HistoryRow>,
}

impl SolutionState {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    pub fn last_residual(&self) -> f64 {
        self.history.last().map_or(f64::NAN, |h| h.residual)
    }
}

/// Final iterate and history of a Picard run that hit its iteration cap.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardFailure {
    pub history: Vec<HistoryRow>,
    pub state: SolutionState,
}

impl PicardFailure {
    pub fn last_residual(&self) -> f64 {
        self.history.last().map_or(f64::NAN, |h| h.residual)
    }
}

/// `L^2(Q)` and max norms of the compatibility residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualNorms {
    pub l2: f64,
    pub max: f64,
}

fn slice_pairs(steps: usize, nodes: usize) -> impl ParallelIterator<Item = (usize, usize)> {
    (0..(steps + 1) * nodes).into_par_iter().map(move |q| (q / nodes, q % nodes))
}

/// Residual of the compatibility condition over `Q` for the triple `(m, u, v)`.
pub fn compatibility_residual(
    model: &dyn GameModel,
    m: &DensityTrajectory,
    u: &FieldTrajectory,
    v: &FieldTrajectory,
) -> Result<ResidualNorms> {
    let grid = *m.grid();
    let c = model.constants();
    let (nm, nd, d, nodes) = (c.control_len(), c.players * grid.dim, grid.dim, grid.nodes());
    let grads: Vec<Vec<f64>> = u.slices().iter().map(node_gradients).collect();
    let controls: Vec<Vec<f64>> = v.slices().iter().map(node_major).collect();
    let per_node: Vec<(f64, f64)> = slice_pairs(grid.steps, nodes)
        .map(|(k, p)| {
            let x = grid.coords(p);
            let r = feedback_residual(
                model,
                grid.time(k),
                &x[..d],
                m.slice(k)[p].max(0.0),
                &controls[k][p * nm..(p + 1) * nm],
                &grads[k][p * nd..(p + 1) * nd],
            )?;
            Ok((r.iter().map(|x| x * x).sum::<f64>(), r.iter().fold(0.0, |a: f64, x| a.max(x.abs()))))
        })
        .collect::<Result<_>>()?;
    let weights = grid.time_weights();
    let w = grid.cell_volume();
    let mut sq = vec![0.0; grid.steps + 1];
    let mut max: f64 = 0.0;
    for (q, (s, mx)) in per_node.iter().enumerate() {
        sq[q / nodes] += s;
        max = max.max(*mx);
    }
    let l2 = sq.iter().zip(&weights).map(|(s, wt)| wt * w * s).sum::<f64>().sqrt();
    Ok(ResidualNorms { l2, max })
}

/// Pointwise feedback controls for given `(m, u)`.
pub fn best_response(
    model: &dyn GameModel,
    m: &DensityTrajectory,
    u: &FieldTrajectory,
    cfg: &SolverConfig,
) -> Result<FieldTrajectory> {
    let grid = *m.grid();
    let c = model.constants();
    let (nm, nd, d, nodes) = (c.control_len(), c.players * grid.dim, grid.dim, grid.nodes());
    let grads: Vec<Vec<f64>> = u.slices().iter().map(node_gradients).collect();
    let values: Vec<Vec<f64>> = slice_pairs(grid.steps, nodes)
        .map(|(k, p)| {
            let x = grid.coords(p);
            feedback_solve(model, grid.time(k), &x[..d], m.slice(k)[p].max(0.0), &grads[k][p * nd..(p + 1) * nd], cfg)
        })
        .collect::<Result<_>>()?;
    let slices = values
        .chunks(nodes)
        .map(|chunk| MultiField::from_node_major(grid, nm, &chunk.concat()))
        .collect();
    FieldTrajectory::new(grid, slices)
}

/// Damped Picard iteration started from `v = 0`.
pub fn picard_solve(
    model: &dyn GameModel,
    m0: &ScalarField,
    u_t: &MultiField,
    cfg: &SolverConfig,
) -> Result<SolutionState> {
    let v0 = FieldTrajectory::zeros(*m0.grid(), model.constants().control_len());
    picard_solve_from(model, m0, u_t, cfg, v0)
}

/// Damped Picard iteration from an initial control guess.
///
/// Each iteration solves forward for `m^k`, backward for `u^k`, measures the
/// compatibility residual of `(v^k, m^k, u^k)`, computes the best response
/// and relaxes. The iteration stops once the residual and the relative
/// changes of `m`, `u` and `v` are within `picard_tol`; the first iteration
/// has no previous `m`, `u` and is judged on residual and `v` change only.
pub fn picard_solve_from(
    model: &dyn GameModel,
    m0: &ScalarField,
    u_t: &MultiField,
    cfg: &SolverConfig,
    v0: FieldTrajectory,
) -> Result<SolutionState> {
    cfg.validate()?;
    model.constants().validate()?;
    let grid = *m0.grid();
    grid.check_same(v0.grid())?;
    if model.constants().dim != grid.dim {
        return Err(Error::shape(format!("model dimension {} on a {}-d grid", model.constants().dim, grid.dim)));
    }
    let gates = check_gates(model.constants(), model.name() == "prototype");
    for g in gates.failures() {
        if cfg.strict_gates {
            return Err(Error::Gate(format!("{}: {}", g.id.label(), g.detail)));
        }
        log::warn!("gate {} failed: {}", g.id.label(), g.detail);
    }

    let mut v = v0;
    let mut prev: Option<(DensityTrajectory, FieldTrajectory)> = None;
    let mut history = Vec::new();
    for iteration in 1..=cfg.max_picard {
        let m = solve_forward_with(model, &v, m0, cfg.scheme)?;
        let u = solve_backward_with(model, &m, &v, u_t, cfg.scheme)?;
        let residual = compatibility_residual(model, &m, &u, &v)?.l2;
        let best = best_response(model, &m, &u, cfg)?;
        let dv_rel = best.diff_l2(&v) / v.l2_norm().max(1.0);
        let (dm_rel, du_rel) = match &prev {
            Some((pm, pu)) => (m.diff_l2(pm) / pm.l2_norm().max(1.0), u.diff_l2(pu) / pu.l2_norm().max(1.0)),
            None => (0.0, 0.0),
        };
        history.push(HistoryRow { iteration, residual, dm_rel, du_rel, dv_rel });
        log::debug!("picard {iteration}: residual {residual:.3e}, dm {dm_rel:.3e}, du {du_rel:.3e}, dv {dv_rel:.3e}");

        let tol = cfg.picard_tol;
        if residual <= tol && dv_rel <= tol && dm_rel <= tol && du_rel <= tol {
            return Ok(SolutionState { m, u, v, history });
        }
        if iteration == cfg.max_picard {
            let state = SolutionState { m, u, v, history: history.clone() };
            return Err(Error::PicardNotConverged(Box::new(PicardFailure { history, state })));
        }
        v = v.relax(cfg.theta, &best);
        prev = Some((m, u));
    }
    unreachable!("loop returns on its last iteration")
}

pub const HISTORY_HEADER: &str = "iteration,residual_L2,dm_rel,du_rel,dv_rel";

pub fn write_history_csv<W: Write>(mut w: W, history: &[HistoryRow]) -> Result<()> {
    writeln!(w, "{HISTORY_HEADER}")?;
    for h in history {
        writeln!(w, "{},{:e},{:e},{:e},{:e}", h.iteration, h.residual, h.dm_rel, h.du_rel, h.dv_rel)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::model::{ModelConstants, PrototypeModel};
    use std::f64::consts::PI;

    fn coupled(n: usize, steps: usize) -> (PrototypeModel, ScalarField, MultiField) {
        let grid = GridSpec::new(1, n, 0.5, steps).unwrap();
        let p = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1)).unwrap();
        let m0 = ScalarField::from_fn(grid, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin());
        let u_t = MultiField::new(vec![
            ScalarField::from_fn(grid, |x| 0.2 * (2.0 * PI * x[0]).cos()),
            ScalarField::from_fn(grid, |x| -0.1 * (2.0 * PI * x[0]).sin()),
        ])
        .unwrap();
        (p, m0, u_t)
    }

    #[test]
    fn coupled_run_converges_with_small_residual() {
        let (p, m0, u_t) = coupled(16, 16);
        let cfg = SolverConfig::default();
        let s = picard_solve(&p, &m0, &u_t, &cfg).unwrap();
        let r = compatibility_residual(&p, &s.m, &s.u, &s.v).unwrap();
        assert!(r.l2 <= cfg.picard_tol && r.max <= 10.0 * cfg.picard_tol, "{r:?}");
    }

    #[test]
    fn cap_reached_keeps_history() {
        let (p, m0, u_t) = coupled(16, 16);
        let cfg = SolverConfig { max_picard: 2, ..Default::default() };
        match picard_solve(&p, &m0, &u_t, &cfg) {
            Err(Error::PicardNotConverged(f)) => {
                assert_eq!(f.history.len(), 2);
                assert_eq!(f.state.history.len(), 2);
                assert!(f.last_residual() > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn history_csv_header() {
        let mut buf = Vec::new();
        let rows = [HistoryRow { iteration: 1, residual: 0.5, dm_rel: 0.0, du_rel: 0.0, dv_rel: 1.0 }];
        write_history_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some(HISTORY_HEADER));
        assert_eq!(text.lines().count(), 2);
    }
}
