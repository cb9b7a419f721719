use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{DensityTrajectory, FieldTrajectory, MultiField};
use crate::model::GameModel;
use crate::pde::{check_density, node_major};

/// Costs `J^i = int_Q m f^i + int u_T^i m(T)`, trapezoid in time and node
/// sum in space.
pub fn cost_functional(
    model: &dyn GameModel,
    v: &FieldTrajectory,
    m: &DensityTrajectory,
    u_t: &MultiField,
) -> Result<Vec<f64>> {
    let grid = *m.grid();
    grid.check_same(v.grid())?;
    grid.check_same(u_t.grid())?;
    let c = model.constants();
    let (n, nm, d) = (c.players, c.control_len(), grid.dim);
    if u_t.len() != n || v.components() != nm {
        return Err(Error::shape("cost needs N terminal components and N*M controls"));
    }
    for s in m.slices() {
        check_density(s)?;
    }
    let w = grid.cell_volume();
    let weights = grid.time_weights();
    let running: Vec<Vec<f64>> = (0..=grid.steps)
        .into_par_iter()
        .map(|k| {
            let vs = node_major(v.slice(k));
            let mk = m.slice(k);
            let mut acc = vec![0.0; n];
            for p in 0..grid.nodes() {
                let x = grid.coords(p);
                let mp = mk[p].max(0.0);
                let f = model.payoff(grid.time(k), &x[..d], mp, &vs[p * nm..(p + 1) * nm]).f;
                for i in 0..n {
                    acc[i] += mp * f[i];
                }
            }
            acc
        })
        .collect();
    let mut j = vec![0.0; n];
    for (acc, wt) in running.iter().zip(&weights) {
        for i in 0..n {
            j[i] += wt * w * acc[i];
        }
    }
    let m_t = m.last();
    for (i, ji) in j.iter_mut().enumerate() {
        let terminal: f64 = u_t.component(i).values().iter().zip(m_t.values()).map(|(a, b)| a * b).sum();
        *ji += w * terminal;
    }
    Ok(j)
}
