use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{gradient, MultiField, ScalarField};
use crate::model::{density_weighted, eval_drift, eval_model, GameModel};

/// `L^i = f^i + m f^i_m + grad u^i . (g + m g_m)` at one point.
///
/// `grad_u` holds `N` blocks of length `d`.
pub fn eval_lagrangian(
    model: &dyn GameModel,
    t: f64,
    x: &[f64],
    m: f64,
    v: &[f64],
    grad_u: &[f64],
) -> Result<Vec<f64>> {
    let c = model.constants();
    let d = c.dim;
    if grad_u.len() != c.players * d {
        return Err(Error::shape(format!("grad_u has {} entries, expected {}", grad_u.len(), c.players * d)));
    }
    let pay = eval_model(model, t, x, m, v)?;
    let drift = eval_drift(model, t, x, m, v)?;
    let transport: Vec<f64> = drift.g.iter().zip(&drift.g_m).map(|(g, gm)| g + density_weighted(m, *gm)).collect();
    Ok((0..c.players)
        .map(|i| {
            let gi = &grad_u[i * d..(i + 1) * d];
            let adv: f64 = gi.iter().zip(&transport).map(|(a, b)| a * b).sum();
            pay.f[i] + density_weighted(m, pay.f_m[i]) + adv
        })
        .collect())
}

/// Gradients of every component of `u`, node-major: `out[p*N*d + i*d + k]`.
pub(crate) fn node_gradients(u: &MultiField) -> Vec<f64> {
    let grid = *u.grid();
    let (n_comp, d) = (u.len(), grid.dim);
    let grads: Vec<MultiField> = u.components().iter().map(gradient).collect();
    let mut out = vec![0.0; grid.nodes() * n_comp * d];
    for (i, g) in grads.iter().enumerate() {
        for k in 0..d {
            for (p, val) in g.component(k).values().iter().enumerate() {
                out[p * n_comp * d + i * d + k] = *val;
            }
        }
    }
    out
}

/// Node-major gather of all components: `out[p*k + c]`.
pub(crate) fn node_major(f: &MultiField) -> Vec<f64> {
    let k = f.len();
    let nodes = f.grid().nodes();
    let mut out = vec![0.0; nodes * k];
    for (c, comp) in f.components().iter().enumerate() {
        for (p, val) in comp.values().iter().enumerate() {
            out[p * k + c] = *val;
        }
    }
    out
}

/// Lagrangian of every player at every node of one time slice.
pub fn lagrangian_field(
    model: &dyn GameModel,
    t: f64,
    m: &ScalarField,
    v: &MultiField,
    u: &MultiField,
) -> Result<MultiField> {
    let grid = *m.grid();
    let c = model.constants();
    let (n, nm, d) = (c.players, c.control_len(), grid.dim);
    let vs = node_major(v);
    let gs = node_gradients(u);
    let rows: Vec<Vec<f64>> = (0..grid.nodes())
        .into_par_iter()
        .map(|p| {
            let x = grid.coords(p);
            eval_lagrangian(model, t, &x[..d], m[p].max(0.0), &vs[p * nm..(p + 1) * nm], &gs[p * n * d..(p + 1) * n * d])
        })
        .collect::<Result<_>>()?;
    Ok(MultiField::from_node_major(grid, n, &rows.concat()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelConstants, PrototypeModel};

    #[test]
    fn unforced_prototype_at_zero_density() {
        let p = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1)).unwrap();
        let l = eval_lagrangian(&p, 0.0, &[0.5], 0.0, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(l, vec![2.0, 2.0]);
    }

    #[test]
    fn scalar_hand_evaluation() {
        let p = PrototypeModel::with_defaults(ModelConstants::new(1, 1, 1)).unwrap();
        let l = eval_lagrangian(&p, 0.0, &[0.0], 1.0, &[1.0], &[1.0]).unwrap();
        assert_eq!(l, vec![6.0]);
    }

    #[test]
    fn zero_gradient_drops_transport() {
        let mut c = ModelConstants::new(2, 2, 2);
        c.s = 0.3;
        c.s0 = 0.2;
        let p = PrototypeModel::with_defaults(c).unwrap();
        let v = [0.3, -1.0, 2.0, 0.5];
        let l = eval_lagrangian(&p, 0.1, &[0.2, 0.7], 1.7, &v, &[0.0; 4]).unwrap();
        let e = eval_model(&p, 0.1, &[0.2, 0.7], 1.7, &v).unwrap();
        for i in 0..2 {
            assert!((l[i] - (e.f[i] + 1.7 * e.f_m[i])).abs() < 1e-14);
        }
    }

    #[test]
    fn gradient_shape_is_checked() {
        let p = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1)).unwrap();
        assert!(eval_lagrangian(&p, 0.0, &[0.0], 0.0, &[0.0, 0.0], &[0.0]).is_err());
    }
}
