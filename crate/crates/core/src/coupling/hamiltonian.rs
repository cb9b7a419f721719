use nalgebra::DMatrix;

use super::config::SolverConfig;
use super::feedback::{control_jacobian, feedback_solve};
use crate::error::Result;
use crate::model::GameModel;
use crate::pde::eval_lagrangian;

/// Step for the partial derivatives of `L` in the controls.
const LAGRANGIAN_STEP: f64 = 1e-6;

/// `H^i(grad u, m) = L^i(m, v*(m, grad u), grad u)` with `v*` the feedback control.
pub fn hamiltonian(
    model: &dyn GameModel,
    t: f64,
    x: &[f64],
    m: f64,
    grad_u: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    let v = feedback_solve(model, t, x, m, grad_u, cfg)?;
    eval_lagrangian(model, t, x, m, &v, grad_u)
}

/// Jacobian of the Hamiltonian in `grad u`, row-major `N x (N d)`.
///
/// Chain rule through the feedback map: the explicit dependence of `L` on
/// `grad u` plus `dL/dv * dv/d(grad u)`, with `dv/d(grad u)` from the
/// linearised compatibility condition.
pub fn hamiltonian_grad(
    model: &dyn GameModel,
    t: f64,
    x: &[f64],
    m: f64,
    grad_u: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    let c = model.constants();
    let (n, mm, d, nm) = (c.players, c.control_dim, c.dim, c.control_len());
    let v = feedback_solve(model, t, x, m, grad_u, cfg)?;

    // Explicit part: d L^i / d (grad u^i) = g + m g_m, via L at zero gradient.
    let mut explicit = DMatrix::<f64>::zeros(n, n * d);
    let mut probe = vec![0.0; n * d];
    let base = eval_lagrangian(model, t, x, m, &v, &probe)?;
    for q in 0..n * d {
        probe[q] = 1.0;
        let l = eval_lagrangian(model, t, x, m, &v, &probe)?;
        probe[q] = 0.0;
        for i in 0..n {
            explicit[(i, q)] = l[i] - base[i];
        }
    }

    let mut dl_dv = DMatrix::<f64>::zeros(n, nm);
    let mut vp = v.clone();
    for q in 0..nm {
        vp[q] = v[q] + LAGRANGIAN_STEP;
        let plus = eval_lagrangian(model, t, x, m, &vp, grad_u)?;
        vp[q] = v[q] - LAGRANGIAN_STEP;
        let minus = eval_lagrangian(model, t, x, m, &vp, grad_u)?;
        vp[q] = v[q];
        for i in 0..n {
            dl_dv[(i, q)] = (plus[i] - minus[i]) / (2.0 * LAGRANGIAN_STEP);
        }
    }

    // d residual / d (grad u^i_k) at row (i, j) is b1 A^i_{kj}.
    let b1 = model.b1(m);
    let mut dr_dp = DMatrix::<f64>::zeros(nm, n * d);
    let mut a = vec![0.0; d * mm];
    for i in 0..n {
        model.control_matrix(i, t, x, &mut a);
        for j in 0..mm {
            for k in 0..d {
                dr_dp[(i * mm + j, i * d + k)] = b1 * a[k * mm + j];
            }
        }
    }
    let jac = control_jacobian(model, t, x, m, &v);
    let dv_dp = jac.lu().solve(&(-dr_dp)).ok_or(crate::error::Error::Newton { iterations: 0, residual: f64::NAN })?;

    let total = explicit + dl_dv * dv_dp;
    Ok(total.transpose().as_slice().to_vec())
}
