use nalgebra::{DMatrix, DVector};

use super::config::SolverConfig;
use crate::error::{Error, Result};
use crate::model::{eval_model, projected_gradients, GameModel};

/// Step of the finite-difference control Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-6;

/// Residual of the compatibility condition,
/// `f^i_{v^i_j} + b1(m) (grad u^i A^i)_j`, for all `(i, j)`.
pub fn feedback_residual(
    model: &dyn GameModel,
    t: f64,
    x: &[f64],
    m: f64,
    v: &[f64],
    grad_u: &[f64],
) -> Result<Vec<f64>> {
    check_gradient(model, grad_u)?;
    let proj = projected_gradients(model, t, x, grad_u);
    let b1 = model.b1(m);
    let pay = eval_model(model, t, x, m, v)?;
    Ok(pay.f_v.iter().zip(&proj).map(|(fv, p)| fv + b1 * p).collect())
}

fn check_gradient(model: &dyn GameModel, grad_u: &[f64]) -> Result<()> {
    let c = model.constants();
    if grad_u.len() != c.players * c.dim {
        return Err(Error::shape(format!("grad_u has {} entries, expected {}", grad_u.len(), c.players * c.dim)));
    }
    if grad_u.iter().any(|g| !g.is_finite()) {
        return Err(Error::domain("non-finite value gradient"));
    }
    Ok(())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Jacobian of `v -> (f^i_{v^i})_i`, analytic when the model has one.
pub(crate) fn control_jacobian(model: &dyn GameModel, t: f64, x: &[f64], m: f64, v: &[f64]) -> DMatrix<f64> {
    let nm = v.len();
    if let Some(jac) = model.control_jacobian(t, x, m, v) {
        return DMatrix::from_row_slice(nm, nm, &jac);
    }
    let mut jac = DMatrix::zeros(nm, nm);
    let mut vp = v.to_vec();
    for q in 0..nm {
        vp[q] = v[q] + JACOBIAN_STEP;
        let plus = model.payoff(t, x, m, &vp).f_v;
        vp[q] = v[q] - JACOBIAN_STEP;
        let minus = model.payoff(t, x, m, &vp).f_v;
        vp[q] = v[q];
        for p in 0..nm {
            jac[(p, q)] = (plus[p] - minus[p]) / (2.0 * JACOBIAN_STEP);
        }
    }
    jac
}

/// Feedback control: the explicit formula when the model provides one,
/// otherwise [`feedback_newton`].
pub fn feedback_solve(
    model: &dyn GameModel,
    t: f64,
    x: &[f64],
    m: f64,
    grad_u: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    check_gradient(model, grad_u)?;
    if !(m.is_finite() && m >= 0.0) {
        return Err(Error::domain(format!("density must be finite and nonnegative, got {m}")));
    }
    match model.closed_form_feedback(t, x, m, grad_u) {
        Some(v) => Ok(v),
        None => feedback_newton(model, t, x, m, grad_u, cfg),
    }
}

/// Damped Newton iteration for the compatibility condition, started at `v = 0`.
pub fn feedback_newton(
    model: &dyn GameModel,
    t: f64,
    x: &[f64],
    m: f64,
    grad_u: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    let nm = model.constants().control_len();
    let mut v = vec![0.0; nm];
    let mut res = feedback_residual(model, t, x, m, &v, grad_u)?;
    let mut norm = max_abs(&res);
    for _ in 0..cfg.max_newton {
        if norm <= cfg.newton_tol {
            return Ok(v);
        }
        let jac = control_jacobian(model, t, x, m, &v);
        let step = jac
            .lu()
            .solve(&(-DVector::from_column_slice(&res)))
            .ok_or(Error::Newton { iterations: 0, residual: norm })?;

        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = v.iter().zip(step.iter()).map(|(a, b)| a + lambda * b).collect();
            let trial_res = feedback_residual(model, t, x, m, &trial, grad_u)?;
            let trial_norm = max_abs(&trial_res);
            if trial_norm < norm || lambda < 1e-6 {
                let tiny = lambda * max_abs(step.as_slice()) <= 4.0 * f64::EPSILON * max_abs(&trial).max(1.0);
                v = trial;
                res = trial_res;
                let stalled = tiny && trial_norm >= norm;
                norm = trial_norm;
                if stalled {
                    // Rounding floor: nothing left to gain.
                    let scale = max_abs(&projected_gradients(model, t, x, grad_u)).max(1.0);
                    if norm <= cfg.newton_tol * scale {
                        return Ok(v);
                    }
                }
                break;
            }
            lambda *= 0.5;
        }
    }
    if norm <= cfg.newton_tol {
        return Ok(v);
    }
    Err(Error::Newton { iterations: cfg.max_newton, residual: norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelConstants, PrototypeModel, QuarticModel};

    fn scalar() -> PrototypeModel {
        PrototypeModel::with_defaults(ModelConstants::new(1, 1, 1)).unwrap()
    }

    #[test]
    fn unforced_feedback_is_zero() {
        let p = PrototypeModel::with_defaults(ModelConstants::new(3, 2, 2)).unwrap();
        let v = feedback_solve(&p, 0.0, &[0.1, 0.2], 2.0, &[0.0; 6], &SolverConfig::default()).unwrap();
        assert!(v.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn scalar_closed_form_and_newton() {
        let cfg = SolverConfig::default();
        let v = feedback_solve(&scalar(), 0.0, &[0.0], 1.0, &[1.0], &cfg).unwrap();
        assert_eq!(v, vec![-0.25]);
        let w = feedback_newton(&scalar(), 0.0, &[0.0], 1.0, &[1.0], &cfg).unwrap();
        assert!((w[0] + 0.25).abs() <= 1e-12);
    }

    #[test]
    fn quartic_newton_meets_residual() {
        let mut c = ModelConstants::new(2, 2, 2);
        c.s = 0.2;
        let q = QuarticModel::new(PrototypeModel::with_defaults(c).unwrap(), 0.3).unwrap();
        let grad = [1.5, -2.0, 0.7, 3.0];
        let cfg = SolverConfig::default();
        let v = feedback_solve(&q, 0.0, &[0.3, 0.4], 2.5, &grad, &cfg).unwrap();
        let r = feedback_residual(&q, 0.0, &[0.3, 0.4], 2.5, &v, &grad).unwrap();
        assert!(max_abs(&r) <= 1e-10, "{r:?}");
    }

    #[test]
    fn newton_reports_failure() {
        let c = ModelConstants::new(1, 1, 1);
        let q = QuarticModel::new(PrototypeModel::with_defaults(c).unwrap(), 5.0).unwrap();
        let cfg = SolverConfig { max_newton: 1, ..Default::default() };
        let r = feedback_newton(&q, 0.0, &[0.0], 0.0, &[50.0], &cfg);
        assert!(matches!(r, Err(Error::Newton { iterations: 1, .. })));
    }
}
