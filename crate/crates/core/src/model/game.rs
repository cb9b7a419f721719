use super::constants::ModelConstants;
use crate::error::{Error, Result};

/// Pay-offs of all players at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffEval {
    /// `f^i`, one entry per player.
    pub f: Vec<f64>,
    /// Own-block gradients `f^i_{v^i}`, stored as `N` blocks of length `M`.
    pub f_v: Vec<f64>,
    /// `f^i_m`, one entry per player.
    pub f_m: Vec<f64>,
}

/// Drift `g` and its partial derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftEval {
    pub g: Vec<f64>,
    pub g_m: Vec<f64>,
    /// `g_{v^j} = b1(m) A^j`, `N` row-major `d x M` blocks.
    pub g_v: Vec<Vec<f64>>,
}

/// Data `(f, g)` of an `N`-player game whose drift has the structure
/// `g = sum_j b1(m) A^j(t,x) v^j + b0(m)`.
///
/// Controls are passed as flat slices of length `N*M` with player `i`
/// occupying `v[i*M..(i+1)*M]`; value gradients as flat slices of length
/// `N*d` with the same layout. All methods must be pure.
pub trait GameModel: Send + Sync {
    fn name(&self) -> &str {
        "custom"
    }

    fn constants(&self) -> &ModelConstants;

    fn payoff(&self, t: f64, x: &[f64], m: f64, v: &[f64]) -> PayoffEval;

    fn b1(&self, m: f64) -> f64;

    fn b1_dm(&self, m: f64) -> f64;

    fn b0(&self, _m: f64, out: &mut [f64]) {
        out.fill(0.0);
    }

    fn b0_dm(&self, _m: f64, out: &mut [f64]) {
        out.fill(0.0);
    }

    fn b0_dmm(&self, _m: f64, out: &mut [f64]) {
        out.fill(0.0);
    }

    /// Writes `A^player(t,x)` into `out` as a row-major `d x M` matrix.
    fn control_matrix(&self, player: usize, t: f64, x: &[f64], out: &mut [f64]);

    /// Jacobian of `v -> (f^1_{v^1}, ..., f^N_{v^N})`, row-major `NM x NM`.
    /// Models without second derivatives return `None` and the feedback
    /// solver falls back to finite differences.
    fn control_jacobian(&self, _t: f64, _x: &[f64], _m: f64, _v: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Explicit solution of the compatibility condition, if the model has one.
    fn closed_form_feedback(&self, _t: f64, _x: &[f64], _m: f64, _grad_u: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

fn check_point(model: &dyn GameModel, t: f64, x: &[f64], m: f64, v: &[f64]) -> Result<()> {
    let c = model.constants();
    if !m.is_finite() || m < 0.0 {
        return Err(Error::domain(format!("density must be finite and nonnegative, got {m}")));
    }
    if !t.is_finite() || x.iter().any(|xi| !xi.is_finite()) {
        return Err(Error::domain("non-finite time or position"));
    }
    if x.len() != c.dim {
        return Err(Error::shape(format!("position has {} entries, expected {}", x.len(), c.dim)));
    }
    if v.len() != c.control_len() {
        return Err(Error::shape(format!("control has {} entries, expected {}", v.len(), c.control_len())));
    }
    if let Some(vi) = v.iter().find(|vi| !vi.is_finite()) {
        return Err(Error::domain(format!("non-finite control entry {vi}")));
    }
    Ok(())
}

/// Evaluates pay-offs with input validation.
pub fn eval_model(model: &dyn GameModel, t: f64, x: &[f64], m: f64, v: &[f64]) -> Result<PayoffEval> {
    check_point(model, t, x, m, v)?;
    Ok(model.payoff(t, x, m, v))
}

/// Evaluates the structured drift with input validation.
pub fn eval_drift(model: &dyn GameModel, t: f64, x: &[f64], m: f64, v: &[f64]) -> Result<DriftEval> {
    check_point(model, t, x, m, v)?;
    let c = model.constants();
    let (d, mm) = (c.dim, c.control_dim);
    let mut g = vec![0.0; d];
    let mut g_m = vec![0.0; d];
    model.b0(m, &mut g);
    model.b0_dm(m, &mut g_m);
    let (b1, b1_dm) = (model.b1(m), model.b1_dm(m));
    let mut a = vec![0.0; d * mm];
    let mut g_v = Vec::with_capacity(c.players);
    for j in 0..c.players {
        model.control_matrix(j, t, x, &mut a);
        let vj = &v[j * mm..(j + 1) * mm];
        for k in 0..d {
            let av: f64 = (0..mm).map(|l| a[k * mm + l] * vj[l]).sum();
            g[k] += b1 * av;
            g_m[k] += b1_dm * av;
        }
        g_v.push(a.iter().map(|aij| b1 * aij).collect());
    }
    Ok(DriftEval { g, g_m, g_v })
}

/// Drift velocity only; no validation. `a` is scratch of length `d*M`.
pub(crate) fn drift_velocity(
    model: &dyn GameModel,
    t: f64,
    x: &[f64],
    m: f64,
    v: &[f64],
    a: &mut [f64],
    g: &mut [f64],
) {
    let c = model.constants();
    let (d, mm) = (c.dim, c.control_dim);
    model.b0(m, g);
    let b1 = model.b1(m);
    for j in 0..c.players {
        model.control_matrix(j, t, x, a);
        let vj = &v[j * mm..(j + 1) * mm];
        for k in 0..d {
            let av: f64 = (0..mm).map(|l| a[k * mm + l] * vj[l]).sum();
            g[k] += b1 * av;
        }
    }
}

/// `m * f_m` with the limit `0` at `m = 0`, where `f_m` itself may blow up
/// for fractional exponents.
#[inline]
pub fn density_weighted(m: f64, f_m: f64) -> f64 {
    if m == 0.0 {
        0.0
    } else {
        m * f_m
    }
}

/// `(grad u^i A^i)_j = sum_k d_k u^i A^i_{kj}` for every player, as `N` blocks of length `M`.
pub fn projected_gradients(model: &dyn GameModel, t: f64, x: &[f64], grad_u: &[f64]) -> Vec<f64> {
    let c = model.constants();
    let (d, mm) = (c.dim, c.control_dim);
    let mut a = vec![0.0; d * mm];
    let mut out = vec![0.0; c.control_len()];
    for i in 0..c.players {
        model.control_matrix(i, t, x, &mut a);
        let gi = &grad_u[i * d..(i + 1) * d];
        for j in 0..mm {
            out[i * mm + j] = (0..d).map(|k| gi[k] * a[k * mm + j]).sum();
        }
    }
    out
}
