use serde::{Deserialize, Serialize};

use super::constants::ModelConstants;
use super::game::{GameModel, PayoffEval};
use crate::error::{Error, Result};

/// `m^p` with `m^0 = 1` for every `m >= 0`.
#[inline]
pub(crate) fn pow0(m: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        m.powf(p)
    }
}

/// `d/dm m^p`; zero for `p = 0`, `+inf` at `m = 0` for `0 < p < 1`.
#[inline]
pub(crate) fn dpow0(m: f64, p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * m.powf(p - 1.0)
    }
}

/// Density-dependent offset `b0(m)` of the drift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DriftOffset {
    #[default]
    Zero,
    /// One coefficient list per axis: `b0_k(m) = sum_p c[k][p] m^p`.
    Polynomial(Vec<Vec<f64>>),
}

impl DriftOffset {
    fn eval(&self, m: f64, order: usize, out: &mut [f64]) {
        out.fill(0.0);
        if let DriftOffset::Polynomial(coeffs) = self {
            for (o, c) in out.iter_mut().zip(coeffs) {
                // Horner on the `order`-th derivative.
                let mut acc = 0.0;
                for p in (order..c.len()).rev() {
                    let falling: f64 = (0..order).map(|q| (p - q) as f64).product();
                    acc = acc * m + falling * c[p];
                }
                *o = acc;
            }
        }
    }
}

/// The prototypical game
/// `f^i = (m+1)^r |v^i|^2 + B^i . v + K (1 + m^{2 s0})`, `b1(m) = (m+1)^s`,
/// with constant control matrices `A^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeModel {
    constants: ModelConstants,
    /// `N` rows of length `N*M`.
    linear: Vec<Vec<f64>>,
    /// `N` row-major `d x M` matrices.
    matrices: Vec<Vec<f64>>,
    offset: DriftOffset,
}

impl PrototypeModel {
    pub fn new(
        constants: ModelConstants,
        linear: Vec<Vec<f64>>,
        matrices: Vec<Vec<f64>>,
        offset: DriftOffset,
    ) -> Result<Self> {
        constants.validate()?;
        let (n, nm, dm) = (constants.players, constants.control_len(), constants.dim * constants.control_dim);
        if linear.len() != n || linear.iter().any(|row| row.len() != nm) {
            return Err(Error::shape(format!("B must be {n} rows of length {nm}")));
        }
        if matrices.len() != n || matrices.iter().any(|a| a.len() != dm) {
            return Err(Error::shape(format!("A must be {n} matrices with {dm} entries")));
        }
        if let DriftOffset::Polynomial(c) = &offset {
            if c.len() != constants.dim {
                return Err(Error::shape(format!("b0 needs one coefficient list per axis ({})", constants.dim)));
            }
        }
        let all = linear.iter().chain(&matrices).flatten();
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::domain("B and A entries must be finite"));
        }
        Ok(Self { constants, linear, matrices, offset })
    }

    /// `B = 0`, `b0 = 0`, and every `A^j` the `d x M` matrix with ones on the diagonal.
    pub fn with_defaults(constants: ModelConstants) -> Result<Self> {
        let (n, m, d) = (constants.players, constants.control_dim, constants.dim);
        let linear = vec![vec![0.0; n * m]; n];
        let eye: Vec<f64> = (0..d * m).map(|p| if p / m == p % m { 1.0 } else { 0.0 }).collect();
        Self::new(constants, linear, vec![eye; n], DriftOffset::Zero)
    }

    pub fn with_matrices(mut self, matrices: Vec<Vec<f64>>) -> Result<Self> {
        self.matrices = matrices;
        Self::new(self.constants, self.linear, self.matrices, self.offset)
    }

    pub fn with_linear(mut self, linear: Vec<Vec<f64>>) -> Result<Self> {
        self.linear = linear;
        Self::new(self.constants, self.linear, self.matrices, self.offset)
    }

    pub fn with_offset(mut self, offset: DriftOffset) -> Result<Self> {
        self.offset = offset;
        Self::new(self.constants, self.linear, self.matrices, self.offset)
    }

    pub fn linear(&self) -> &[Vec<f64>] {
        &self.linear
    }

    pub fn matrices(&self) -> &[Vec<f64>] {
        &self.matrices
    }

    pub fn offset(&self) -> &DriftOffset {
        &self.offset
    }
}

impl GameModel for PrototypeModel {
    fn name(&self) -> &str {
        "prototype"
    }

    fn constants(&self) -> &ModelConstants {
        &self.constants
    }

    fn payoff(&self, _t: f64, _x: &[f64], m: f64, v: &[f64]) -> PayoffEval {
        let c = &self.constants;
        let mm = c.control_dim;
        let weight = (m + 1.0).powf(c.r);
        let weight_dm = c.r * (m + 1.0).powf(c.r - 1.0);
        let base = c.k * (1.0 + pow0(m, 2.0 * c.s0));
        let base_dm = c.k * dpow0(m, 2.0 * c.s0);
        let mut out = PayoffEval {
            f: Vec::with_capacity(c.players),
            f_v: Vec::with_capacity(c.control_len()),
            f_m: Vec::with_capacity(c.players),
        };
        for (i, bi) in self.linear.iter().enumerate() {
            let vi = &v[i * mm..(i + 1) * mm];
            let sq: f64 = vi.iter().map(|x| x * x).sum();
            let lin: f64 = bi.iter().zip(v).map(|(b, x)| b * x).sum();
            out.f.push(weight * sq + lin + base);
            out.f_m.push(weight_dm * sq + base_dm);
            out.f_v.extend(vi.iter().zip(&bi[i * mm..(i + 1) * mm]).map(|(x, b)| 2.0 * weight * x + b));
        }
        out
    }

    fn b1(&self, m: f64) -> f64 {
        (m + 1.0).powf(self.constants.s)
    }

    fn b1_dm(&self, m: f64) -> f64 {
        let s = self.constants.s;
        s * (m + 1.0).powf(s - 1.0)
    }

    fn b0(&self, m: f64, out: &mut [f64]) {
        self.offset.eval(m, 0, out);
    }

    fn b0_dm(&self, m: f64, out: &mut [f64]) {
        self.offset.eval(m, 1, out);
    }

    fn b0_dmm(&self, m: f64, out: &mut [f64]) {
        self.offset.eval(m, 2, out);
    }

    fn control_matrix(&self, player: usize, _t: f64, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.matrices[player]);
    }

    fn control_jacobian(&self, _t: f64, _x: &[f64], m: f64, _v: &[f64]) -> Option<Vec<f64>> {
        let nm = self.constants.control_len();
        let diag = 2.0 * (m + 1.0).powf(self.constants.r);
        let mut jac = vec![0.0; nm * nm];
        for p in 0..nm {
            jac[p * nm + p] = diag;
        }
        Some(jac)
    }

    fn closed_form_feedback(&self, t: f64, x: &[f64], m: f64, grad_u: &[f64]) -> Option<Vec<f64>> {
        let c = &self.constants;
        let mm = c.control_dim;
        let proj = super::game::projected_gradients(self, t, x, grad_u);
        let b1 = self.b1(m);
        let denom = 2.0 * (m + 1.0).powf(c.r);
        let v = (0..c.control_len())
            .map(|p| {
                let i = p / mm;
                -(self.linear[i][p] + b1 * proj[p]) / denom
            })
            .collect();
        Some(v)
    }
}

/// Prototype plus a quartic term `epsilon |v^i|^4` in every pay-off. Still
/// strictly monotone in the controls but without a closed-form feedback.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticModel {
    base: PrototypeModel,
    epsilon: f64,
}

impl QuarticModel {
    pub fn new(base: PrototypeModel, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::domain(format!("quartic coefficient must be nonnegative, got {epsilon}")));
        }
        Ok(Self { base, epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl GameModel for QuarticModel {
    fn name(&self) -> &str {
        "quartic"
    }

    fn constants(&self) -> &ModelConstants {
        self.base.constants()
    }

    fn payoff(&self, t: f64, x: &[f64], m: f64, v: &[f64]) -> PayoffEval {
        let mut out = self.base.payoff(t, x, m, v);
        let mm = self.constants().control_dim;
        for i in 0..self.constants().players {
            let vi = &v[i * mm..(i + 1) * mm];
            let sq: f64 = vi.iter().map(|x| x * x).sum();
            out.f[i] += self.epsilon * sq * sq;
            for j in 0..mm {
                out.f_v[i * mm + j] += 4.0 * self.epsilon * sq * vi[j];
            }
        }
        out
    }

    fn b1(&self, m: f64) -> f64 {
        self.base.b1(m)
    }

    fn b1_dm(&self, m: f64) -> f64 {
        self.base.b1_dm(m)
    }

    fn b0(&self, m: f64, out: &mut [f64]) {
        self.base.b0(m, out)
    }

    fn b0_dm(&self, m: f64, out: &mut [f64]) {
        self.base.b0_dm(m, out)
    }

    fn b0_dmm(&self, m: f64, out: &mut [f64]) {
        self.base.b0_dmm(m, out)
    }

    fn control_matrix(&self, player: usize, t: f64, x: &[f64], out: &mut [f64]) {
        self.base.control_matrix(player, t, x, out)
    }

    fn control_jacobian(&self, t: f64, x: &[f64], m: f64, v: &[f64]) -> Option<Vec<f64>> {
        let mut jac = self.base.control_jacobian(t, x, m, v)?;
        let c = self.constants();
        let (mm, nm) = (c.control_dim, c.control_len());
        for i in 0..c.players {
            let vi = &v[i * mm..(i + 1) * mm];
            let sq: f64 = vi.iter().map(|x| x * x).sum();
            for a in 0..mm {
                for b in 0..mm {
                    let delta = if a == b { sq } else { 0.0 };
                    jac[(i * mm + a) * nm + i * mm + b] += 4.0 * self.epsilon * (delta + 2.0 * vi[a] * vi[b]);
                }
            }
        }
        Some(jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_drift, eval_model};

    fn scalar_proto(r: f64, s: f64) -> PrototypeModel {
        let mut c = ModelConstants::new(1, 1, 1);
        c.r = r;
        c.s = s;
        PrototypeModel::with_defaults(c).unwrap()
    }

    #[test]
    fn constant_term_uses_zero_power_convention() {
        let mut c = ModelConstants::new(3, 2, 1);
        c.s0 = 0.0;
        let p = PrototypeModel::with_defaults(c).unwrap();
        let e = eval_model(&p, 0.0, &[0.3], 0.0, &[0.0; 6]).unwrap();
        assert_eq!(e.f, vec![2.0; 3]);
        assert!(e.f_v.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn hand_evaluated_scalar_case() {
        let p = scalar_proto(1.0, 0.0);
        let e = eval_model(&p, 0.0, &[0.0], 1.0, &[1.0]).unwrap();
        assert_eq!(e.f, vec![4.0]);
        assert_eq!(e.f_v, vec![4.0]);
        assert_eq!(e.f_m, vec![1.0]);
    }

    #[test]
    fn zero_control_has_zero_gradient() {
        let mut c = ModelConstants::new(2, 2, 2);
        c.r = 2.5;
        c.s0 = 0.1;
        let p = PrototypeModel::with_defaults(c).unwrap();
        for m in [0.0, 0.5, 7.0] {
            let e = eval_model(&p, 0.0, &[0.1, 0.2], m, &[0.0; 4]).unwrap();
            assert!(e.f_v.iter().all(|x| *x == 0.0));
        }
    }

    #[test]
    fn domain_errors() {
        let p = scalar_proto(1.0, 0.0);
        assert!(matches!(eval_model(&p, 0.0, &[0.0], -1e-3, &[0.0]), Err(Error::Domain(_))));
        assert!(matches!(eval_model(&p, 0.0, &[0.0], 1.0, &[f64::NAN]), Err(Error::Domain(_))));
        assert!(matches!(eval_drift(&p, 0.0, &[0.0], f64::INFINITY, &[0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn drift_hand_evaluation() {
        let p = scalar_proto(1.0, 1.0);
        let e = eval_drift(&p, 0.0, &[0.0], 1.0, &[2.0]).unwrap();
        assert_eq!(e.g, vec![4.0]);
        assert_eq!(e.g_m, vec![2.0]);
        assert_eq!(e.g_v, vec![vec![2.0]]);
    }

    #[test]
    fn zero_control_drift() {
        let mut c = ModelConstants::new(2, 1, 2);
        c.s = 0.4;
        let p = PrototypeModel::with_defaults(c).unwrap();
        let e = eval_drift(&p, 0.0, &[0.0, 0.0], 3.0, &[0.0, 0.0]).unwrap();
        assert_eq!(e.g, vec![0.0, 0.0]);
        let b1 = 4f64.powf(0.4);
        assert_eq!(e.g_v[0], vec![b1, 0.0]);
    }

    #[test]
    fn s_zero_gives_constant_factor() {
        let p = scalar_proto(1.0, 0.0);
        for m in [0.0, 0.3, 100.0] {
            assert_eq!(p.b1(m), 1.0);
            assert_eq!(p.b1_dm(m), 0.0);
        }
    }

    #[test]
    fn polynomial_offset_derivatives() {
        let c = ModelConstants::new(1, 1, 1);
        let p = PrototypeModel::with_defaults(c)
            .unwrap()
            .with_offset(DriftOffset::Polynomial(vec![vec![1.0, 2.0, 3.0]]))
            .unwrap();
        let mut o = [0.0];
        p.b0(2.0, &mut o);
        assert_eq!(o[0], 1.0 + 4.0 + 12.0);
        p.b0_dm(2.0, &mut o);
        assert_eq!(o[0], 2.0 + 12.0);
        p.b0_dmm(2.0, &mut o);
        assert_eq!(o[0], 6.0);
    }

    #[test]
    fn shape_validation() {
        let c = ModelConstants::new(2, 1, 1);
        let p = PrototypeModel::with_defaults(c).unwrap();
        assert!(p.clone().with_linear(vec![vec![0.0; 2]]).is_err());
        assert!(p.with_matrices(vec![vec![1.0, 2.0]; 2]).is_err());
    }
}
