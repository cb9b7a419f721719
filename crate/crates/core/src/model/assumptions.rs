//! Randomised verification of the structural assumptions on `(f, g)`.
//!
//! Each assumption is an inequality quantified over all densities and
//! controls. The sampler evaluates both sides on random points and reports,
//! per assumption, the fitted constant together with the worst sample.
//!
//! Assumptions whose constant is the generic `K` are judged against
//! `K_bound` when the model declares one. Otherwise they pass when the
//! fitted constant stays bounded (grows by at most a factor two) after the
//! sampling box is enlarged, which is what a correct growth exponent
//! guarantees. Assumptions with a named constant (`C0`, `C1`, `gamma`) are
//! judged against the declared value.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::game::{density_weighted, eval_drift, GameModel};
use super::gates::{check_gates, GateReport};
use super::prototype::pow0;

/// Step of the finite-difference Hessian of `f^i` in `v^i`.
pub const HESSIAN_STEP: f64 = 1e-4;
/// Smallest admissible eigenvalue estimate of that Hessian.
pub const HESSIAN_TOLERANCE: f64 = -1e-8;
/// Growth allowed for a fitted `K` when the sampling box is enlarged.
pub const STABILITY_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub m_max: f64,
    pub v_radius: f64,
    pub samples: usize,
    pub seed: u64,
    /// Enlargement factor of the second sampling box.
    pub expansion: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { m_max: 10.0, v_radius: 10.0, samples: 10_000, seed: 0, expansion: 4.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionId {
    PayoffGrowth,
    GradientGrowth,
    OneSided,
    SumCoercive,
    Convexity,
    BehaviourAtZero,
    GradientCoercive,
    DriftGrowth,
    DriftGradientGrowth,
    DriftFactors,
    MatrixBound,
    SameRange,
    OffsetDerivatives,
    Smallness,
    StrictMonotone,
}

impl AssumptionId {
    pub const ALL: [AssumptionId; 15] = [
        AssumptionId::PayoffGrowth,
        AssumptionId::GradientGrowth,
        AssumptionId::OneSided,
        AssumptionId::SumCoercive,
        AssumptionId::Convexity,
        AssumptionId::BehaviourAtZero,
        AssumptionId::GradientCoercive,
        AssumptionId::DriftGrowth,
        AssumptionId::DriftGradientGrowth,
        AssumptionId::DriftFactors,
        AssumptionId::MatrixBound,
        AssumptionId::SameRange,
        AssumptionId::OffsetDerivatives,
        AssumptionId::Smallness,
        AssumptionId::StrictMonotone,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            AssumptionId::PayoffGrowth => "payoff_growth",
            AssumptionId::GradientGrowth => "gradient_growth",
            AssumptionId::OneSided => "one_sided",
            AssumptionId::SumCoercive => "sum_coercive",
            AssumptionId::Convexity => "convexity",
            AssumptionId::BehaviourAtZero => "behaviour_at_zero",
            AssumptionId::GradientCoercive => "gradient_coercive",
            AssumptionId::DriftGrowth => "drift_growth",
            AssumptionId::DriftGradientGrowth => "drift_gradient_growth",
            AssumptionId::DriftFactors => "drift_factors",
            AssumptionId::MatrixBound => "matrix_bound",
            AssumptionId::SameRange => "same_range",
            AssumptionId::OffsetDerivatives => "offset_derivatives",
            AssumptionId::Smallness => "smallness",
            AssumptionId::StrictMonotone => "strict_monotone",
        }
    }

    fn kind(&self) -> Kind {
        use AssumptionId::*;
        match self {
            PayoffGrowth | GradientGrowth | OneSided | BehaviourAtZero | DriftGrowth | DriftGradientGrowth
            | DriftFactors | MatrixBound | OffsetDerivatives => Kind::GenericUpper,
            SumCoercive | GradientCoercive => Kind::Coercive,
            SameRange | Smallness => Kind::NamedUpper,
            Convexity => Kind::Nonnegative(HESSIAN_TOLERANCE),
            StrictMonotone => Kind::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    /// Score is a ratio bounded by the generic `K`; worst = max.
    GenericUpper,
    /// Score is a ratio bounded below by `C0`; worst = min.
    Coercive,
    /// Score is a ratio bounded by a named constant; worst = max.
    NamedUpper,
    /// Score must stay above the tolerance; worst = min.
    Nonnegative(f64),
    /// Score must be strictly positive; worst = min.
    Positive,
}

/// One random evaluation point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub m: f64,
    pub v: Vec<f64>,
    /// Second control for the monotonicity probe.
    pub v_alt: Vec<f64>,
    /// Row vector for the range comparison of the control matrices.
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionEntry {
    pub id: AssumptionId,
    pub passed: bool,
    /// Fitted constant (or extreme score) over all samples.
    pub fitted: f64,
    /// Fitted constant over the base box only, for generic constants.
    pub fitted_base: Option<f64>,
    /// Declared constant the fit was compared with, if any.
    pub declared: Option<f64>,
    /// Sample attaining the fitted value.
    pub witness: Option<SamplePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub seed: u64,
    pub samples: usize,
    pub gates: GateReport,
    pub entries: Vec<AssumptionEntry>,
}

impl AssumptionReport {
    pub fn get(&self, id: AssumptionId) -> Option<&AssumptionEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn draw_ball(rng: &mut ChaCha8Rng, len: usize, radius: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let n = norm(&v);
    let target = radius * rng.gen::<f64>();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x *= target / n);
    }
    v
}

fn draw_points(model: &dyn GameModel, cfg: &SamplerConfig, m_max: f64, radius: f64, rng: &mut ChaCha8Rng) -> Vec<SamplePoint> {
    let c = model.constants();
    (0..cfg.samples)
        .map(|_| SamplePoint {
            t: rng.gen::<f64>(),
            x: (0..c.dim).map(|_| rng.gen::<f64>()).collect(),
            m: rng.gen_range(0.0..=m_max),
            v: draw_ball(rng, c.control_len(), radius),
            v_alt: draw_ball(rng, c.control_len(), radius),
            z: (0..c.dim).map(|_| rng.gen_range(-1.0..=1.0)).collect(),
        })
        .collect()
}

/// Ratio with the convention `0/0 = 0` and `positive/0 = inf`.
fn ratio(num: f64, den: f64) -> f64 {
    if num <= 0.0 {
        0.0
    } else if den <= 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

fn scores(model: &dyn GameModel, p: &SamplePoint) -> [f64; 15] {
    let c = model.constants();
    let (n, mm, d) = (c.players, c.control_dim, c.dim);
    let (r, s, s0, alpha, k) = (c.r, c.s, c.s0, c.alpha, c.structural_k());
    let (t, x, m, v) = (p.t, &p.x[..], p.m, &p.v[..]);
    let vn = norm(v);
    let pay = model.payoff(t, x, m, v);
    let mr1 = pow0(m, r) + 1.0;
    let m2s0 = pow0(m, 2.0 * s0);
    let va = vn.powf(alpha + 1.0);

    let mut out = [0.0; 15];

    out[0] = (0..n)
        .map(|i| ratio(pay.f[i].abs() + density_weighted(m, pay.f_m[i]).abs(), mr1 * vn * vn + m2s0))
        .fold(0.0, f64::max);

    out[1] = (0..n)
        .map(|i| ratio(norm(&pay.f_v[i * mm..(i + 1) * mm]), mr1 * vn + pow0(m, s0)))
        .fold(0.0, f64::max);

    out[2] = (0..n)
        .map(|i| {
            let lhs = pay.f[i] + density_weighted(m, pay.f_m[i]);
            ratio(lhs, 1.0 + pay.f[i] + va + m2s0)
        })
        .fold(0.0, f64::max);

    let sum: f64 = (0..n).map(|i| pay.f[i] + density_weighted(m, pay.f_m[i])).sum();
    out[3] = if vn > 1e-12 { (sum + k * (m2s0 + 1.0)) / (mr1 * vn * vn) } else { f64::INFINITY };

    // Hessian of f^i in v^i from differences of the analytic gradient.
    let mut min_eig = f64::INFINITY;
    let mut vp = v.to_vec();
    for i in 0..n {
        let mut hess = DMatrix::<f64>::zeros(mm, mm);
        for b in 0..mm {
            let q = i * mm + b;
            vp[q] = v[q] + HESSIAN_STEP;
            let plus = model.payoff(t, x, m, &vp).f_v;
            vp[q] = v[q] - HESSIAN_STEP;
            let minus = model.payoff(t, x, m, &vp).f_v;
            vp[q] = v[q];
            for a in 0..mm {
                hess[(a, b)] = (plus[i * mm + a] - minus[i * mm + a]) / (2.0 * HESSIAN_STEP);
            }
        }
        let sym = (&hess + hess.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym).eigenvalues.min();
        min_eig = min_eig.min(eig);
    }
    out[4] = min_eig;

    out[5] = (0..n)
        .map(|i| {
            let mut v0 = v.to_vec();
            v0[i * mm..(i + 1) * mm].fill(0.0);
            let f0 = model.payoff(t, x, m, &v0).f[i];
            ratio(f0, 1.0 + m2s0 + norm(&v0).powf(alpha + 1.0))
        })
        .fold(0.0, f64::max);

    out[6] = (0..n)
        .filter_map(|i| {
            let vi = &v[i * mm..(i + 1) * mm];
            let vin = norm(vi);
            (vin > 1e-12).then(|| {
                let dot: f64 = vi.iter().zip(&pay.f_v[i * mm..(i + 1) * mm]).map(|(a, b)| a * b).sum();
                (dot + k * (1.0 + m2s0 + va)) / (mr1 * vin * vin)
            })
        })
        .fold(f64::INFINITY, f64::min);

    let drift = eval_drift(model, t, x, m, v).expect("sample points are valid");
    let ms1 = pow0(m, s) + 1.0;
    let g_m_scaled: Vec<f64> = drift.g_m.iter().map(|gm| density_weighted(m, *gm)).collect();
    out[7] = ratio(norm(&g_m_scaled) + norm(&drift.g), ms1 * vn + pow0(m, s0) + 1.0);
    let gv_sq: f64 = drift.g_v.iter().flatten().map(|x| x * x).sum();
    out[8] = ratio(gv_sq.sqrt(), ms1);

    let mut b0 = vec![0.0; d];
    model.b0(m, &mut b0);
    out[9] = ratio(model.b1(m).abs(), ms1).max(ratio(norm(&b0), pow0(m, s0) + 1.0));

    let mut a = vec![0.0; d * mm];
    let mut za = Vec::with_capacity(n);
    let mut a_max: f64 = 0.0;
    for j in 0..n {
        model.control_matrix(j, t, x, &mut a);
        a_max = a_max.max(norm(&a));
        let row: Vec<f64> = (0..mm).map(|l| (0..d).map(|q| p.z[q] * a[q * mm + l]).sum()).collect();
        za.push(norm(&row));
    }
    out[10] = a_max;
    out[11] = za
        .iter()
        .flat_map(|zj| za.iter().map(move |zi| ratio(*zj, *zi)))
        .fold(0.0, f64::max);

    let (mut db0, mut ddb0) = (vec![0.0; d], vec![0.0; d]);
    model.b0_dm(m, &mut db0);
    model.b0_dmm(m, &mut ddb0);
    out[12] = ratio(norm(&db0), (m + 1.0).powf(s0 - 1.0)).max(ratio(norm(&ddb0), (m + 1.0).powf(s0 - 2.0)));

    out[13] = ratio(density_weighted(m, model.b1_dm(m)).abs(), model.b1(m).abs());

    let alt = model.payoff(t, x, m, &p.v_alt);
    let diff: Vec<f64> = v.iter().zip(&p.v_alt).map(|(a, b)| a - b).collect();
    let dn = norm(&diff);
    out[14] = if dn > 1e-12 {
        let dot: f64 = pay.f_v.iter().zip(&alt.f_v).zip(&diff).map(|((a, b), dv)| (a - b) * dv).sum();
        dot / (dn * dn)
    } else {
        f64::INFINITY
    };

    out
}

/// `(index, value)` of the worst score; max when `upper`, else min.
fn worst(values: &[[f64; 15]], col: usize, upper: bool) -> (usize, f64) {
    let mut best = (0, values[0][col]);
    for (idx, row) in values.iter().enumerate().skip(1) {
        let v = row[col];
        let better = if upper { v > best.1 } else { v < best.1 };
        if better || (v.is_nan() && !best.1.is_nan()) {
            best = (idx, v);
        }
    }
    best
}

/// Samples every structural assumption of `model`.
pub fn sample_assumptions(model: &dyn GameModel, cfg: &SamplerConfig) -> AssumptionReport {
    assert!(cfg.samples > 0, "sampler needs at least one sample");
    let c = model.constants();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut points = draw_points(model, cfg, cfg.m_max, cfg.v_radius, &mut rng);
    let base_len = points.len();
    points.extend(draw_points(model, cfg, cfg.m_max * cfg.expansion, cfg.v_radius * cfg.expansion, &mut rng));
    let values: Vec<[f64; 15]> = points.par_iter().map(|p| scores(model, p)).collect();

    let entries = AssumptionId::ALL
        .iter()
        .enumerate()
        .map(|(col, &id)| {
            let kind = id.kind();
            let upper = matches!(kind, Kind::GenericUpper | Kind::NamedUpper);
            let (idx, fitted) = worst(&values, col, upper);
            let mut fitted_base = None;
            let (passed, declared) = match kind {
                Kind::GenericUpper => {
                    let (_, base) = worst(&values[..base_len], col, true);
                    fitted_base = Some(base);
                    match c.k_bound {
                        Some(kb) => (fitted <= kb, Some(kb)),
                        None => (fitted.is_finite() && fitted <= STABILITY_FACTOR * base, None),
                    }
                }
                Kind::Coercive => (fitted >= c.c0, Some(c.c0)),
                Kind::NamedUpper => {
                    let declared = if id == AssumptionId::SameRange { c.c1 } else { c.gamma };
                    (fitted <= declared, Some(declared))
                }
                Kind::Nonnegative(tol) => (fitted >= tol, None),
                Kind::Positive => (fitted > 0.0, None),
            };
            AssumptionEntry { id, passed, fitted, fitted_base, declared, witness: Some(points[idx].clone()) }
        })
        .collect();

    AssumptionReport {
        seed: cfg.seed,
        samples: points.len(),
        gates: check_gates(c, model.name() == "prototype"),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelConstants, PayoffEval, PrototypeModel};

    fn reference() -> PrototypeModel {
        let c = ModelConstants::new(2, 1, 1);
        PrototypeModel::with_defaults(c).unwrap()
    }

    fn small() -> SamplerConfig {
        SamplerConfig { samples: 2000, ..Default::default() }
    }

    #[test]
    fn prototype_is_convex_and_monotone() {
        let rep = sample_assumptions(&reference(), &small());
        let conv = rep.get(AssumptionId::Convexity).unwrap();
        assert!(conv.passed);
        // Hessian is 2 (m+1)^r I, smallest at m = 0.
        assert!(conv.fitted >= 2.0 - 1e-6, "{}", conv.fitted);
        assert!(rep.get(AssumptionId::StrictMonotone).unwrap().passed);
    }

    #[test]
    fn prototype_sum_coercive_with_half() {
        let rep = sample_assumptions(&reference(), &small());
        let e = rep.get(AssumptionId::SumCoercive).unwrap();
        assert!(e.passed && e.fitted >= 0.5);
    }

    #[test]
    fn same_matrices_have_unit_range_ratio() {
        let rep = sample_assumptions(&reference(), &small());
        let e = rep.get(AssumptionId::SameRange).unwrap();
        assert!(e.passed);
        assert!((e.fitted - 1.0).abs() < 1e-12);
    }

    #[test]
    fn report_is_deterministic_for_a_seed() {
        let a = sample_assumptions(&reference(), &small());
        let b = sample_assumptions(&reference(), &small());
        assert_eq!(a, b);
    }

    /// `b1(m) = e^m`, otherwise the prototype.
    struct ExpFactor(PrototypeModel);

    impl GameModel for ExpFactor {
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
        fn control_matrix(&self, p: usize, t: f64, x: &[f64], out: &mut [f64]) {
            self.0.control_matrix(p, t, x, out)
        }
    }

    #[test]
    fn exponential_factor_violates_smallness() {
        let mut c = ModelConstants::new(1, 1, 1);
        c.gamma = 0.01;
        let model = ExpFactor(PrototypeModel::with_defaults(c).unwrap());
        let rep = sample_assumptions(&model, &small());
        let e = rep.get(AssumptionId::Smallness).unwrap();
        assert!(!e.passed);
        let w = e.witness.as_ref().unwrap();
        // m e^m > 0.01 e^m at the witness
        assert!(w.m * w.m.exp() > 0.01 * w.m.exp());
    }

    #[test]
    fn declared_bound_is_enforced() {
        let mut c = ModelConstants::new(1, 1, 1);
        c.k_bound = Some(1.0);
        let rep = sample_assumptions(&PrototypeModel::with_defaults(c).unwrap(), &small());
        // f = 2K at m = v = 0 exceeds K m^{2 s0} = 1
        let e = rep.get(AssumptionId::PayoffGrowth).unwrap();
        assert!(!e.passed && e.fitted > 1.0);
        let w = e.witness.as_ref().unwrap();
        assert!(w.m >= 0.0);
    }
}
