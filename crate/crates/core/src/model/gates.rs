//! Parameter gates of the a-priori estimate and the prototype smallness
//! condition, evaluated in exact rational arithmetic on the binary values of
//! the constants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::constants::ModelConstants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateId {
    /// `sigma = r - 2s + 1 >= 1`.
    Sigma,
    /// `r >= 2s`.
    RateOrder,
    /// The minimum of the two exponent ratios lies in `[0, 1)`.
    ExponentRatio,
    /// `s < r / (2N)` for the prototype.
    PrototypeSmallness,
    /// `gamma <= C0 / (2 (C1^2 + N^2))`.
    GammaBound,
}

impl GateId {
    pub fn label(&self) -> &'static str {
        match self {
            GateId::Sigma => "sigma",
            GateId::RateOrder => "r>=2s",
            GateId::ExponentRatio => "exponent_ratio",
            GateId::PrototypeSmallness => "s<r/(2N)",
            GateId::GammaBound => "gamma_bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateEntry {
    pub id: GateId,
    pub passed: bool,
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateReport {
    pub sigma: f64,
    pub entries: Vec<GateEntry>,
}

impl GateReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn get(&self, id: GateId) -> Option<&GateEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GateEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("gate constants are finite")
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn pos(x: BigRational) -> BigRational {
    if x.is_negative() {
        BigRational::zero()
    } else {
        x
    }
}

trait Sign {
    fn is_negative(&self) -> bool;
    fn is_positive(&self) -> bool;
}

impl Sign for BigRational {
    fn is_negative(&self) -> bool {
        *self < BigRational::zero()
    }

    fn is_positive(&self) -> bool {
        *self > BigRational::zero()
    }
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// The two exponent ratios whose minimum must lie below one; `None` where
/// the denominator is not positive.
pub fn exponent_ratios(constants: &ModelConstants) -> [Option<f64>; 2] {
    let (first, second) = exponent_ratios_exact(constants);
    [first.as_ref().map(to_f64), second.as_ref().map(to_f64)]
}

fn exponent_ratios_exact(c: &ModelConstants) -> (Option<BigRational>, Option<BigRational>) {
    let (s0, d) = (rat(c.s0), int(c.dim as i64));
    let sigma = rat(c.r) - int(2) * rat(c.s) + int(1);
    let dp2 = d.clone() + int(2);
    let base = sigma.clone() * dp2.clone() - d;

    let num1 = int(4) * pos(int(2) * s0.clone() * dp2.clone() - int(1));
    let den1 = base.clone() - pos(int(2) * s0.clone() - sigma + int(1)) * dp2.clone();
    let first = den1.is_positive().then(|| num1 / den1);

    let num2 = int(2) * s0 * dp2;
    let second = base.is_positive().then(|| num2 / base);
    (first, second)
}

/// Evaluates every parameter gate. The prototype gate is included when
/// `prototype` is set.
pub fn check_gates(constants: &ModelConstants, prototype: bool) -> GateReport {
    let c = constants;
    let (r, s) = (rat(c.r), rat(c.s));
    let two_s = int(2) * s.clone();
    let sigma = r.clone() - two_s.clone() + int(1);
    let mut entries = Vec::new();

    entries.push(GateEntry {
        id: GateId::Sigma,
        passed: sigma >= int(1),
        value: to_f64(&sigma),
        detail: "sigma = r - 2s + 1 must be at least 1".into(),
    });

    entries.push(GateEntry {
        id: GateId::RateOrder,
        passed: r >= two_s,
        value: to_f64(&(r.clone() - two_s)),
        detail: "r - 2s must be nonnegative".into(),
    });

    let (first, second) = exponent_ratios_exact(c);
    let min = match (&first, &second) {
        (Some(a), Some(b)) => Some(if a < b { a.clone() } else { b.clone() }),
        (Some(a), None) | (None, Some(a)) => Some(a.clone()),
        (None, None) => None,
    };
    let (passed, value) = match &min {
        Some(m) => (!m.is_negative() && *m < int(1), to_f64(m)),
        None => (false, f64::NAN),
    };
    entries.push(GateEntry {
        id: GateId::ExponentRatio,
        passed,
        value,
        detail: format!(
            "min of exponent ratios ({}, {}) must lie in [0,1)",
            first.as_ref().map_or("undefined".to_string(), |x| format!("{}", to_f64(x))),
            second.as_ref().map_or("undefined".to_string(), |x| format!("{}", to_f64(x))),
        ),
    });

    if prototype {
        let n2 = int(2 * c.players as i64);
        let passed = n2.clone() * s < r.clone();
        let bound = to_f64(&(r / n2));
        entries.push(GateEntry {
            id: GateId::PrototypeSmallness,
            passed,
            value: bound,
            detail: format!("s = {} {} r/(2N) = {bound}", c.s, if passed { "<" } else { ">=" }),
        });
    }

    let bound = rat(c.c0) / (int(2) * (rat(c.c1) * rat(c.c1) + int((c.players * c.players) as i64)));
    entries.push(GateEntry {
        id: GateId::GammaBound,
        passed: rat(c.gamma) <= bound,
        value: to_f64(&bound),
        detail: format!("gamma = {} must not exceed C0/(2(C1^2+N^2))", c.gamma),
    });

    GateReport { sigma: to_f64(&sigma), entries }
}
