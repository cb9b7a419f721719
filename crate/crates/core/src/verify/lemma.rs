//! Sampled constants of the algebraic Lagrangian inequalities: sum
//! coerciveness, the `eps0`-upper bound, and the global bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coupling::{feedback_solve, SolutionState, SolverConfig};
use crate::error::Result;
use crate::model::{pow0, GameModel};
use crate::pde::{eval_lagrangian, node_gradients, node_major};

/// Where the `(m, v, grad u)` triples come from.
#[derive(Debug, Clone, Copy)]
pub enum LemmaSource<'a> {
    /// Node values of a solved state; they satisfy the compatibility
    /// condition up to the solver tolerance.
    State(&'a SolutionState),
    /// Random `(m, grad u)` with `v` from the feedback map.
    Random { m_max: f64, grad_radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaConfig {
    pub samples: usize,
    pub seed: u64,
    /// Weight of the sum in the upper bound; defaults to `1/(4N)`.
    pub eps0: Option<f64>,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self { samples: 10_000, seed: 0, eps0: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaWitness {
    pub t: f64,
    pub x: Vec<f64>,
    pub m: f64,
    pub v: Vec<f64>,
    pub grad_u: Vec<f64>,
}

/// Smallest constant that makes one inequality hold over the sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityFit {
    /// Fit over all `2n` samples.
    pub constant: f64,
    /// Fit over the first `n` samples.
    pub constant_half: f64,
    /// `constant <= 2 * constant_half` (up to `1e-12`).
    pub stable: bool,
    pub witness: Option<LemmaWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    /// Total number of triples, twice the configured count.
    pub samples: usize,
    pub eps0: f64,
    pub sum_coercive: InequalityFit,
    pub upper_bound: InequalityFit,
    pub global_bound: InequalityFit,
}

impl LemmaReport {
    pub fn stable(&self) -> bool {
        self.sum_coercive.stable && self.upper_bound.stable && self.global_bound.stable
    }
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Required constants `[C_sum, C_upper, C_global]` at one triple.
fn required(model: &dyn GameModel, w: &LemmaWitness, eps0: f64) -> Result<[f64; 3]> {
    let c = model.constants();
    let (n, d) = (c.players, c.dim);
    let m = w.m;
    let l = eval_lagrangian(model, w.t, &w.x, m, &w.v, &w.grad_u)?;
    let rho = 1.0 + (pow0(m, 2.0 * c.s) + 1.0) / (pow0(m, c.r) + 1.0);
    let base = 1.0 + pow0(m, 2.0 * c.s0);
    let v_sq = sq(&w.v);
    let sum_l: f64 = l.iter().sum();

    let grad_sum: Vec<f64> = (0..d).map(|k| (0..n).map(|i| w.grad_u[i * d + k]).sum()).collect();
    let deficit = 0.5 * c.c0 * (pow0(m, c.r) + 1.0) * v_sq - sum_l;
    let c_sum = (deficit / (base + sq(&grad_sum) * rho)).max(0.0);

    let mut c_upper: f64 = 0.0;
    let mut c_global: f64 = 0.0;
    let global_den = base + (1.0 + pow0(m, c.r)) * v_sq + sq(&w.grad_u) * rho;
    for i in 0..n {
        let mixed: Vec<f64> = (0..d).map(|k| w.grad_u[i * d + k] - eps0 * grad_sum[k]).collect();
        let excess = l[i] - eps0 * sum_l;
        c_upper = c_upper.max((excess / (base + sq(&mixed) * rho)).max(0.0));
        c_global = c_global.max(l[i].abs() / global_den);
    }
    Ok([c_sum, c_upper, c_global])
}

fn draw(model: &dyn GameModel, source: LemmaSource<'_>, count: usize, rng: &mut ChaCha8Rng) -> Vec<Option<LemmaWitness>> {
    let c = model.constants();
    let d = c.dim;
    match source {
        LemmaSource::State(state) => {
            let grid = *state.m.grid();
            let nodes = grid.nodes();
            let picks: Vec<(usize, usize)> =
                (0..count).map(|_| (rng.gen_range(0..=grid.steps), rng.gen_range(0..nodes))).collect();
            let (nm, nd) = (c.control_len(), c.players * d);
            picks
                .into_iter()
                .map(|(k, p)| {
                    let x = grid.coords(p);
                    let vs = node_major(state.v.slice(k));
                    let gs = node_gradients(state.u.slice(k));
                    Some(LemmaWitness {
                        t: grid.time(k),
                        x: x[..d].to_vec(),
                        m: state.m.slice(k)[p].max(0.0),
                        v: vs[p * nm..(p + 1) * nm].to_vec(),
                        grad_u: gs[p * nd..(p + 1) * nd].to_vec(),
                    })
                })
                .collect()
        }
        LemmaSource::Random { m_max, grad_radius } => (0..count)
            .map(|_| {
                let t = rng.gen::<f64>();
                let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                let m = rng.gen_range(0.0..=m_max);
                let grad_u: Vec<f64> =
                    (0..c.players * d).map(|_| rng.gen_range(-grad_radius..=grad_radius)).collect();
                let v = feedback_solve(model, t, &x, m, &grad_u, &SolverConfig::default()).ok()?;
                Some(LemmaWitness { t, x, m, v, grad_u })
            })
            .collect(),
    }
}

/// Fits the three inequality constants over `2 * cfg.samples` triples and
/// checks that they do not grow by more than a factor two relative to the
/// first half.
pub fn lemma_sample(model: &dyn GameModel, source: LemmaSource<'_>, cfg: &LemmaConfig) -> Result<LemmaReport> {
    let n_players = model.constants().players;
    let eps0 = cfg.eps0.unwrap_or(1.0 / (4.0 * n_players as f64));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<LemmaWitness> = draw(model, source, 2 * cfg.samples, &mut rng).into_iter().flatten().collect();
    let values: Vec<[f64; 3]> = points.par_iter().map(|w| required(model, w, eps0)).collect::<Result<_>>()?;
    let half = points.len() / 2;

    let fit = |col: usize| {
        let mut best: Option<(usize, f64)> = None;
        let mut half_best: f64 = 0.0;
        for (q, v) in values.iter().enumerate() {
            if best.is_none_or(|(_, b)| v[col] > b) {
                best = Some((q, v[col]));
            }
            if q < half {
                half_best = half_best.max(v[col]);
            }
        }
        let (idx, constant) = best.unwrap_or((0, 0.0));
        InequalityFit {
            constant,
            constant_half: half_best,
            stable: constant <= 2.0 * half_best + 1e-12,
            witness: points.get(idx).cloned(),
        }
    };

    Ok(LemmaReport {
        samples: points.len(),
        eps0,
        sum_coercive: fit(0),
        upper_bound: fit(1),
        global_bound: fit(2),
    })
}
