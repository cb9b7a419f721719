use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sizes, growth exponents and structural constants of a game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    /// Number of players `N`.
    pub players: usize,
    /// Control dimension per player `M`.
    pub control_dim: usize,
    /// Spatial dimension `d`.
    pub dim: usize,
    pub r: f64,
    pub s: f64,
    pub s0: f64,
    pub alpha: f64,
    pub k: f64,
    pub c0: f64,
    pub c1: f64,
    pub gamma: f64,
    /// Declared bound for the generic constant `K` in the growth
    /// assumptions. When absent the sampler only checks that the fitted
    /// constant stays bounded as the sampling box grows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_bound: Option<f64>,
}

impl ModelConstants {
    /// Constants with unit structural values, suitable as a starting point.
    pub fn new(players: usize, control_dim: usize, dim: usize) -> Self {
        Self {
            players,
            control_dim,
            dim,
            r: 1.0,
            s: 0.0,
            s0: 0.0,
            alpha: 0.0,
            k: 1.0,
            c0: 0.5,
            c1: 1.0,
            gamma: 0.01,
            k_bound: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::domain(msg));
        if self.players < 1 || self.control_dim < 1 {
            return fail(format!("need N >= 1 and M >= 1, got N={}, M={}", self.players, self.control_dim));
        }
        if !(1..=crate::grid::MAX_DIM).contains(&self.dim) {
            return fail(format!("dimension must be 1 or 2, got {}", self.dim));
        }
        for (name, v) in [("r", self.r), ("s", self.s), ("s0", self.s0)] {
            if !(v.is_finite() && v >= 0.0) {
                return fail(format!("{name} must be a nonnegative real, got {v}"));
            }
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return fail(format!("alpha must lie in [0,1), got {}", self.alpha));
        }
        if !(self.k.is_finite() && self.k > 0.0) || !(self.c0.is_finite() && self.c0 > 0.0) {
            return fail(format!("K and C0 must be positive, got K={}, C0={}", self.k, self.c0));
        }
        if !(self.c1.is_finite() && self.c1 >= 1.0) {
            return fail(format!("C1 must be >= 1, got {}", self.c1));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return fail(format!("gamma must be nonnegative, got {}", self.gamma));
        }
        if let Some(kb) = self.k_bound {
            if !(kb.is_finite() && kb > 0.0) {
                return fail(format!("K_bound must be positive, got {kb}"));
            }
        }
        Ok(())
    }

    /// `sigma = r - 2s + 1`.
    #[inline]
    pub fn sigma(&self) -> f64 {
        self.r - 2.0 * self.s + 1.0
    }

    /// Length of the full control vector, `N * M`.
    #[inline]
    pub fn control_len(&self) -> usize {
        self.players * self.control_dim
    }

    /// Constant used for `K` on the bounding side of inequalities where a
    /// different constant is being fitted.
    #[inline]
    pub fn structural_k(&self) -> f64 {
        self.k_bound.unwrap_or(self.k)
    }
}
