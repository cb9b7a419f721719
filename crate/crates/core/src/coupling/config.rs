use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::StepScheme;

/// Parameters of the Picard iteration and the pointwise Newton solves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Damping `theta` in `v <- (1 - theta) v + theta v_best`.
    pub theta: f64,
    pub picard_tol: f64,
    pub max_picard: usize,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub seed: u64,
    /// Fail with [`Error::Gate`] instead of warning when a parameter gate fails.
    #[serde(default)]
    pub strict_gates: bool,
    #[serde(skip)]
    pub scheme: StepScheme,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            theta: 0.5,
            picard_tol: 1e-8,
            max_picard: 200,
            newton_tol: 1e-12,
            max_newton: 50,
            seed: 0,
            strict_gates: false,
            scheme: StepScheme::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("theta must lie in (0,1], got {}", self.theta)));
        }
        for (name, tol) in [("picard_tol", self.picard_tol), ("newton_tol", self.newton_tol)] {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {tol}")));
            }
        }
        if self.max_picard == 0 || self.max_newton == 0 {
            return Err(Error::Config("iteration caps must be at least 1".into()));
        }
        Ok(())
    }
}
