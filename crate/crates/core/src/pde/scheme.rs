use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Time discretisation of the unit diffusion. Drift and Lagrangian terms are
/// always explicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepScheme {
    pub implicit_diffusion: bool,
}

impl Default for StepScheme {
    fn default() -> Self {
        Self::implicit()
    }
}

/// Step-size bounds of a scheme on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub dt: f64,
    /// `h^2 / (4d)`; only binding for explicit diffusion.
    pub diffusion_bound: f64,
    pub implicit_diffusion: bool,
    pub stable: bool,
}

impl StepScheme {
    pub fn implicit() -> Self {
        Self { implicit_diffusion: true }
    }

    pub fn explicit() -> Self {
        Self { implicit_diffusion: false }
    }

    /// Largest stable step of explicit diffusion, `h^2/(2d*2)`.
    pub fn diffusion_bound(grid: &GridSpec) -> f64 {
        grid.h() * grid.h() / (4.0 * grid.dim as f64)
    }

    pub fn report(&self, grid: &GridSpec) -> StabilityReport {
        let bound = Self::diffusion_bound(grid);
        StabilityReport {
            dt: grid.dt(),
            diffusion_bound: bound,
            implicit_diffusion: self.implicit_diffusion,
            stable: self.implicit_diffusion || grid.dt() <= bound,
        }
    }

    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        let rep = self.report(grid);
        if rep.stable {
            Ok(())
        } else {
            Err(Error::Unstable { dt: rep.dt, bound: rep.diffusion_bound })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_bound() {
        let grid = GridSpec::new(2, 10, 1.0, 100).unwrap();
        assert!((StepScheme::diffusion_bound(&grid) - 0.01 / 8.0).abs() < 1e-18);
        assert!(StepScheme::explicit().check(&grid).is_err());
        assert!(StepScheme::implicit().check(&grid).is_ok());
        let fine = GridSpec::new(2, 10, 1.0, 800).unwrap();
        assert!(StepScheme::explicit().check(&fine).is_ok());
    }
}
