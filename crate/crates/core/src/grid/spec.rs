use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 2;

/// Uniform periodic grid on the unit cube `(0,1)^d` together with a uniform
/// time axis on `[0, T]`.
///
/// Nodes sit at `x_k = i_k * h`, `i_k = 0..n`, and are stored in row-major
/// order (axis 0 varies slowest).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub horizon: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, horizon: f64, steps: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::domain(format!("dimension must be 1 or 2, got {dim}")));
        }
        if n < 4 {
            return Err(Error::domain(format!("need at least 4 points per axis, got {n}")));
        }
        if steps < 1 {
            return Err(Error::domain("need at least one time step"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::domain(format!("horizon must be positive, got {horizon}")));
        }
        Ok(Self { dim, n, horizon, steps })
    }

    #[inline]
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Number of spatial nodes, `n^d`.
    #[inline]
    pub fn nodes(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Quadrature weight of a single node, `h^d`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.horizon * k as f64 / self.steps as f64
    }

    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    /// Integer index of `node` along `axis`.
    #[inline]
    pub fn axis_index(&self, node: usize, axis: usize) -> usize {
        (node / self.stride(axis)) % self.n
    }

    /// Periodic neighbour of `node` shifted by `offset` along `axis`.
    #[inline]
    pub fn neighbor(&self, node: usize, axis: usize, offset: isize) -> usize {
        let n = self.n as isize;
        let i = self.axis_index(node, axis) as isize;
        let j = (i + offset).rem_euclid(n);
        let stride = self.stride(axis) as isize;
        (node as isize + (j - i) * stride) as usize
    }

    /// Coordinates of `node`; entries beyond `dim` are zero.
    #[inline]
    pub fn coords(&self, node: usize) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        let h = self.h();
        for (axis, xk) in x.iter_mut().enumerate().take(self.dim) {
            *xk = self.axis_index(node, axis) as f64 * h;
        }
        x
    }

    /// Trapezoidal weights in time for slices `0..=steps`.
    pub fn time_weights(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.steps)
            .map(|k| if k == 0 || k == self.steps { 0.5 * dt } else { dt })
            .collect()
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::shape(format!("grid mismatch: {self:?} vs {other:?}")));
        }
        Ok(())
    }
}
