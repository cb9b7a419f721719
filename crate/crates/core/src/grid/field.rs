use std::ops::Index;

use super::spec::GridSpec;
use crate::error::{Error, Result};

/// One real value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes() {
            return Err(Error::shape(format!(
                "expected {} values, got {}",
                grid.nodes(),
                values.len()
            )));
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite value at node {p}")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.nodes());
        Self { grid, values }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self { grid, values: vec![c; grid.nodes()] }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.nodes())
            .map(|p| {
                let x = grid.coords(p);
                f(&x[..grid.dim])
            })
            .collect();
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// `h^d * sum(f)`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &ScalarField) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect();
        Self { grid: self.grid, values }
    }

    /// Shifts the field by `offset` nodes along `axis` (periodically).
    pub fn shifted(&self, axis: usize, offset: isize) -> Self {
        let values = (0..self.grid.nodes())
            .map(|p| self.values[self.grid.neighbor(p, axis, offset)])
            .collect();
        Self { grid: self.grid, values }
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;

    #[inline]
    fn index(&self, node: usize) -> &f64 {
        &self.values[node]
    }
}

/// `k` scalar components on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiField {
    grid: GridSpec,
    components: Vec<ScalarField>,
}

impl MultiField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let grid = *components
            .first()
            .ok_or_else(|| Error::shape("multi-field needs at least one component"))?
            .grid();
        for c in &components {
            grid.check_same(c.grid())?;
        }
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: GridSpec, k: usize) -> Self {
        Self { grid, components: vec![ScalarField::zeros(grid); k] }
    }

    pub fn constant(grid: GridSpec, k: usize, c: f64) -> Self {
        Self { grid, components: vec![ScalarField::constant(grid, c); k] }
    }

    /// Builds a field from node-major data: `data[node * k + c]`.
    pub(crate) fn from_node_major(grid: GridSpec, k: usize, data: &[f64]) -> Self {
        let nodes = grid.nodes();
        debug_assert_eq!(data.len(), nodes * k);
        let components = (0..k)
            .map(|c| {
                let values = (0..nodes).map(|p| data[p * k + c]).collect();
                ScalarField::from_vec_unchecked(grid, values)
            })
            .collect();
        Self { grid, components }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.components.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    #[inline]
    pub fn component(&self, c: usize) -> &ScalarField {
        &self.components[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut ScalarField {
        &mut self.components[c]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    /// Copies the `k` values at `node` into `out`.
    #[inline]
    pub fn gather(&self, node: usize, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.values[node];
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |a, c| a.max(c.max_abs()))
    }

    /// Componentwise `self + a * other`.
    pub fn axpy(&self, a: f64, other: &MultiField) -> Self {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| x.axpy(a, y))
            .collect();
        Self { grid: self.grid, components }
    }

    /// Sum of squares over components and nodes, weighted by `h^d`.
    pub fn sq_norm(&self) -> f64 {
        let w = self.grid.cell_volume();
        self.components
            .iter()
            .map(|c| w * c.values.iter().map(|v| v * v).sum::<f64>())
            .sum()
    }
}

/// Fields at the time nodes `t_k = k dt`, `k = 0..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<F> {
    grid: GridSpec,
    slices: Vec<F>,
}

pub type DensityTrajectory = Trajectory<ScalarField>;
pub type FieldTrajectory = Trajectory<MultiField>;

impl<F> Trajectory<F> {
    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn slice(&self, k: usize) -> &F {
        &self.slices[k]
    }

    pub fn slices(&self) -> &[F] {
        &self.slices
    }

    pub fn last(&self) -> &F {
        self.slices.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }
}

impl Trajectory<ScalarField> {
    pub fn new(grid: GridSpec, slices: Vec<ScalarField>) -> Result<Self> {
        if slices.len() != grid.steps + 1 {
            return Err(Error::shape(format!(
                "trajectory needs {} slices, got {}",
                grid.steps + 1,
                slices.len()
            )));
        }
        for s in &slices {
            grid.check_same(s.grid())?;
        }
        Ok(Self { grid, slices })
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self { grid, slices: vec![ScalarField::constant(grid, c); grid.steps + 1] }
    }

    pub fn min(&self) -> f64 {
        self.slices.iter().map(ScalarField::min).fold(f64::INFINITY, f64::min)
    }

    /// `L^2(Q)` norm: node sum in space, trapezoid in time.
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.cell_volume();
        self.grid
            .time_weights()
            .iter()
            .zip(&self.slices)
            .map(|(wt, s)| wt * w * s.values.iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    pub fn diff_l2(&self, other: &Self) -> f64 {
        let slices = self.slices.iter().zip(&other.slices).map(|(a, b)| a.axpy(-1.0, b)).collect();
        Trajectory { grid: self.grid, slices }.l2_norm()
    }

    /// `self + a * other`, slice by slice.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        let slices = self.slices.iter().zip(&other.slices).map(|(x, y)| x.axpy(a, y)).collect();
        Trajectory { grid: self.grid, slices }
    }
}

impl Trajectory<MultiField> {
    pub fn new(grid: GridSpec, slices: Vec<MultiField>) -> Result<Self> {
        if slices.len() != grid.steps + 1 {
            return Err(Error::shape(format!(
                "trajectory needs {} slices, got {}",
                grid.steps + 1,
                slices.len()
            )));
        }
        let k = slices[0].len();
        for s in &slices {
            grid.check_same(s.grid())?;
            if s.len() != k {
                return Err(Error::shape("trajectory slices have differing component counts"));
            }
        }
        Ok(Self { grid, slices })
    }

    pub fn zeros(grid: GridSpec, k: usize) -> Self {
        Self { grid, slices: vec![MultiField::zeros(grid, k); grid.steps + 1] }
    }

    pub fn components(&self) -> usize {
        self.slices[0].len()
    }

    pub fn max_abs(&self) -> f64 {
        self.slices.iter().fold(0.0, |a, s| a.max(s.max_abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.grid
            .time_weights()
            .iter()
            .zip(&self.slices)
            .map(|(wt, s)| wt * s.sq_norm())
            .sum::<f64>()
            .sqrt()
    }

    pub fn diff_l2(&self, other: &Self) -> f64 {
        let slices = self.slices.iter().zip(&other.slices).map(|(a, b)| a.axpy(-1.0, b)).collect();
        Trajectory { grid: self.grid, slices }.l2_norm()
    }

    /// `self + a * other`, slice by slice.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        let slices = self.slices.iter().zip(&other.slices).map(|(x, y)| x.axpy(a, y)).collect();
        Trajectory { grid: self.grid, slices }
    }

    /// `(1 - theta) * self + theta * other`.
    pub fn relax(&self, theta: f64, other: &Self) -> Self {
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| a.axpy(theta, &b.axpy(-1.0, a)))
            .collect();
        Trajectory { grid: self.grid, slices }
    }
}

impl<F> Index<usize> for Trajectory<F> {
    type Output = F;

    fn index(&self, k: usize) -> &F {
        &self.slices[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length_and_nan() {
        let g = GridSpec::new(1, 8, 1.0, 2).unwrap();
        assert!(ScalarField::new(g, vec![0.0; 7]).is_err());
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(ScalarField::new(g, v).is_err());
    }

    #[test]
    fn shift_by_n_is_identity() {
        let g = GridSpec::new(2, 6, 1.0, 1).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0] * 3.0 + x[1] * x[1]);
        for axis in 0..2 {
            assert_eq!(f.shifted(axis, 6), f);
            assert_eq!(f.shifted(axis, 2).shifted(axis, -2), f);
        }
    }

    #[test]
    fn trajectory_slice_count_is_checked() {
        let g = GridSpec::new(1, 8, 1.0, 3).unwrap();
        let s = ScalarField::zeros(g);
        assert!(DensityTrajectory::new(g, vec![s.clone(); 3]).is_err());
        assert!(DensityTrajectory::new(g, vec![s; 4]).is_ok());
    }

    #[test]
    fn relax_interpolates() {
        let g = GridSpec::new(1, 4, 1.0, 1).unwrap();
        let a = FieldTrajectory::zeros(g, 2);
        let b = Trajectory {
            grid: g,
            slices: vec![MultiField::constant(g, 2, 4.0); 2],
        };
        let c = a.relax(0.25, &b);
        assert!((c[1].component(1)[2] - 1.0).abs() < 1e-15);
    }
}
