use rayon::prelude::*;

use super::lagrangian::node_major;
use super::linear::solve_helmholtz;
use super::scheme::StepScheme;
use crate::error::{Error, Result};
use crate::grid::{div_upwind, laplacian, DensityTrajectory, FieldTrajectory, MultiField, ScalarField};
use crate::model::{drift_velocity, GameModel};

/// Densities below this are treated as rounding noise rather than input errors.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

pub(crate) fn check_controls(model: &dyn GameModel, v: &MultiField) -> Result<()> {
    let expected = model.constants().control_len();
    if v.len() != expected {
        return Err(Error::shape(format!("controls have {} components, expected {expected}", v.len())));
    }
    Ok(())
}

pub(crate) fn check_density(m: &ScalarField) -> Result<()> {
    let min = m.min();
    if min < -NEGATIVE_TOLERANCE {
        return Err(Error::domain(format!("density must be nonnegative, min is {min:e}")));
    }
    Ok(())
}

/// Drift `g(t, x, m(x), v(x))` at every node.
pub fn drift_field(model: &dyn GameModel, t: f64, m: &ScalarField, v: &MultiField) -> MultiField {
    let grid = *m.grid();
    let c = model.constants();
    let (d, nm, mm) = (grid.dim, c.control_len(), c.control_dim);
    let vs = node_major(v);
    let data: Vec<f64> = (0..grid.nodes())
        .into_par_iter()
        .flat_map_iter(|p| {
            let x = grid.coords(p);
            let mut a = vec![0.0; d * mm];
            let mut g = vec![0.0; d];
            drift_velocity(model, t, &x[..d], m[p].max(0.0), &vs[p * nm..(p + 1) * nm], &mut a, &mut g);
            g
        })
        .collect();
    MultiField::from_node_major(grid, d, &data)
}

/// Advances the density by one step of the IMEX scheme with drift frozen at
/// `(t, m_k, v_k)`.
pub fn fp_step(
    model: &dyn GameModel,
    m_k: &ScalarField,
    v_k: &MultiField,
    t: f64,
    scheme: StepScheme,
) -> Result<ScalarField> {
    let grid = *m_k.grid();
    grid.check_same(v_k.grid())?;
    check_controls(model, v_k)?;
    check_density(m_k)?;
    scheme.check(&grid)?;
    let dt = grid.dt();
    let g = drift_field(model, t, m_k, v_k);
    let courant = dt * g.max_abs() / grid.h();
    if courant > 1.0 {
        log::warn!("upwind CFL number {courant:.3} exceeds 1 at t = {t}");
    }
    let mut rhs = m_k.axpy(-dt, &div_upwind(m_k, &g));
    if scheme.implicit_diffusion {
        let x = solve_helmholtz(&grid, dt, rhs.values())?;
        Ok(ScalarField::from_vec_unchecked(grid, x))
    } else {
        rhs = rhs.axpy(dt, &laplacian(m_k));
        Ok(rhs)
    }
}

/// Forward march from `m0` with the controls `v` (one slice per time node).
pub fn solve_forward(model: &dyn GameModel, v: &FieldTrajectory, m0: &ScalarField) -> Result<DensityTrajectory> {
    solve_forward_with(model, v, m0, StepScheme::default())
}

pub fn solve_forward_with(
    model: &dyn GameModel,
    v: &FieldTrajectory,
    m0: &ScalarField,
    scheme: StepScheme,
) -> Result<DensityTrajectory> {
    let grid = *v.grid();
    grid.check_same(m0.grid())?;
    let mut slices = Vec::with_capacity(grid.steps + 1);
    slices.push(m0.clone());
    for k in 0..grid.steps {
        let next = fp_step(model, &slices[k], v.slice(k), grid.time(k), scheme)?;
        slices.push(next);
    }
    DensityTrajectory::new(grid, slices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::model::{ModelConstants, PrototypeModel};
    use std::f64::consts::PI;

    fn proto(n_players: usize, d: usize) -> PrototypeModel {
        PrototypeModel::with_defaults(ModelConstants::new(n_players, 1, d)).unwrap()
    }

    #[test]
    fn constant_density_is_steady() {
        let grid = GridSpec::new(1, 32, 1.0, 10).unwrap();
        let p = proto(1, 1);
        let m = ScalarField::constant(grid, 1.0);
        let next = fp_step(&p, &m, &MultiField::zeros(grid, 1), 0.0, StepScheme::default()).unwrap();
        assert!(next.values().iter().all(|x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn mass_is_conserved_with_strong_drift() {
        let grid = GridSpec::new(2, 12, 0.5, 20).unwrap();
        let p = proto(2, 2);
        let m0 = ScalarField::from_fn(grid, |x| 1.0 + (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos());
        let v = MultiField::new(vec![
            ScalarField::from_fn(grid, |x| (2.0 * PI * x[1]).cos()),
            ScalarField::from_fn(grid, |x| -(2.0 * PI * x[0]).sin()),
        ])
        .unwrap();
        let next = fp_step(&p, &m0, &v, 0.0, StepScheme::default()).unwrap();
        assert!((next.integral() - m0.integral()).abs() < 1e-12);
        assert!(next.min() >= -1e-12);
    }

    #[test]
    fn negative_density_is_rejected() {
        let grid = GridSpec::new(1, 8, 1.0, 4).unwrap();
        let p = proto(1, 1);
        let mut m = ScalarField::constant(grid, 1.0);
        m.values_mut()[3] = -0.1;
        assert!(matches!(
            fp_step(&p, &m, &MultiField::zeros(grid, 1), 0.0, StepScheme::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn explicit_mode_checks_step() {
        let grid = GridSpec::new(1, 64, 1.0, 10).unwrap();
        let p = proto(1, 1);
        let m = ScalarField::constant(grid, 1.0);
        let r = fp_step(&p, &m, &MultiField::zeros(grid, 1), 0.0, StepScheme::explicit());
        assert!(matches!(r, Err(Error::Unstable { .. })));
    }
}
