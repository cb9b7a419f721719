use super::lagrangian::lagrangian_field;
use super::linear::solve_helmholtz;
use super::scheme::StepScheme;
use crate::error::{Error, Result};
use crate::grid::{laplacian, DensityTrajectory, FieldTrajectory, MultiField, ScalarField};
use crate::model::GameModel;

/// One backward step `u_k = u_{k+1} + dt (Lap u_k + L_k)`.
pub fn bellman_step(u_next: &MultiField, l: &MultiField, scheme: StepScheme) -> Result<MultiField> {
    let grid = *u_next.grid();
    grid.check_same(l.grid())?;
    if u_next.len() != l.len() {
        return Err(Error::shape("value field and Lagrangian differ in component count"));
    }
    scheme.check(&grid)?;
    let dt = grid.dt();
    let components = u_next
        .components()
        .iter()
        .zip(l.components())
        .map(|(u, li)| {
            let rhs = u.axpy(dt, li);
            if scheme.implicit_diffusion {
                Ok(ScalarField::from_vec_unchecked(grid, solve_helmholtz(&grid, dt, rhs.values())?))
            } else {
                Ok(rhs.axpy(dt, &laplacian(u)))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    MultiField::new(components)
}

/// Backward march from the terminal data `u_T`; the Lagrangian of step `k`
/// uses the data of slice `k+1`.
pub fn solve_backward(
    model: &dyn GameModel,
    m: &DensityTrajectory,
    v: &FieldTrajectory,
    u_t: &MultiField,
) -> Result<FieldTrajectory> {
    solve_backward_with(model, m, v, u_t, StepScheme::default())
}

pub fn solve_backward_with(
    model: &dyn GameModel,
    m: &DensityTrajectory,
    v: &FieldTrajectory,
    u_t: &MultiField,
    scheme: StepScheme,
) -> Result<FieldTrajectory> {
    let grid = *m.grid();
    grid.check_same(v.grid())?;
    grid.check_same(u_t.grid())?;
    let players = model.constants().players;
    if u_t.len() != players {
        return Err(Error::shape(format!("terminal data has {} components, expected {players}", u_t.len())));
    }
    super::forward::check_controls(model, v.slice(0))?;
    let mut rev = Vec::with_capacity(grid.steps + 1);
    rev.push(u_t.clone());
    for k in (0..grid.steps).rev() {
        let u_next = rev.last().expect("non-empty");
        let l = lagrangian_field(model, grid.time(k + 1), m.slice(k + 1), v.slice(k + 1), u_next)?;
        let u_k = bellman_step(u_next, &l, scheme)?;
        rev.push(u_k);
    }
    rev.reverse();
    FieldTrajectory::new(grid, rev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::model::{ModelConstants, PrototypeModel};

    #[test]
    fn uniform_source_adds_dt() {
        let grid = GridSpec::new(1, 16, 1.0, 50).unwrap();
        let u = MultiField::zeros(grid, 1);
        let l = MultiField::constant(grid, 1, 1.0);
        let out = bellman_step(&u, &l, StepScheme::default()).unwrap();
        assert!(out.component(0).values().iter().all(|x| (x - 0.02).abs() < 1e-15));
    }

    #[test]
    fn unforced_prototype_grows_linearly() {
        let grid = GridSpec::new(1, 16, 0.5, 25).unwrap();
        let p = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1)).unwrap();
        let m = DensityTrajectory::constant(grid, 1.0);
        let v = FieldTrajectory::zeros(grid, 2);
        let u_t = MultiField::constant(grid, 2, 3.0);
        let u = solve_backward(&p, &m, &v, &u_t).unwrap();
        for k in 0..=grid.steps {
            let expected = 3.0 + 2.0 * (grid.horizon - grid.time(k));
            for c in u.slice(k).components() {
                assert!(c.values().iter().all(|x| (x - expected).abs() < 1e-12));
            }
        }
    }
}
