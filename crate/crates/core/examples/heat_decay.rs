//! With no drift the forward and backward solvers reduce to the heat
//! equation; compare with the decaying Fourier mode.

use std::f64::consts::PI;

use mfgb::grid::{DensityTrajectory, FieldTrajectory, GridSpec, MultiField, ScalarField};
use mfgb::model::{ModelConstants, PrototypeModel};
use mfgb::pde::{solve_backward, solve_forward};

fn main() -> mfgb::error::Result<()> {
    let t = 0.05;
    let decay = (-4.0 * PI * PI * t).exp();
    // A = 0 removes the drift; the prototype Lagrangian is then the constant 2.
    let model = PrototypeModel::with_defaults(ModelConstants::new(1, 1, 1))?.with_matrices(vec![vec![0.0]])?;

    println!("{:>6} {:>6} {:>12} {:>12}", "n", "nt", "fwd err", "bwd err");
    for (n, nt) in [(32, 50), (64, 50), (128, 50), (128, 100)] {
        let grid = GridSpec::new(1, n, t, nt)?;
        let profile = |x: &[f64]| 1.0 + 0.5 * (2.0 * PI * x[0]).sin();
        let exact = ScalarField::from_fn(grid, |x| 1.0 + 0.5 * decay * (2.0 * PI * x[0]).sin());
        let err = |f: &ScalarField| f.axpy(-1.0, &exact).values().iter().map(|x| x * x).sum::<f64>().sqrt()
            / exact.values().iter().map(|x| x * x).sum::<f64>().sqrt();

        let m = solve_forward(&model, &FieldTrajectory::zeros(grid, 1), &ScalarField::from_fn(grid, profile))?;
        let u_t = MultiField::new(vec![ScalarField::from_fn(grid, profile)])?;
        let u = solve_backward(&model, &DensityTrajectory::constant(grid, 0.0), &FieldTrajectory::zeros(grid, 1), &u_t)?;
        // subtract the uniform source 2t accumulated by the backward march
        let u0 = u.slice(0).component(0).map(|x| x - 2.0 * t);
        println!("{n:>6} {nt:>6} {:>12.4e} {:>12.4e}", err(m.last()), err(&u0));
    }
    Ok(())
}
