//! Gateaux derivative of each player's cost at a computed equilibrium and
//! the linearized density oracle.

use std::f64::consts::PI;

use mfgb::coupling::{picard_solve, SolverConfig};
use mfgb::grid::{GridSpec, MultiField, ScalarField};
use mfgb::model::{ModelConstants, PrototypeModel};
use mfgb::verify::{gateaux_check, linearized_oracle, observed_orders, smooth_direction};

fn main() -> mfgb::error::Result<()> {
    let model = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1))?;
    for n in [32, 64, 128] {
        let grid = GridSpec::new(1, n, 1.0, 2 * n)?;
        let m0 = ScalarField::from_fn(grid, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin());
        let u_t = MultiField::new(vec![
            ScalarField::from_fn(grid, |x| 0.2 * (2.0 * PI * x[0]).cos()),
            ScalarField::from_fn(grid, |x| -0.1 * (2.0 * PI * x[0]).sin()),
        ])?;
        let state = picard_solve(&model, &m0, &u_t, &SolverConfig::default())?;
        let z = smooth_direction(&grid, 1);
        let est = gateaux_check(&model, &state, &[(0, z.clone()), (1, z.clone())], 1e-3)?;
        print!("n = {n:>3}:");
        for e in &est {
            print!("  player {} dJ/ds {:+.4e} (normalized {:.2e})", e.player, e.derivative, e.normalized);
        }
        println!();
        if n == 64 {
            let errs = linearized_oracle(&model, &state, 0, &z, &[1e-2, 1e-3, 1e-4])?;
            println!("  linearized gaps {errs:?}, orders {:?}", observed_orders(&errs));
        }
    }
    Ok(())
}
