//! Solve the coupled two-player reference game and dump the result.

use std::f64::consts::PI;
use std::fs::File;

use mfgb::coupling::{picard_solve, write_history_csv, SolverConfig};
use mfgb::grid::io::FieldDump;
use mfgb::grid::{GridSpec, MultiField, ScalarField};
use mfgb::model::{ModelConstants, PrototypeModel};

fn main() -> mfgb::error::Result<()> {
    env_logger::init();
    let grid = GridSpec::new(1, 64, 1.0, 128)?;
    let model = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1))?;
    let m0 = ScalarField::from_fn(grid, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin());
    let u_t = MultiField::new(vec![
        ScalarField::from_fn(grid, |x| 0.2 * (2.0 * PI * x[0]).cos()),
        ScalarField::from_fn(grid, |x| -0.1 * (2.0 * PI * x[0]).sin()),
    ])?;

    let state = picard_solve(&model, &m0, &u_t, &SolverConfig::default())?;
    for row in &state.history {
        println!(
            "{:>3}  residual {:.3e}  dm {:.3e}  du {:.3e}  dv {:.3e}",
            row.iteration, row.residual, row.dm_rel, row.du_rel, row.dv_rel
        );
    }
    println!("min density {:.4}, max |v| {:.4}", state.m.min(), state.v.max_abs());

    let dir = std::env::temp_dir().join("mfgb-example");
    std::fs::create_dir_all(&dir)?;
    FieldDump::from_density_trajectory(&state.m).write_to(File::create(dir.join("m.mfgb"))?)?;
    write_history_csv(File::create(dir.join("history.csv"))?, &state.history)?;
    println!("wrote {}", dir.display());
    Ok(())
}
