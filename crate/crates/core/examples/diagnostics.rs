//! A-priori estimate quantities under refinement, and the sampled
//! Lagrangian inequality constants.

use std::f64::consts::PI;

use mfgb::coupling::{picard_solve, SolverConfig};
use mfgb::grid::{GridSpec, MultiField, ScalarField};
use mfgb::model::{ModelConstants, PrototypeModel};
use mfgb::verify::{lemma_sample, run_diagnostics, LemmaConfig, LemmaSource};

fn main() -> mfgb::error::Result<()> {
    let model = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1))?;
    let mut reports = Vec::new();
    for (n, nt) in [(32, 32), (64, 128)] {
        let grid = GridSpec::new(1, n, 1.0, nt)?;
        let m0 = ScalarField::from_fn(grid, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin());
        let u_t = MultiField::new(vec![ScalarField::from_fn(grid, |x| 0.2 * (2.0 * PI * x[0]).cos()); 2])?;
        let state = picard_solve(&model, &m0, &u_t, &SolverConfig::default())?;
        let mut diag = run_diagnostics(&model, &state);
        diag.lemma = Some(lemma_sample(&model, LemmaSource::State(&state), &LemmaConfig::default())?);
        reports.push(diag);
    }
    for ((name, a), (_, b)) in reports[0].estimate_quantities().into_iter().zip(reports[1].estimate_quantities()) {
        println!("{name:<22} {a:>12.5e} {b:>12.5e}  ratio {:.3}", b / a);
    }
    reports[1].write_text(std::io::stdout())?;
    Ok(())
}
