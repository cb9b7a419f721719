//! The feedback control and Hamiltonian: closed form for the prototype,
//! Newton for a model without one.

use mfgb::coupling::{feedback_newton, feedback_residual, feedback_solve, hamiltonian, hamiltonian_grad, SolverConfig};
use mfgb::model::{ModelConstants, PrototypeModel, QuarticModel};

fn main() -> mfgb::error::Result<()> {
    let cfg = SolverConfig::default();
    let proto = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1))?;
    let (x, m, grad) = ([0.3], 0.8, [1.0, -0.5]);

    let closed = feedback_solve(&proto, 0.0, &x, m, &grad, &cfg)?;
    let newton = feedback_newton(&proto, 0.0, &x, m, &grad, &cfg)?;
    println!("prototype  closed form {closed:?}");
    println!("prototype  newton      {newton:?}");

    let quartic = QuarticModel::new(proto, 0.5)?;
    let v = feedback_solve(&quartic, 0.0, &x, m, &grad, &cfg)?;
    let res = feedback_residual(&quartic, 0.0, &x, m, &v, &grad)?;
    println!("quartic    newton      {v:?} (residual {res:?})");

    println!("H      = {:?}", hamiltonian(&quartic, 0.0, &x, m, &grad, &cfg)?);
    println!("dH/dp  = {:?}", hamiltonian_grad(&quartic, 0.0, &x, m, &grad, &cfg)?);
    Ok(())
}
