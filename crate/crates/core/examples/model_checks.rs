//! Evaluate the prototype game, its parameter gates and the sampled
//! structural assumptions.

use mfgb::model::{check_gates, eval_drift, eval_model, sample_assumptions, ModelConstants, PrototypeModel, SamplerConfig};

fn main() -> mfgb::error::Result<()> {
    let mut c = ModelConstants::new(2, 1, 1);
    c.r = 1.0;
    c.s = 0.2;
    let model = PrototypeModel::with_defaults(c.clone())?;

    let pay = eval_model(&model, 0.0, &[0.25], 1.0, &[0.5, -0.5])?;
    let drift = eval_drift(&model, 0.0, &[0.25], 1.0, &[0.5, -0.5])?;
    println!("f = {:?}, f_v = {:?}, f_m = {:?}", pay.f, pay.f_v, pay.f_m);
    println!("g = {:?}, g_m = {:?}", drift.g, drift.g_m);

    let gates = check_gates(&c, true);
    println!("sigma = {}", gates.sigma);
    for g in &gates.entries {
        println!("  {:<16} {:<5} {}", g.id.label(), g.passed, g.detail);
    }

    // s = 0.2 exceeds the default gamma = 0.01, so the sampled smallness
    // assumption is violated although the prototype gate s < r/(2N) holds.
    let report = sample_assumptions(&model, &SamplerConfig { samples: 5000, ..Default::default() });
    for e in &report.entries {
        println!("  {:<22} {:<5} {:.4e}", e.id.label(), e.passed, e.fitted);
    }
    Ok(())
}
