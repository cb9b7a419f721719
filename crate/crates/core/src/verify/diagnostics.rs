//! Quantities of the a-priori estimate, evaluated on a solved state.

use std::io::Write;

use serde::Serialize;

use super::lemma::LemmaReport;
use crate::coupling::SolutionState;
use crate::error::Result;
use crate::grid::{gradient, integrate_pnorm, ScalarField};
use crate::model::{pow0, GameModel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub sigma: f64,
    /// `max_t | ||m(t)||_1 - ||m0||_1 |`.
    pub mass_drift: f64,
    pub min_density: f64,
    /// `sup_t ||m(t)||_sigma`; NaN when `sigma < 1`.
    pub sup_density_norm: f64,
    pub sup_value: f64,
    /// `int_Q |grad u|^2`, summed over players.
    pub value_gradient: f64,
    /// `int_Q (m+1)^(sigma-2) |grad m|^2`.
    pub density_gradient: f64,
    /// `int_Q m^(2 s0 + 1)`.
    pub density_power: f64,
    /// `int_Q (m+1)(m^r+1) |v|^2`.
    pub control_energy: f64,
    /// `sup_t ||m+1||_sigma^sigma + int_Q (m+1)^(sigma-2) |grad m|^2`.
    pub energy: f64,
    /// `int_Q w^(2(d+2)/d)` over `(sup_t ||w||_2^2 + int_Q |grad w|^2)^((d+2)/d)`
    /// for `w = (m+1)^(sigma/2)`.
    pub interpolation_ratio: f64,
    /// `int_Q |grad sum_i u^i|^2`.
    pub sum_value_gradient: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma: Option<LemmaReport>,
}

impl DiagnosticsReport {
    /// Scalar entries by column name, in CSV order.
    pub fn columns(&self) -> Vec<(&'static str, f64)> {
        let mut cols = vec![
            ("sigma", self.sigma),
            ("mass_drift", self.mass_drift),
            ("min_density", self.min_density),
            ("sup_density_norm", self.sup_density_norm),
            ("sup_value", self.sup_value),
            ("value_gradient", self.value_gradient),
            ("density_gradient", self.density_gradient),
            ("density_power", self.density_power),
            ("control_energy", self.control_energy),
            ("energy", self.energy),
            ("interpolation_ratio", self.interpolation_ratio),
            ("sum_value_gradient", self.sum_value_gradient),
        ];
        if let Some(l) = &self.lemma {
            cols.extend([
                ("lemma_eps0", l.eps0),
                ("lemma_sum_coercive_c", l.sum_coercive.constant),
                ("lemma_upper_bound_c", l.upper_bound.constant),
                ("lemma_global_bound_c", l.global_bound.constant),
                ("lemma_stable", if l.stable() { 1.0 } else { 0.0 }),
            ]);
        }
        cols
    }

    /// The bounded quantities of the estimate, compared under refinement.
    pub fn estimate_quantities(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("sup_density_norm", self.sup_density_norm),
            ("sup_value", self.sup_value),
            ("value_gradient", self.value_gradient),
            ("density_gradient", self.density_gradient),
            ("density_power", self.density_power),
            ("control_energy", self.control_energy),
            ("energy", self.energy),
            ("interpolation_ratio", self.interpolation_ratio),
            ("sum_value_gradient", self.sum_value_gradient),
        ]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let cols = self.columns();
        let header: Vec<&str> = cols.iter().map(|(n, _)| *n).collect();
        let row: Vec<String> = cols.iter().map(|(_, v)| format!("{v:e}")).collect();
        writeln!(w, "{}", header.join(","))?;
        writeln!(w, "{}", row.join(","))?;
        Ok(())
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "diagnostics")?;
        for (name, v) in self.columns() {
            writeln!(w, "  {name:<24} {v:.6e}")?;
        }
        if let Some(l) = &self.lemma {
            writeln!(w, "lagrangian inequalities ({} samples, eps0 = {})", l.samples, l.eps0)?;
            for (name, fit) in [("sum_coercive", &l.sum_coercive), ("upper_bound", &l.upper_bound), ("global_bound", &l.global_bound)] {
                writeln!(
                    w,
                    "  {name:<14} C = {:.6e} (half sample {:.6e}) {}",
                    fit.constant,
                    fit.constant_half,
                    if fit.stable { "stable" } else { "GROWING" }
                )?;
            }
        }
        Ok(())
    }
}

/// Space integral of `f(m, |grad m|^2)` per slice, trapezoid in time.
fn space_time<F: Fn(usize, usize) -> f64>(state: &SolutionState, f: F) -> f64 {
    let grid = *state.m.grid();
    let w = grid.cell_volume();
    grid.time_weights()
        .iter()
        .enumerate()
        .map(|(k, wt)| wt * w * (0..grid.nodes()).map(|p| f(k, p)).sum::<f64>())
        .sum()
}

fn grad_sq(f: &ScalarField) -> Vec<f64> {
    let g = gradient(f);
    (0..f.grid().nodes())
        .map(|p| g.components().iter().map(|c| c[p] * c[p]).sum())
        .collect()
}

/// Evaluates every report quantity on `state`; the inequality sample is
/// attached separately.
pub fn run_diagnostics(model: &dyn GameModel, state: &SolutionState) -> DiagnosticsReport {
    let c = model.constants();
    let grid = *state.m.grid();
    let d = grid.dim as f64;
    let sigma = c.sigma();
    let slices = state.m.slices();
    let clamped: Vec<ScalarField> = slices.iter().map(|m| m.map(|x| x.max(0.0))).collect();

    let mass0 = slices[0].integral();
    let mass_drift = slices.iter().map(|m| (m.integral() - mass0).abs()).fold(0.0, f64::max);
    let min_density = state.m.min();

    let sup_density_norm = if sigma >= 1.0 {
        clamped
            .iter()
            .map(|m| integrate_pnorm(m, sigma).map_or(f64::NAN, |(_, n)| n))
            .fold(0.0, f64::max)
    } else {
        f64::NAN
    };
    let sup_shift_power = clamped
        .iter()
        .map(|m| m.values().iter().map(|x| (x + 1.0).powf(sigma)).sum::<f64>() * grid.cell_volume())
        .fold(0.0, f64::max);

    let sup_value = state.u.max_abs();
    let value_grads: Vec<Vec<f64>> = state
        .u
        .slices()
        .iter()
        .map(|u| {
            let per: Vec<Vec<f64>> = u.components().iter().map(grad_sq).collect();
            (0..grid.nodes()).map(|p| per.iter().map(|g| g[p]).sum()).collect()
        })
        .collect();
    let value_gradient = space_time(state, |k, p| value_grads[k][p]);

    let sum_grads: Vec<Vec<f64>> = state
        .u
        .slices()
        .iter()
        .map(|u| {
            let total = u.components().iter().skip(1).fold(u.component(0).clone(), |acc, c| acc.axpy(1.0, c));
            grad_sq(&total)
        })
        .collect();
    let sum_value_gradient = space_time(state, |k, p| sum_grads[k][p]);

    let m_grads: Vec<Vec<f64>> = clamped.iter().map(grad_sq).collect();
    let density_gradient = space_time(state, |k, p| (clamped[k][p] + 1.0).powf(sigma - 2.0) * m_grads[k][p]);
    let density_power = space_time(state, |k, p| pow0(clamped[k][p], 2.0 * c.s0 + 1.0));
    let control_energy = space_time(state, |k, p| {
        let v = state.v.slice(k);
        let v_sq: f64 = v.components().iter().map(|c| c[p] * c[p]).sum();
        let m = clamped[k][p];
        (m + 1.0) * (pow0(m, c.r) + 1.0) * v_sq
    });
    let energy = sup_shift_power + density_gradient;

    let w_fields: Vec<ScalarField> = clamped.iter().map(|m| m.map(|x| (x + 1.0).powf(sigma / 2.0))).collect();
    let w_grads: Vec<Vec<f64>> = w_fields.iter().map(grad_sq).collect();
    let exponent = (d + 2.0) / d;
    let lhs = space_time(state, |k, p| w_fields[k][p].powf(2.0 * exponent));
    let sup_w = w_fields
        .iter()
        .map(|w| w.values().iter().map(|x| x * x).sum::<f64>() * grid.cell_volume())
        .fold(0.0, f64::max);
    let rhs = sup_w + space_time(state, |k, p| w_grads[k][p]);
    let interpolation_ratio = lhs / rhs.powf(exponent);

    DiagnosticsReport {
        sigma,
        mass_drift,
        min_density,
        sup_density_norm,
        sup_value,
        value_gradient,
        density_gradient,
        density_power,
        control_energy,
        energy,
        interpolation_ratio,
        sum_value_gradient,
        lemma: None,
    }
}
