//! Periodic finite-difference operators on [`ScalarField`]s.
//!
//! All stencils wrap modulo `n` on every axis. The Laplacian and the upwind
//! divergence are written in flux form, so their node sums vanish up to
//! rounding for any input.

use super::field::{MultiField, ScalarField};
use crate::error::{Error, Result};

/// Centered second-order gradient, one component per axis.
pub fn gradient(f: &ScalarField) -> MultiField {
    let grid = *f.grid();
    let inv_2h = 0.5 / grid.h();
    let v = f.values();
    let components = (0..grid.dim)
        .map(|axis| {
            let values = (0..grid.nodes())
                .map(|p| (v[grid.neighbor(p, axis, 1)] - v[grid.neighbor(p, axis, -1)]) * inv_2h)
                .collect();
            ScalarField::from_vec_unchecked(grid, values)
        })
        .collect();
    MultiField::new(components).expect("gradient components share a grid")
}

/// Standard `2d+1`-point Laplacian.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let grid = *f.grid();
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let v = f.values();
    let values = (0..grid.nodes())
        .map(|p| {
            let mut acc = 0.0;
            for axis in 0..grid.dim {
                // Differences of neighbours keep the stencil in flux form.
                acc += (v[grid.neighbor(p, axis, 1)] - v[p]) - (v[p] - v[grid.neighbor(p, axis, -1)]);
            }
            acc * inv_h2
        })
        .collect();
    ScalarField::from_vec_unchecked(grid, values)
}

#[inline]
fn face_velocity(g: &ScalarField, p: usize, q: usize) -> f64 {
    0.5 * (g[p] + g[q])
}

/// First-order upwind discretisation of `div(m g)`.
///
/// Face velocities are arithmetic averages of the adjacent node values; the
/// face flux takes the donor value `m_j` for outgoing and `m_{j+1}` for
/// incoming velocity. Intended for nonnegative `m`; the operator is linear in
/// `m` for fixed `g`.
pub fn div_upwind(m: &ScalarField, g: &MultiField) -> ScalarField {
    let grid = *m.grid();
    debug_assert_eq!(g.len(), grid.dim);
    let inv_h = 1.0 / grid.h();
    let mv = m.values();
    let mut out = vec![0.0; grid.nodes()];
    for axis in 0..grid.dim {
        let ga = g.component(axis);
        for p in 0..grid.nodes() {
            let q = grid.neighbor(p, axis, 1);
            let gf = face_velocity(ga, p, q);
            let flux = gf.max(0.0) * mv[p] + gf.min(0.0) * mv[q];
            out[p] += flux * inv_h;
            out[q] -= flux * inv_h;
        }
    }
    ScalarField::from_vec_unchecked(grid, out)
}

/// Base-to-perturbation face velocity ratio below which the upwind flux is
/// treated as sitting on its kink.
pub const KINK_RATIO: f64 = 1e-8;

/// Directional derivative of [`div_upwind`] at `(m, g)` in direction
/// `(dm, dg)`, with the donor cell frozen by the sign of the base face
/// velocity.
///
/// Where the base face velocity is negligible against the perturbation
/// (below [`KINK_RATIO`] times it) the flux sits on its kink; the donor then
/// follows the sign of the perturbation, which is the one-sided derivative
/// seen by any resolvable finite difference. Faces where both vanish use the
/// mean of the two donors.
pub fn div_upwind_tangent(
    m: &ScalarField,
    g: &MultiField,
    dm: &ScalarField,
    dg: &MultiField,
) -> ScalarField {
    let grid = *m.grid();
    let inv_h = 1.0 / grid.h();
    let (mv, dmv) = (m.values(), dm.values());
    let mut out = vec![0.0; grid.nodes()];
    for axis in 0..grid.dim {
        let (ga, dga) = (g.component(axis), dg.component(axis));
        for p in 0..grid.nodes() {
            let q = grid.neighbor(p, axis, 1);
            let gf = face_velocity(ga, p, q);
            let dgf = face_velocity(dga, p, q);
            let sign = if gf.abs() > KINK_RATIO * dgf.abs() { gf } else { dgf };
            let donor = if sign > 0.0 {
                mv[p]
            } else if sign < 0.0 {
                mv[q]
            } else {
                0.5 * (mv[p] + mv[q])
            };
            let flux = gf.max(0.0) * dmv[p] + gf.min(0.0) * dmv[q] + dgf * donor;
            out[p] += flux * inv_h;
            out[q] -= flux * inv_h;
        }
    }
    ScalarField::from_vec_unchecked(grid, out)
}

/// Returns `(h^d sum f, (h^d sum |f|^p)^(1/p))`.
pub fn integrate_pnorm(f: &ScalarField, p: f64) -> Result<(f64, f64)> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("norm exponent must be finite and >= 1, got {p}")));
    }
    let integer = p.fract() == 0.0;
    if !integer {
        if let Some(v) = f.values().iter().find(|v| **v < 0.0) {
            return Err(Error::domain(format!("fractional norm {p} of a field with negative value {v}")));
        }
    }
    let w = f.grid().cell_volume();
    let integral = w * f.values().iter().sum::<f64>();
    let norm = if p == 1.0 {
        w * f.values().iter().map(|v| v.abs()).sum::<f64>()
    } else if p == 2.0 {
        (w * f.values().iter().map(|v| v * v).sum::<f64>()).sqrt()
    } else {
        (w * f.values().iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
    };
    Ok((integral, norm))
}
