//! Conjugate gradients for the periodic system `(I - dt Lap) x = b`.

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Relative residual the iteration aims for.
pub const CG_TARGET: f64 = 1e-14;
/// Relative residual above which the solve is reported as failed.
pub const CG_ACCEPT: f64 = 1e-12;

/// `out = x - c * Lap x` on the periodic grid.
pub(crate) fn apply_helmholtz(grid: &GridSpec, c: f64, x: &[f64], out: &mut [f64]) {
    let scale = c / (grid.h() * grid.h());
    for (p, o) in out.iter_mut().enumerate() {
        let mut lap = 0.0;
        for axis in 0..grid.dim {
            lap += x[grid.neighbor(p, axis, 1)] + x[grid.neighbor(p, axis, -1)] - 2.0 * x[p];
        }
        *o = x[p] - scale * lap;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `(I - c Lap) x = b` for `c >= 0`.
///
/// The mean of `x` is fixed to the mean of `b` after the iteration; both
/// sides agree on constants, so this removes the rounding drift of the
/// conserved mode exactly.
pub fn solve_helmholtz(grid: &GridSpec, c: f64, b: &[f64]) -> Result<Vec<f64>> {
    let nodes = grid.nodes();
    debug_assert_eq!(b.len(), nodes);
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok(vec![0.0; nodes]);
    }
    if c == 0.0 {
        return Ok(b.to_vec());
    }
    let max_iter = 10 * nodes + 100;
    let mut x = b.to_vec();
    let mut ax = vec![0.0; nodes];
    apply_helmholtz(grid, c, &x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut iterations = 0;
    while rr.sqrt() > CG_TARGET * b_norm && iterations < max_iter {
        apply_helmholtz(grid, c, &p, &mut ax);
        let alpha = rr / dot(&p, &ax);
        for i in 0..nodes {
            x[i] += alpha * p[i];
            r[i] -= alpha * ax[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..nodes {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
        iterations += 1;
    }

    let shift = (b.iter().sum::<f64>() - x.iter().sum::<f64>()) / nodes as f64;
    x.iter_mut().for_each(|xi| *xi += shift);

    apply_helmholtz(grid, c, &x, &mut ax);
    let residual = b.iter().zip(&ax).map(|(bi, ai)| (bi - ai).powi(2)).sum::<f64>().sqrt() / b_norm;
    if residual > CG_ACCEPT {
        return Err(Error::LinearSolver { iterations, residual });
    }
    Ok(x)
}
