//! Composite Simpson quadrature on nonuniform radial nodes.

use super::grid::RadialGrid;
use crate::error::{Error, Result};

/// `∫_{x_0}^{x_last} y dx` by piecewise-quadratic interpolation over pairs of
/// cells. An odd trailing cell is integrated with the quadratic through the
/// last three nodes, so the rule is exact for quadratics on every cell.
pub fn simpson(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    match n {
        0 | 1 => return 0.0,
        2 => return 0.5 * (x[1] - x[0]) * (y[0] + y[1]),
        _ => {}
    }
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < n {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let s = h0 + h1;
        total += s / 6.0
            * ((2.0 - h1 / h0) * y[i] + s * s / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        // one leftover cell [x[n-2], x[n-1]]
        let (y0, y1, y2) = (y[n - 3], y[n - 2], y[n - 1]);
        let h0 = x[n - 2] - x[n - 3];
        let h1 = x[n - 1] - x[n - 2];
        let s = h0 + h1;
        total += y2 * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * s)
            + y1 * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0)
            - y0 * h1 * h1 * h1 / (6.0 * h0 * s);
    }
    total
}

/// Full-ball integral `∫_{B_1} u dx = |S^{n-1}| ∫_0^1 u(r) r^{n-1} dr` of a
/// radial function sampled on `grid`.
pub fn weighted_integral(samples: &[f64], grid: &RadialGrid) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::arg(format!(
            "sample count {} does not match grid size {}",
            samples.len(),
            grid.len()
        )));
    }
    let p = grid.dim() as i32 - 1;
    let integrand: Vec<f64> = samples
        .iter()
        .zip(grid.nodes())
        .map(|(u, r)| u * r.powi(p))
        .collect();
    Ok(grid.sphere_area() * simpson(grid.nodes(), &integrand))
}
