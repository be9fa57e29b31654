//! Fixed-step classical Runge–Kutta integration along grid nodes.

use super::grid::RadialGrid;
use crate::error::{Error, Result};

/// States at every grid node, stored node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    width: usize,
    states: Vec<f64>,
}

impl Trajectory {
    /// Number of state components.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.states.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, node: usize) -> &[f64] {
        &self.states[node * self.width..(node + 1) * self.width]
    }

    pub fn last(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// Samples of one component across all nodes.
    pub fn component(&self, j: usize) -> Vec<f64> {
        self.states.iter().skip(j).step_by(self.width).copied().collect()
    }
}

/// `y'' = g - (n-1)/r · y'` with the coordinate singularity at `r = 0`
/// replaced by its limit `y''(0) = g / n` (from `y'(r) ≈ y''(0) r`).
pub fn radial_second_derivative(dim: usize, r: f64, dy: f64, g: f64) -> f64 {
    if r == 0.0 {
        g / dim as f64
    } else {
        g - (dim as f64 - 1.0) / r * dy
    }
}

/// Integrates `y' = field(r, y)` from `r = nodes[0]` with one RK4 step per
/// grid cell. `field` writes the derivative into its last argument.
pub fn integrate_ivp<F>(mut field: F, state0: &[f64], grid: &RadialGrid) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let w = state0.len();
    if w == 0 {
        return Err(Error::arg("empty initial state"));
    }
    if state0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence { radius: grid.nodes()[0] });
    }
    let nodes = grid.nodes();
    let mut states = Vec::with_capacity(w * nodes.len());
    states.extend_from_slice(state0);

    let mut y = state0.to_vec();
    let mut k1 = vec![0.0; w];
    let mut k2 = vec![0.0; w];
    let mut k3 = vec![0.0; w];
    let mut k4 = vec![0.0; w];
    let mut tmp = vec![0.0; w];

    for win in nodes.windows(2) {
        let (r, h) = (win[0], win[1] - win[0]);
        field(r, &y, &mut k1);
        for j in 0..w {
            tmp[j] = y[j] + 0.5 * h * k1[j];
        }
        field(r + 0.5 * h, &tmp, &mut k2);
        for j in 0..w {
            tmp[j] = y[j] + 0.5 * h * k2[j];
        }
        field(r + 0.5 * h, &tmp, &mut k3);
        for j in 0..w {
            tmp[j] = y[j] + h * k3[j];
        }
        field(win[1], &tmp, &mut k4);
        for j in 0..w {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { radius: win[1] });
        }
        states.extend_from_slice(&y);
    }
    Ok(Trajectory { width: w, states })
}
