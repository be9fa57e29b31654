use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest number of interior nodes accepted by [`RadialGrid`].
pub const MIN_INTERIOR_NODES: usize = 16;

/// Ordered radii on `[0, 1]` for a radially symmetric problem in the unit
/// ball of `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    dim: usize,
}

impl RadialGrid {
    /// Validates an explicit node set.
    pub fn from_nodes(nodes: Vec<f64>, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::arg(format!("dimension must be at least 2, got {dim}")));
        }
        if nodes.len() < MIN_INTERIOR_NODES + 2 {
            return Err(Error::arg(format!(
                "grid needs at least {} interior nodes, got {}",
                MIN_INTERIOR_NODES,
                nodes.len().saturating_sub(2)
            )));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::arg("grid must start at r = 0 and end at r = 1"));
        }
        if nodes.iter().any(|r| !r.is_finite()) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("grid nodes must be finite and strictly increasing"));
        }
        Ok(Self { nodes, dim })
    }

    /// `count` equally spaced nodes, endpoints included.
    pub fn uniform(count: usize, dim: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::arg("uniform grid needs at least two nodes"));
        }
        let cells = (count - 1) as f64;
        let mut nodes: Vec<f64> = (0..count).map(|i| i as f64 / cells).collect();
        *nodes.last_mut().unwrap() = 1.0;
        Self::from_nodes(nodes, dim)
    }

    /// `count` nodes whose cell widths shrink geometrically toward `r = 1`,
    /// the last cell being `ratio` times the first.
    pub fn graded(count: usize, dim: usize, ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(Error::arg(format!("grading ratio must lie in (0, 1], got {ratio}")));
        }
        if count < 2 {
            return Err(Error::arg("graded grid needs at least two nodes"));
        }
        if ratio == 1.0 {
            return Self::uniform(count, dim);
        }
        let cells = count - 1;
        let q = ratio.powf(1.0 / (cells as f64 - 1.0).max(1.0));
        let first = (1.0 - q) / (1.0 - q.powi(cells as i32));
        let mut nodes = Vec::with_capacity(count);
        let mut r = 0.0;
        let mut width = first;
        nodes.push(0.0);
        for _ in 0..cells - 1 {
            r += width;
            nodes.push(r);
            width *= q;
        }
        nodes.push(1.0);
        Self::from_nodes(nodes, dim)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Spatial dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Width of cell `i`, i.e. `r[i+1] - r[i]`.
    pub fn cell(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Index of the node closest to `r`.
    pub fn nearest(&self, r: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.nodes.len() => self.nodes.len() - 1,
            Err(i) => {
                if r - self.nodes[i - 1] <= self.nodes[i] - r {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Surface measure `|S^{n-1}|` of the unit sphere.
    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.dim)
    }

    /// Volume `|B_1|` of the unit ball.
    pub fn ball_volume(&self) -> f64 {
        sphere_area(self.dim) / self.dim as f64
    }

    /// `∫_a^b r^{n-1} dr`.
    pub fn shell_measure(&self, a: f64, b: f64) -> f64 {
        let n = self.dim as i32;
        (b.powi(n) - a.powi(n)) / n as f64
    }
}

/// `Γ(n/2)` for a positive integer `n`.
fn half_integer_gamma(n: usize) -> f64 {
    let (mut g, mut x) = if n % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while x < n as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

/// `|S^{n-1}| = 2 π^{n/2} / Γ(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / half_integer_gamma(n)
}
