//! Oracles shared by the integration tests.
#![allow(dead_code)]

use mfe_core::mfe_solver::{
    build_weight, solve, AlphaMode, MfeProblem, Nonlinearity, RadialSolution, WeightProfile,
};
use mfe_core::numerics::{integrate_ivp, radial_second_derivative, RadialGrid};

/// `J_ν(x)` by its power series; accurate to ~1e-15 for `x < 10`.
pub fn bessel_j(nu: u32, x: f64) -> f64 {
    let mut term = (0.5 * x).powi(nu as i32) / (1..=nu).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..80 {
        term *= -(0.25 * x * x) / (m as f64 * (m + nu) as f64);
        sum += term;
    }
    sum
}

pub fn first_root(f: impl Fn(f64) -> f64, mut a: f64, step: f64) -> f64 {
    let mut b = a + step;
    while f(a).signum() == f(b).signum() {
        a = b;
        b += step;
    }
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if f(m).signum() == f(a).signum() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

pub fn baseline(lambda: f64, nodes: usize) -> (MfeProblem, RadialSolution, WeightProfile) {
    let p = MfeProblem::new(2, lambda, Nonlinearity::Power { p: 2.0 }, AlphaMode::Free).unwrap();
    let s = solve(&p, &RadialGrid::uniform(nodes, 2).unwrap(), 1e-11).unwrap();
    let w = build_weight(&p, &s).unwrap();
    (p, s, w)
}

/// Shooting oracle for mode-0 eigenvalues: with `κ = λ + σ`, write
/// `φ = A y₁ + a y₂` where `y₁` solves the homogeneous equation from
/// `y₁(0) = 1` and `y₂` carries the average source from `y₂(0) = 0`.
/// Eigenvalues are the roots of `y₁(1) y₂'(1) - y₂(1) y₁'(1)`. The profile
/// `ψ` is integrated alongside to evaluate `V = 2(α + λψ)`.
pub struct ShootingOracle {
    pub c: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub grid: RadialGrid,
}

impl ShootingOracle {
    pub fn trajectory(&self, kappa: f64) -> Vec<Vec<f64>> {
        let (c, alpha, lambda) = (self.c, self.alpha, self.lambda);
        let t = integrate_ivp(
            |r, y, dy| {
                let t = alpha + lambda * y[0];
                let v = 2.0 * t;
                dy[0] = y[1];
                dy[1] = radial_second_derivative(2, r, y[1], -t * t);
                dy[2] = y[3];
                dy[3] = radial_second_derivative(2, r, y[3], -kappa * v * y[2]);
                dy[4] = y[5];
                dy[5] = radial_second_derivative(2, r, y[5], -kappa * v * (y[4] - 1.0));
            },
            &[c, 0.0, 1.0, 0.0, 0.0, 0.0],
            &self.grid,
        )
        .unwrap();
        (0..6).map(|j| t.component(j)).collect()
    }

    pub fn det(&self, kappa: f64) -> f64 {
        let y = self.trajectory(kappa);
        let e = |j: usize| *y[j].last().unwrap();
        e(2) * e(5) - e(4) * e(3)
    }

    /// `κ` values of the first `count` roots.
    pub fn roots(&self, count: usize) -> Vec<f64> {
        let mut out = Vec::new();
        let mut a = 0.5;
        while out.len() < count {
            let k = first_root(|x| self.det(x), a, 0.5);
            out.push(k);
            a = k + 1e-6;
        }
        out
    }
}

pub fn oracle_for(sol: &RadialSolution, lambda: f64, nodes: usize) -> ShootingOracle {
    ShootingOracle {
        c: sol.psi[0],
        alpha: sol.alpha,
        lambda,
        grid: RadialGrid::uniform(nodes, 2).unwrap(),
    }
}
