//! Radial shooting solver for the constrained mean-field problem
//!
//! ```text
//!   -Δψ = f(α + λψ) in B_1,   ∫_{B_1} f(α + λψ) = 1,   ψ = 0 on ∂B_1,
//! ```
//!
//! and the linearization weight `V = f'(α + λψ)` built from its solution.
//!
//! In radial coordinates the PDE is `ψ'' + (n-1)/r ψ' = -f(α + λψ)` with
//! `ψ'(0) = 0`. Free mode shoots on `(ψ(0), α)`; pinned mode fixes `α` and
//! shoots on `(ψ(0), λ)`. Both are two-residual Newton iterations with a
//! central finite-difference Jacobian.

use crate::error::{Error, Result};
use crate::numerics::{integrate_ivp, radial_second_derivative, weighted_integral, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    /// `f(t) = e^t`
    Exponential,
    /// `f(t) = t^p`, `p ≥ 1`
    Power { p: f64 },
}

impl Nonlinearity {
    /// `f(t)`. Powers are continued as `sign(t)|t|^p` for `t < 0`; only
    /// transient Newton iterates should ever land there.
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Nonlinearity::Exponential => t.exp(),
            Nonlinearity::Power { p } => t.signum() * t.abs().powf(p),
        }
    }

    /// `f'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Nonlinearity::Exponential => t.exp(),
            Nonlinearity::Power { p } => {
                if p == 1.0 {
                    1.0
                } else {
                    p * t.abs().powf(p - 1.0)
                }
            }
        }
    }

    /// Solves `f(t) = y` for `y > 0`.
    fn inverse(&self, y: f64) -> f64 {
        match *self {
            Nonlinearity::Exponential => y.ln(),
            Nonlinearity::Power { p } => y.powf(1.0 / p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    /// `α` is an unknown.
    Free,
    /// `α` is fixed and the coupling `λ` is solved for instead.
    Pinned(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfeProblem {
    pub n: usize,
    pub lambda: f64,
    pub nonlinearity: Nonlinearity,
    pub alpha_mode: AlphaMode,
}

impl MfeProblem {
    pub fn new(
        n: usize,
        lambda: f64,
        nonlinearity: Nonlinearity,
        alpha_mode: AlphaMode,
    ) -> Result<Self> {
        let problem = Self { n, lambda, nonlinearity, alpha_mode };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::arg(format!("dimension must be at least 2, got {}", self.n)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::arg(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if let Nonlinearity::Power { p } = self.nonlinearity {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(Error::arg(format!("power p must be finite and >= 1, got {p}")));
            }
        }
        if let AlphaMode::Pinned(a) = self.alpha_mode {
            if !a.is_finite() {
                return Err(Error::arg("pinned alpha must be finite"));
            }
            if a == 0.0 && self.nonlinearity == Nonlinearity::Exponential {
                return Err(Error::arg("alpha pinned at 0 requires a power nonlinearity"));
            }
        }
        Ok(())
    }

    /// The degenerate case `f(t) = t^p`, `p > 1`, `α = 0`, where the weight
    /// vanishes on the boundary.
    pub fn has_vanishing_weight(&self) -> bool {
        matches!(
            (self.alpha_mode, self.nonlinearity),
            (AlphaMode::Pinned(a), Nonlinearity::Power { p }) if a == 0.0 && p > 1.0
        )
    }
}

/// One Newton iterate: unknowns and the two residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonStep {
    /// Coupling at which this iterate was taken (continuation stage).
    pub stage: f64,
    pub unknowns: [f64; 2],
    pub residuals: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub grid: RadialGrid,
    pub psi: Vec<f64>,
    /// `ψ'` samples from the shooting trajectory.
    pub dpsi: Vec<f64>,
    pub alpha: f64,
    /// Equals the problem's `λ` in free mode; the solved coupling when pinned.
    pub lambda_effective: f64,
    pub residual_boundary: f64,
    pub residual_mass: f64,
    /// Every Newton iterate across all continuation stages.
    pub history: Vec<NewtonStep>,
}

const MAX_NEWTON: usize = 60;
const CONTINUATION_STEP: f64 = 0.1;

struct Shot {
    psi: Vec<f64>,
    dpsi: Vec<f64>,
    residuals: [f64; 2],
}

fn shoot(
    f: Nonlinearity,
    grid: &RadialGrid,
    c: f64,
    alpha: f64,
    lambda: f64,
) -> Result<Shot> {
    let n = grid.dim();
    let traj = integrate_ivp(
        |r, y, dy| {
            dy[0] = y[1];
            dy[1] = radial_second_derivative(n, r, y[1], -f.value(alpha + lambda * y[0]));
        },
        &[c, 0.0],
        grid,
    )?;
    let psi = traj.component(0);
    let dpsi = traj.component(1);
    let source: Vec<f64> = psi.iter().map(|s| f.value(alpha + lambda * s)).collect();
    let mass = weighted_integral(&source, grid)?;
    Ok(Shot { residuals: [*psi.last().unwrap(), mass - 1.0], psi, dpsi })
}

fn inf_norm(r: &[f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

/// Damped Newton on two unknowns. `eval` maps unknowns to residuals.
fn newton<E>(
    mut x: [f64; 2],
    tol: f64,
    stage: f64,
    history: &mut Vec<NewtonStep>,
    mut eval: E,
) -> Result<[f64; 2]>
where
    E: FnMut([f64; 2]) -> Result<[f64; 2]>,
{
    let mut r = eval(x)?;
    history.push(NewtonStep { stage, unknowns: x, residuals: r });
    for _ in 0..MAX_NEWTON {
        if inf_norm(&r) <= tol {
            return Ok(x);
        }
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-6 * x[j].abs().max(1e-2);
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let rp = eval(xp)?;
            let rm = eval(xm)?;
            for i in 0..2 {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Convergence { iterations: history.len(), residuals: r });
        }
        let dx = [
            -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial = [x[0] + t * dx[0], x[1] + t * dx[1]];
            if let Ok(rt) = eval(trial) {
                if inf_norm(&rt) < inf_norm(&r) {
                    x = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        history.push(NewtonStep { stage, unknowns: x, residuals: r });
        if !accepted {
            break;
        }
    }
    if inf_norm(&r) <= tol {
        Ok(x)
    } else {
        Err(Error::Convergence { iterations: history.len(), residuals: r })
    }
}

/// Closed form at `λ = 0`: `f(α₀) |B_1| = 1` and `ψ(0) = f(α₀) / (2n)`.
fn zero_coupling_guess(f: Nonlinearity, grid: &RadialGrid) -> (f64, f64) {
    let level = 1.0 / grid.ball_volume();
    (level / (2.0 * grid.dim() as f64), f.inverse(level))
}

/// Lane–Emden scaling for `α = 0`, `f = t^p`: shoot `u'' + (n-1)/r u' = -|u|^p`
/// from `u(0) = 1` to its first zero `R`, then rescale onto the unit ball.
/// Returns `(ψ(0), λ)`.
fn pinned_zero_guess(p: f64, dim: usize) -> Result<(f64, f64)> {
    const REACH: f64 = 40.0;
    let fine = RadialGrid::uniform(8001, dim)?;
    let traj = integrate_ivp(
        |t, y, dy| {
            dy[0] = y[1];
            let g = -REACH * REACH * y[0].signum() * y[0].abs().powf(p);
            dy[1] = radial_second_derivative(dim, t, y[1], g);
        },
        &[1.0, 0.0],
        &fine,
    )?;
    let u = traj.component(0);
    let du = traj.component(1);
    let t = fine.nodes();
    let i = (1..u.len())
        .find(|&i| u[i] <= 0.0)
        .ok_or_else(|| Error::ConstraintViolation(format!("no positive radial solution for p = {p} in dimension {dim}")))?;
    let w = u[i - 1] / (u[i - 1] - u[i]);
    let radius = REACH * (t[i - 1] + w * (t[i] - t[i - 1]));
    let slope = (du[i - 1] + w * (du[i] - du[i - 1])).abs() / REACH;
    let area = fine.sphere_area();
    if p == 1.0 {
        let s = 1.0 / (radius * area * slope);
        Ok((s, radius * radius))
    } else {
        let amp = radius.powf(2.0 / (p - 1.0));
        let s = 1.0 / (area * amp * radius * slope);
        Ok((s * amp, s.powf(-(p - 1.0) / p)))
    }
}

/// Solves the constrained problem on `grid`. `tol` bounds both residuals.
pub fn solve(problem: &MfeProblem, grid: &RadialGrid, tol: f64) -> Result<RadialSolution> {
    problem.validate()?;
    if grid.dim() != problem.n {
        return Err(Error::arg(format!(
            "grid dimension {} differs from problem dimension {}",
            grid.dim(),
            problem.n
        )));
    }
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::arg(format!("tolerance {tol:e} outside [1e-12, 1e-4]")));
    }
    let f = problem.nonlinearity;
    let mut history = Vec::new();

    let (c, alpha, lambda) = match problem.alpha_mode {
        AlphaMode::Free => {
            let (mut c, mut alpha) = zero_coupling_guess(f, grid);
            for stage in continuation_stages(problem.lambda) {
                let x = newton([c, alpha], tol, stage, &mut history, |x| {
                    Ok(shoot(f, grid, x[0], x[1], stage)?.residuals)
                })?;
                c = x[0];
                alpha = x[1];
            }
            (c, alpha, problem.lambda)
        }
        AlphaMode::Pinned(a) => {
            let (c, lambda) = pinned_solve(f, grid, a, tol, &mut history)?;
            (c, a, lambda)
        }
    };

    if lambda < 0.0 {
        return Err(Error::ConstraintViolation(format!(
            "solved coupling λ = {lambda} is negative"
        )));
    }
    let shot = shoot(f, grid, c, alpha, lambda)?;
    let Shot { mut psi, dpsi, residuals } = shot;
    *psi.last_mut().unwrap() = 0.0;

    let last = psi.len() - 1;
    if let Some(i) = (1..last).find(|&i| !(psi[i] > 0.0)) {
        return Err(Error::PositivityViolation { radius: grid.nodes()[i], value: psi[i] });
    }
    if let Nonlinearity::Power { .. } = f {
        if problem.alpha_mode == AlphaMode::Free && alpha <= 0.0 {
            return Err(Error::ConstraintViolation(format!(
                "power nonlinearity requires α > 0, converged to α = {alpha}"
            )));
        }
        if psi.iter().any(|s| alpha + lambda * s < 0.0) {
            return Err(Error::ConstraintViolation(
                "argument α + λψ of the power nonlinearity is negative".into(),
            ));
        }
    }

    Ok(RadialSolution {
        grid: grid.clone(),
        psi,
        dpsi,
        alpha,
        lambda_effective: lambda,
        residual_boundary: residuals[0],
        residual_mass: residuals[1],
        history,
    })
}

fn continuation_stages(lambda: f64) -> Vec<f64> {
    let mut stages = Vec::new();
    let mut s = CONTINUATION_STEP;
    while s < lambda - 1e-12 {
        stages.push(s);
        s += CONTINUATION_STEP;
    }
    stages.push(lambda);
    stages
}

fn pinned_solve(
    f: Nonlinearity,
    grid: &RadialGrid,
    alpha: f64,
    tol: f64,
    history: &mut Vec<NewtonStep>,
) -> Result<(f64, f64)> {
    let eval = |x: [f64; 2], a: f64| Ok(shoot(f, grid, x[0], a, x[1])?.residuals);
    match f {
        Nonlinearity::Power { p } if alpha == 0.0 => {
            let guess = pinned_zero_guess(p, grid.dim())?;
            let x = newton([guess.0, guess.1], tol, 0.0, history, |x| eval(x, 0.0))?;
            Ok((x[0], x[1]))
        }
        _ => {
            // walk α from its λ = 0 value toward the pinned value
            let (c0, a0) = zero_coupling_guess(f, grid);
            let steps = 20;
            let mut x = [c0, 0.0];
            for k in 1..=steps {
                let a = a0 + (alpha - a0) * k as f64 / steps as f64;
                x = newton(x, tol, a, history, |x| eval(x, a))?;
            }
            Ok((x[0], x[1]))
        }
    }
}

/// Boundary behaviour of the linearization weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryClass {
    /// `V > 0` up to and including `r = 1`.
    Positive,
    /// `V(r) ~ v0 (1 - r)^beta` as `r → 1`.
    Vanishing { beta: f64, v0: f64 },
}

/// Samples of `V = f'(α + λψ)` on the solution grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    pub grid: RadialGrid,
    pub v: Vec<f64>,
    pub boundary_class: BoundaryClass,
}

impl WeightProfile {
    pub fn new(grid: RadialGrid, v: Vec<f64>, boundary_class: BoundaryClass) -> Result<Self> {
        if v.len() != grid.len() {
            return Err(Error::arg("weight sample count differs from grid size"));
        }
        let last = v.len() - 1;
        if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::arg("weight must be finite and non-negative"));
        }
        if v[1..last].iter().any(|x| *x <= 0.0) {
            return Err(Error::arg("weight must be positive at interior nodes"));
        }
        match boundary_class {
            BoundaryClass::Positive if v[last] <= 0.0 => {
                return Err(Error::arg("positive weight class needs V(1) > 0"));
            }
            BoundaryClass::Vanishing { beta, v0 } => {
                if v[last] != 0.0 {
                    return Err(Error::arg("vanishing weight class needs V(1) = 0"));
                }
                if !(beta > 0.0 && v0 > 0.0) {
                    return Err(Error::arg("vanishing weight needs beta > 0 and v0 > 0"));
                }
            }
            _ => {}
        }
        Ok(Self { grid, v, boundary_class })
    }

    /// `V ≡ value`.
    pub fn constant(grid: RadialGrid, value: f64) -> Result<Self> {
        let v = vec![value; grid.len()];
        Self::new(grid, v, BoundaryClass::Positive)
    }

    /// `∫_{B_1} V`.
    pub fn total(&self) -> f64 {
        weighted_integral(&self.v, &self.grid).expect("lengths checked on construction")
    }
}

/// `V = f'(α + λψ)`, classified at the boundary.
pub fn build_weight(problem: &MfeProblem, sol: &RadialSolution) -> Result<WeightProfile> {
    let f = problem.nonlinearity;
    let lambda = sol.lambda_effective;
    let mut v: Vec<f64> = sol.psi.iter().map(|s| f.derivative(sol.alpha + lambda * s)).collect();
    let class = match f {
        Nonlinearity::Power { p } if problem.has_vanishing_weight() => {
            *v.last_mut().unwrap() = 0.0;
            let slope = sol.dpsi.last().copied().unwrap_or(0.0).abs();
            BoundaryClass::Vanishing { beta: p - 1.0, v0: p * (lambda * slope).powf(p - 1.0) }
        }
        _ => BoundaryClass::Positive,
    };
    WeightProfile::new(sol.grid.clone(), v, class)
}
