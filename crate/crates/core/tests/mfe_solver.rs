use mfe_core::mfe_solver::{build_weight, solve, AlphaMode, MfeProblem, Nonlinearity};
use mfe_core::numerics::RadialGrid;
use mfe_core::Error;
use std::f64::consts::PI;

/// Independent boundary-value oracle: second-order finite differences for
/// `ψ'' + ψ'/r = -ψ-source` on a uniform grid (n = 2), trapezoid mass, and a
/// full Newton solve on (ψ_0..ψ_{N-1}, α) via a bordered tridiagonal system.
/// Returns `(α, ψ)` with `ψ` sampled at `j / cells`.
fn collocation_oracle(cells: usize, lambda: f64, p: f64) -> (f64, Vec<f64>) {
    let h = 1.0 / cells as f64;
    let r: Vec<f64> = (0..=cells).map(|j| j as f64 * h).collect();
    let f = |t: f64| t.abs().powf(p) * t.signum();
    let df = |t: f64| p * t.abs().powf(p - 1.0);
    let m = cells; // unknown ψ_0..ψ_{m-1}; ψ_m = 0
    let mut psi: Vec<f64> = r.iter().map(|x| (1.0 - x * x) / (4.0 * PI)).collect();
    let mut alpha = PI.powf(-1.0 / p);
    let trap = |j: usize| if j == 0 || j == m { 0.5 * h } else { h };

    for _ in 0..50 {
        // residuals F_i (interior equations) and G (mass)
        let mut lo = vec![0.0; m];
        let mut di = vec![0.0; m];
        let mut up = vec![0.0; m];
        let mut res = vec![0.0; m];
        let mut col = vec![0.0; m]; // ∂F_i/∂α
        for i in 0..m {
            let t = alpha + lambda * psi[i];
            let (a, b, c) = if i == 0 {
                (0.0, -4.0 / (h * h), 4.0 / (h * h))
            } else {
                let rm = r[i] - 0.5 * h;
                let rp = r[i] + 0.5 * h;
                (rm / (r[i] * h * h), -2.0 / (h * h), rp / (r[i] * h * h))
            };
            let left = if i > 0 { psi[i - 1] } else { 0.0 };
            res[i] = a * left + b * psi[i] + c * psi[i + 1] + f(t);
            lo[i] = a;
            di[i] = b + lambda * df(t);
            up[i] = if i + 1 < m { c } else { 0.0 };
            col[i] = df(t);
        }
        let g: f64 = 2.0 * PI
            * (0..=m).map(|j| trap(j) * r[j] * f(alpha + lambda * psi[j])).sum::<f64>()
            - 1.0;
        let row: Vec<f64> = (0..m).map(|j| 2.0 * PI * trap(j) * r[j] * lambda * df(alpha + lambda * psi[j])).collect();
        let g_alpha: f64 =
            2.0 * PI * (0..=m).map(|j| trap(j) * r[j] * df(alpha + lambda * psi[j])).sum::<f64>();

        if res.iter().fold(g.abs(), |s, v| s.max(v.abs())) < 1e-13 {
            break;
        }
        // T x = -res, T y = col, then  row·(x - y dα) + g_alpha dα = -g
        let x = thomas(&lo, &di, &up, &res.iter().map(|v| -v).collect::<Vec<_>>());
        let y = thomas(&lo, &di, &up, &col);
        let rx: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
        let ry: f64 = row.iter().zip(&y).map(|(a, b)| a * b).sum();
        let da = (-g - rx) / (g_alpha - ry);
        for i in 0..m {
            psi[i] += x[i] - y[i] * da;
        }
        alpha += da;
    }
    (alpha, psi)
}

fn thomas(lo: &[f64], di: &[f64], up: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = di.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = up[0] / di[0];
    d[0] = rhs[0] / di[0];
    for i in 1..n {
        let den = di[i] - lo[i] * c[i - 1];
        c[i] = up[i] / den;
        d[i] = (rhs[i] - lo[i] * d[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[test]
fn coupled_solution_matches_collocation_oracle() {
    let problem = MfeProblem::new(2, 0.5, Nonlinearity::Power { p: 2.0 }, AlphaMode::Free).unwrap();
    let grid = RadialGrid::uniform(513, 2).unwrap();
    let sol = solve(&problem, &grid, 1e-12).unwrap();

    // Richardson-extrapolate the second-order oracle from 1024 and 2048 cells
    let (a1, p1) = collocation_oracle(1024, 0.5, 2.0);
    let (a2, p2) = collocation_oracle(2048, 0.5, 2.0);
    let alpha = (4.0 * a2 - a1) / 3.0;
    assert!((sol.alpha - alpha).abs() < 1e-6, "{} vs {alpha}", sol.alpha);
    let mut sup = 0.0f64;
    for (j, s) in sol.psi.iter().enumerate() {
        let oracle = (4.0 * p2[4 * j] - p1[2 * j]) / 3.0;
        sup = sup.max((s - oracle).abs());
    }
    assert!(sup < 1e-6, "sup-norm gap {sup:e}");
}

#[test]
fn mass_constraint_holds_under_independent_quadrature() {
    // one Romberg step over trapezoid sums at h and 2h
    let problem = MfeProblem::new(2, 0.5, Nonlinearity::Power { p: 2.0 }, AlphaMode::Free).unwrap();
    let grid = RadialGrid::uniform(1025, 2).unwrap();
    let sol = solve(&problem, &grid, 1e-11).unwrap();
    let r = grid.nodes();
    let g: Vec<f64> = sol
        .psi
        .iter()
        .zip(r)
        .map(|(s, x)| (sol.alpha + 0.5 * s).powi(2) * x)
        .collect();
    let h = r[1] - r[0];
    let trap: f64 = h * (g.iter().sum::<f64>() - 0.5 * (g[0] + g[g.len() - 1]));
    let trap_half: f64 = {
        let g2: Vec<f64> = g.iter().step_by(2).copied().collect();
        2.0 * h * (g2.iter().sum::<f64>() - 0.5 * (g2[0] + g2[g2.len() - 1]))
    };
    let mass = 2.0 * PI * (4.0 * trap - trap_half) / 3.0;
    assert!((mass - 1.0).abs() < 1e-9, "mass {mass}");
}

#[test]
fn alpha_converges_at_least_quadratically_under_refinement() {
    let problem = MfeProblem::new(2, 0.5, Nonlinearity::Power { p: 2.0 }, AlphaMode::Free).unwrap();
    let alphas: Vec<f64> = [33, 65, 129]
        .iter()
        .map(|&n| solve(&problem, &RadialGrid::uniform(n, 2).unwrap(), 1e-12).unwrap().alpha)
        .collect();
    let ratio = (alphas[1] - alphas[0]) / (alphas[2] - alphas[1]);
    assert!(ratio > 2.5, "refinement ratio {ratio}");
}

#[test]
fn exponential_coupled_branch_is_monotone() {
    let problem = MfeProblem::new(3, 1.0, Nonlinearity::Exponential, AlphaMode::Free).unwrap();
    let grid = RadialGrid::uniform(257, 3).unwrap();
    let sol = solve(&problem, &grid, 1e-11).unwrap();
    assert!(sol.psi.windows(2).all(|w| w[1] <= w[0]));
    let weight = build_weight(&problem, &sol).unwrap();
    assert!(weight.v.windows(2).all(|w| w[1] <= w[0]));
    // stronger coupling concentrates mass, so α drops below its λ = 0 value
    let volume = 4.0 * PI / 3.0;
    assert!(sol.alpha < (1.0 / volume).ln());
}

#[test]
fn pinned_plasma_case_satisfies_flux_identity() {
    // ∫ -Δψ = |S^1| |ψ'(1)| = 1
    let problem =
        MfeProblem::new(2, 0.0, Nonlinearity::Power { p: 2.0 }, AlphaMode::Pinned(0.0)).unwrap();
    let grid = RadialGrid::graded(1025, 2, 0.05).unwrap();
    let sol = solve(&problem, &grid, 1e-11).unwrap();
    let flux = 2.0 * PI * sol.dpsi.last().unwrap().abs();
    assert!((flux - 1.0).abs() < 1e-8, "{flux}");
    assert!(sol.psi.iter().all(|s| *s >= 0.0));
}

#[test]
fn supercritical_pinned_problem_is_rejected() {
    // n = 3, p = 6 > (n+2)/(n-2): no positive radial solution vanishing on the sphere
    let problem =
        MfeProblem::new(3, 0.0, Nonlinearity::Power { p: 6.0 }, AlphaMode::Pinned(0.0)).unwrap();
    let grid = RadialGrid::uniform(129, 3).unwrap();
    assert!(matches!(solve(&problem, &grid, 1e-10), Err(Error::ConstraintViolation(_))));
}

#[test]
fn dimension_mismatch_is_an_argument_error() {
    let problem = MfeProblem::new(3, 0.0, Nonlinearity::Exponential, AlphaMode::Free).unwrap();
    let grid = RadialGrid::uniform(64, 2).unwrap();
    assert!(matches!(solve(&problem, &grid, 1e-10), Err(Error::Argument(_))));
}
