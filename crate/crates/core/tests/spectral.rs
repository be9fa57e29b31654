mod common;

use common::{baseline, bessel_j, first_root, oracle_for};
use mfe_core::mfe_solver::WeightProfile;
use mfe_core::numerics::{gen_sym_eigen, RadialGrid};
use mfe_core::spectral::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn dirichlet_eigenvalue_matches_bessel_root() {
    let j01 = first_root(|x| bessel_j(0, x), 2.0, 0.1);
    assert!((j01 - 2.404825557695773).abs() < 1e-12);
    let w = WeightProfile::constant(RadialGrid::uniform(512, 2).unwrap(), 1.0).unwrap();
    let nu = dirichlet_first(&w, 0.0).unwrap();
    assert!((nu - j01 * j01).abs() / (j01 * j01) < 5e-3, "{nu}");
}

#[test]
fn doubling_the_weight_halves_the_dirichlet_eigenvalue() {
    let (_, _, w) = baseline(0.0, 257);
    let doubled =
        WeightProfile::new(w.grid.clone(), w.v.iter().map(|v| 2.0 * v).collect(), w.boundary_class)
            .unwrap();
    let a = dirichlet_first(&w, 0.0).unwrap();
    let b = dirichlet_first(&doubled, 0.0).unwrap();
    assert!((a - 2.0 * b).abs() < 1e-10 * a, "{a} vs {b}");
}

#[test]
fn first_eigenvalue_matches_closed_form_at_zero_coupling() {
    // constant V: φ ∝ J₀(√(κV) r) - J₀(√(κV)), φ'(1) = 0 ⇒ √(κV) = j₁,₁
    let j11 = first_root(|x| bessel_j(1, x), 3.0, 0.1);
    let v = 2.0 / PI.sqrt();
    let (_, _, w) = baseline(0.0, 513);
    let spec = solve_modes(&w, 0.0, &[0], 1).unwrap();
    let exact = j11 * j11 / v;
    assert!((spec[0].sigmas[0] - exact).abs() / exact < 1e-4, "{} vs {exact}", spec[0].sigmas[0]);
}

#[test]
fn first_eigenvalue_matches_shooting_oracle() {
    for lambda in [0.0, 0.5] {
        let (_, sol, w) = baseline(lambda, 513);
        let spec = solve_modes(&w, lambda, &[0], 3).unwrap();
        let oracle = oracle_for(&sol, lambda, 1025);
        for (sigma, kappa) in spec[0].sigmas.iter().zip(oracle.roots(3)) {
            let expect = kappa - lambda;
            assert!((sigma - expect).abs() / expect < 1e-2, "λ={lambda}: {sigma} vs {expect}");
        }
    }
}

#[test]
fn rayleigh_quotient_bounds() {
    let (_, _, w) = baseline(0.5, 257);
    let op = assemble(&w, 0, 0.5).unwrap();
    let spec = solve_modes(&w, 0.5, &[0], 2).unwrap();
    let sigma1 = spec[0].sigmas[0];
    let first = op.restrict(&spec[0].eigenfunctions[0]);
    let q = op.rayleigh_quotient(&first);
    assert!((q - sigma1).abs() <= 1e-6 * sigma1.abs());

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let r = w.grid.nodes();
    for trial in 0..100 {
        let u: Vec<f64> = if trial % 2 == 0 {
            (0..op.unknowns()).map(|_| rng.gen_range(-1.0..1.0)).collect()
        } else {
            let (a, b, c) = (rng.gen_range(-2.0..2.0), rng.gen_range(0.5..9.0), rng.gen_range(-1.0..1.0));
            (0..op.unknowns()).map(|i| (a + (b * r[i]).cos() + c * r[i] * r[i]) * (1.0 - r[i])).collect()
        };
        assert!(op.rayleigh_quotient(&u) >= sigma1 - 1e-8);
    }
}

#[test]
fn eigenfunctions_are_mass_orthonormal() {
    let (_, _, w) = baseline(0.5, 129);
    for k in [0, 3] {
        let op = assemble(&w, k, 0.5).unwrap();
        let spec = &solve_modes(&w, 0.5, &[k], 4).unwrap()[0];
        let u: Vec<Vec<f64>> = spec.eigenfunctions.iter().map(|f| op.restrict(f)).collect();
        for i in 0..4 {
            let mu = op.mass.matvec(&u[i]);
            for (j, v) in u.iter().enumerate() {
                let d: f64 = mu.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn nonradial_modes_ignore_the_average_term() {
    let (_, _, w) = baseline(0.5, 129);
    for k in 1..=4 {
        let a = assemble_with(&w, k, 0.5, true).unwrap();
        let b = assemble_with(&w, k, 0.5, false).unwrap();
        assert_eq!(a.mass, b.mass);
        assert_eq!(a.stiffness, b.stiffness);
    }
    // mode 0 genuinely differs
    let a = assemble_with(&w, 0, 0.5, true).unwrap();
    let b = assemble_with(&w, 0, 0.5, false).unwrap();
    assert_ne!(a.mass, b.mass);
}

#[test]
fn angular_block_is_diagonal_shift_of_radial_stiffness() {
    let (_, _, w) = baseline(0.0, 129);
    let k0 = assemble(&w, 0, 0.0).unwrap();
    let k2 = assemble(&w, 2, 0.0).unwrap();
    let r = w.grid.nodes();
    assert_eq!(k2.mu_k, 4.0);
    for i in 0..k2.unknowns() {
        for j in 0..k2.unknowns() {
            let node = i + 1;
            let mut expect = k0.stiffness.get(node, j + 1);
            if i == j {
                let a = 0.5 * (r[node - 1] + r[node]);
                let b = 0.5 * (r[node] + r[node + 1]);
                expect += 4.0 * PI * (b * b - a * a) / (r[node] * r[node]);
            }
            assert!((k2.stiffness.get(i, j) - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
    }
}

#[test]
fn first_eigenvalue_exceeds_dirichlet_and_shifts_are_positive() {
    for lambda in [0.0, 0.5] {
        let (_, _, w) = baseline(lambda, 257);
        let spec = solve_modes(&w, lambda, &[0, 1, 2, 3], 5).unwrap();
        let nu = dirichlet_first(&w, lambda).unwrap();
        assert!(spec[0].sigmas[0] > nu);
        for s in &spec {
            assert!(s.sigmas.iter().all(|x| lambda + x > 0.0));
        }
    }
}

#[test]
fn eigenvalues_converge_at_second_order() {
    let sig: Vec<Vec<f64>> = [65, 129, 257]
        .iter()
        .map(|&n| {
            let (_, _, w) = baseline(0.5, n);
            solve_modes(&w, 0.5, &[0], 3).unwrap().remove(0).sigmas
        })
        .collect();
    for k in 0..3 {
        let rate = ((sig[0][k] - sig[1][k]) / (sig[1][k] - sig[2][k])).abs().log2();
        assert!(rate >= 1.8, "eigenvalue {k}: rate {rate}");
    }
}

#[test]
fn radiality_and_simplicity_on_baseline() {
    let (_, _, w) = baseline(0.5, 257);
    let spec = solve_modes(&w, 0.5, &(0..=8).collect::<Vec<_>>(), 5).unwrap();
    let rep = radiality_check(&spec).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert_eq!(rep.modes_checked, (0..=8).collect::<Vec<_>>());
    let coarse = radial_simplicity_check(&spec[0]).unwrap();
    assert!(coarse.simple);

    let (_, _, fine) = baseline(0.5, 513);
    let fine_spec = solve_modes(&fine, 0.5, &[0], 5).unwrap();
    let refined = radial_simplicity_check(&fine_spec[0]).unwrap();
    assert_eq!(coarse.simple, refined.simple);
    assert!((coarse.min_gap - refined.min_gap).abs() < 0.01 * refined.min_gap);
}

#[test]
fn dirichlet_radial_spectrum_is_simple() {
    let w = WeightProfile::constant(RadialGrid::uniform(257, 2).unwrap(), 1.0).unwrap();
    let op = assemble_with(&w, 0, 0.0, false).unwrap();
    let e = gen_sym_eigen(&op.stiffness, &op.mass, 0.0, 0).unwrap();
    let spec = ModeSpectrum {
        mode_k: 0,
        lambda: 0.0,
        sigmas: e.values[..6].to_vec(),
        eigenfunctions: vec![],
        averages: vec![],
        boundary_slopes: vec![],
        boundary_curvatures: vec![],
        boundary_weight: 1.0,
        grid: w.grid.clone(),
    };
    assert!(radial_simplicity_check(&spec).unwrap().simple);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mode_zero_mass_is_the_oscillation_energy(seed in 0u64..1000) {
        let g = RadialGrid::graded(80, 3, 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = g.nodes().iter().map(|r| 1.0 + rng.gen_range(0.0..1.0) * (1.0 - r)).collect();
        let w = WeightProfile::new(g, v, mfe_core::mfe_solver::BoundaryClass::Positive).unwrap();
        let op = assemble(&w, 0, 0.0).unwrap();
        let full: Vec<f64> = (0..op.moments.len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        prop_assert!(op.apply_mass_full(&full).iter().sum::<f64>().abs() < 1e-10);

        let u = op.restrict(&full);
        let mut with_zero = op.expand(&u);
        let avg: f64 = with_zero.iter().zip(&op.moments).map(|(a, d)| a * d).sum::<f64>() / op.weight_total;
        with_zero.iter_mut().for_each(|x| *x -= avg);
        let osc: f64 = with_zero.iter().zip(&op.moments).map(|(a, d)| d * a * a).sum();
        let q = op.mass.quad_form(&u);
        prop_assert!(q >= -1e-10);
        prop_assert!((q - osc).abs() < 1e-10 * osc.max(1.0));
    }
}
