//! Mode-by-mode spectrum of the nonlocal linearized operator
//!
//! ```text
//!   -Δφ - λV(φ - ⟨φ⟩) = σ V(φ - ⟨φ⟩),   ⟨φ⟩ = ∫Vφ / ∫V,   φ = 0 on ∂B_1.
//! ```
//!
//! Separating `φ = φ_k(r) e_k(θ)` with spherical harmonics of degree `k`
//! leaves, for each `k`, the radial pencil `K φ = (λ + σ) M φ`. `K` is the
//! piecewise-linear stiffness of `-φ'' - (n-1)/r φ' + μ_k/r² φ` and `M` the
//! lumped `V`-weighted mass. Only `k = 0` carries the rank-one average term;
//! the angular mean of `e_k` vanishes for `k ≥ 1`.

use crate::error::{Error, Result};
use crate::mfe_solver::{BoundaryClass, WeightProfile};
use crate::numerics::{
    gen_sym_eigen, right_first_derivative, second_derivative, weighted_integral, RadialGrid,
    SymMatrix,
};

/// Eigenvalue `k(k + n - 2)` of `-Δ_{S^{n-1}}` on degree-`k` harmonics.
pub fn angular_eigenvalue(dim: usize, k: usize) -> f64 {
    (k * (k + dim - 2)) as f64
}

/// Discretized pencil for one angular mode. Matrices act on the unknown
/// nodes `first_unknown..N` of the grid (`N` = last node, where φ = 0).
#[derive(Debug, Clone)]
pub struct ModeOperator {
    pub mode_k: usize,
    pub mu_k: f64,
    pub lambda: f64,
    pub stiffness: SymMatrix,
    pub mass: SymMatrix,
    /// `∫ V` under the same lumped quadrature as `mass`.
    pub weight_total: f64,
    /// Lumped moments `∫_{cv_i} V r^{n-1}` (times `|S^{n-1}|`) on every node.
    pub moments: Vec<f64>,
    pub first_unknown: usize,
    grid: RadialGrid,
}

impl ModeOperator {
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn unknowns(&self) -> usize {
        self.stiffness.order()
    }

    /// Pads unknown values to all grid nodes with the boundary zeros.
    pub fn expand(&self, u: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.grid.len()];
        full[self.first_unknown..self.first_unknown + u.len()].copy_from_slice(u);
        full
    }

    /// Unknown-node values of a full-grid sample vector.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        full[self.first_unknown..self.first_unknown + self.unknowns()].to_vec()
    }

    /// The mass action on a full-grid vector (no boundary condition imposed),
    /// `D u - w (wᵀu) / W` for mode 0. Its entries sum to the discrete
    /// `∫ V (u - ⟨u⟩)`, which vanishes identically.
    pub fn apply_mass_full(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.moments.len());
        let mut out: Vec<f64> = self.moments.iter().zip(u).map(|(d, x)| d * x).collect();
        if self.mode_k == 0 {
            let moment: f64 = out.iter().sum();
            for (o, d) in out.iter_mut().zip(&self.moments) {
                *o -= d * moment / self.weight_total;
            }
        }
        out
    }

    /// `(uᵀKu - λ uᵀMu) / uᵀMu` for unknown-node values `u`.
    pub fn rayleigh_quotient(&self, u: &[f64]) -> f64 {
        let m = self.mass.quad_form(u);
        (self.stiffness.quad_form(u) - self.lambda * m) / m
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

fn gauss(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    GAUSS5.iter().map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

fn control_volume(nodes: &[f64], i: usize) -> (f64, f64) {
    let last = nodes.len() - 1;
    let left = if i == 0 { 0.0 } else { 0.5 * (nodes[i - 1] + nodes[i]) };
    let right = if i == last { 1.0 } else { 0.5 * (nodes[i] + nodes[i + 1]) };
    (left, right)
}

/// Lumped `V`-moments per node. Where `V` vanishes at `r = 1`, the last cell
/// is integrated against `V(r_{N-1}) ((1-r)/(1-r_{N-1}))^β` instead of the
/// node values.
fn lumped_moments(weight: &WeightProfile) -> Vec<f64> {
    let g = &weight.grid;
    let r = g.nodes();
    let area = g.sphere_area();
    let last = r.len() - 1;
    let mut d: Vec<f64> = (0..=last)
        .map(|i| {
            let (a, b) = control_volume(r, i);
            area * weight.v[i] * g.shell_measure(a, b)
        })
        .collect();
    if let BoundaryClass::Vanishing { beta, .. } = weight.boundary_class {
        let rp = r[last - 1];
        let vp = weight.v[last - 1];
        let n = g.dim() as i32;
        let model = |x: f64| vp * ((1.0 - x) / (1.0 - rp)).powf(beta) * x.powi(n - 1);
        let mid = 0.5 * (rp + 1.0);
        let (a, _) = control_volume(r, last - 1);
        d[last - 1] = area * (vp * g.shell_measure(a, rp) + gauss(rp, mid, model));
        d[last] = area * gauss(mid, 1.0, model);
    }
    d
}

/// Assembles mode `mode_k`; mode 0 includes the rank-one average correction.
pub fn assemble(weight: &WeightProfile, mode_k: usize, lambda: f64) -> Result<ModeOperator> {
    assemble_with(weight, mode_k, lambda, true)
}

/// As [`assemble`], with the average correction optionally left out. For
/// `mode_k ≥ 1` both choices give the same matrices.
pub fn assemble_with(
    weight: &WeightProfile,
    mode_k: usize,
    lambda: f64,
    nonlocal: bool,
) -> Result<ModeOperator> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::arg(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    let g = &weight.grid;
    let r = g.nodes();
    let area = g.sphere_area();
    let last = r.len() - 1;
    let first = usize::from(mode_k > 0);
    let order = last - first;
    let mu_k = angular_eigenvalue(g.dim(), mode_k);

    // cell conductances |S| ∫_cell r^{n-1} / h²
    let cond: Vec<f64> = (0..last)
        .map(|i| {
            let h = r[i + 1] - r[i];
            area * g.shell_measure(r[i], r[i + 1]) / (h * h)
        })
        .collect();
    let mut stiffness = SymMatrix::zeros(order);
    for (c, &k) in cond.iter().enumerate() {
        // cell c couples nodes c and c + 1
        let (a, b) = (c as isize - first as isize, c as isize + 1 - first as isize);
        let inside = |j: isize| j >= 0 && (j as usize) < order;
        if inside(a) {
            stiffness.add_to(a as usize, a as usize, k);
        }
        if inside(b) {
            stiffness.add_to(b as usize, b as usize, k);
        }
        if inside(a) && inside(b) {
            stiffness.add_to(a as usize, b as usize, -k);
        }
    }
    if mode_k > 0 {
        for j in 0..order {
            let i = j + first;
            let (a, b) = control_volume(r, i);
            stiffness.add_to(j, j, mu_k * area * g.shell_measure(a, b) / (r[i] * r[i]));
        }
    }

    let moments = lumped_moments(weight);
    let weight_total: f64 = moments.iter().sum();
    let mut mass = SymMatrix::diagonal(&moments[first..last]);
    if nonlocal {
        // angular mean of the basis function: the radial moment for k = 0,
        // zero for every nonconstant harmonic
        let mean: Vec<f64> = if mode_k == 0 {
            moments[first..last].to_vec()
        } else {
            vec![0.0; order]
        };
        mass.add_outer(-1.0 / weight_total, &mean);
    }

    Ok(ModeOperator {
        mode_k,
        mu_k,
        lambda,
        stiffness,
        mass,
        weight_total,
        moments,
        first_unknown: first,
        grid: g.clone(),
    })
}

/// Lowest eigenpairs of one angular mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub mode_k: usize,
    pub lambda: f64,
    /// Ascending `σ = μ - λ`.
    pub sigmas: Vec<f64>,
    /// Samples on every grid node, `M`-orthonormal on the unknowns.
    pub eigenfunctions: Vec<Vec<f64>>,
    /// `⟨φ⟩` per eigenfunction; zero for `k ≥ 1`.
    pub averages: Vec<f64>,
    /// One-sided `φ'(1)`.
    pub boundary_slopes: Vec<f64>,
    /// One-sided `φ''(1)`.
    pub boundary_curvatures: Vec<f64>,
    /// `V(1)`.
    pub boundary_weight: f64,
    pub grid: RadialGrid,
}

impl ModeSpectrum {
    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }
}

/// `φ'(1)` from the last three nodes.
pub fn boundary_slope(phi: &[f64], grid: &RadialGrid) -> f64 {
    let (x, y) = last_three(phi, grid);
    right_first_derivative(x, y)
}

/// `φ''(1)` from the last three nodes.
pub fn boundary_curvature(phi: &[f64], grid: &RadialGrid) -> f64 {
    let (x, y) = last_three(phi, grid);
    second_derivative(x, y)
}

fn last_three(phi: &[f64], grid: &RadialGrid) -> ([f64; 3], [f64; 3]) {
    let r = grid.nodes();
    let n = r.len();
    ([r[n - 3], r[n - 2], r[n - 1]], [phi[n - 3], phi[n - 2], phi[n - 1]])
}

/// `⟨u⟩ = ∫Vu / ∫V` with the shared quadrature.
pub fn weighted_average(u: &[f64], weight: &WeightProfile) -> Result<f64> {
    let vu: Vec<f64> = u.iter().zip(&weight.v).map(|(a, b)| a * b).collect();
    Ok(weighted_integral(&vu, &weight.grid)? / weighted_integral(&weight.v, &weight.grid)?)
}

fn solve_operator(op: &ModeOperator, weight: &WeightProfile, count: usize) -> Result<ModeSpectrum> {
    if count == 0 {
        return Err(Error::arg("eigen count must be at least 1"));
    }
    if count > op.unknowns() {
        return Err(Error::arg(format!(
            "requested {count} eigenpairs but mode {} has {} unknowns",
            op.mode_k,
            op.unknowns()
        )));
    }
    let eig = gen_sym_eigen(&op.stiffness, &op.mass, 0.0, 1)?;
    let grid = &weight.grid;
    let mut spec = ModeSpectrum {
        mode_k: op.mode_k,
        lambda: op.lambda,
        sigmas: Vec::with_capacity(count),
        eigenfunctions: Vec::with_capacity(count),
        averages: Vec::with_capacity(count),
        boundary_slopes: Vec::with_capacity(count),
        boundary_curvatures: Vec::with_capacity(count),
        boundary_weight: *weight.v.last().unwrap(),
        grid: grid.clone(),
    };
    for (mu, v) in eig.values.iter().zip(&eig.vectors).take(count) {
        let mut phi = op.expand(v);
        let mut avg = if op.mode_k == 0 { weighted_average(&phi, weight)? } else { 0.0 };
        let flip = if op.mode_k == 0 && avg != 0.0 {
            avg < 0.0
        } else {
            // no average to orient by: make the largest excursion positive
            let peak = phi.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
            peak < 0.0
        };
        if flip {
            phi.iter_mut().for_each(|x| *x = -*x);
            avg = -avg;
        }
        spec.sigmas.push(mu - op.lambda);
        spec.averages.push(avg);
        spec.boundary_slopes.push(boundary_slope(&phi, grid));
        spec.boundary_curvatures.push(boundary_curvature(&phi, grid));
        spec.eigenfunctions.push(phi);
    }
    Ok(spec)
}

/// The lowest `count` eigenpairs of each requested mode.
pub fn solve_modes(
    weight: &WeightProfile,
    lambda: f64,
    modes: &[usize],
    count: usize,
) -> Result<Vec<ModeSpectrum>> {
    modes
        .iter()
        .map(|&k| solve_operator(&assemble(weight, k, lambda)?, weight, count))
        .collect()
}

/// `ν₁`: smallest eigenvalue of mode 0 without the average correction.
pub fn dirichlet_first(weight: &WeightProfile, lambda: f64) -> Result<f64> {
    let op = assemble_with(weight, 0, lambda, false)?;
    let eig = gen_sym_eigen(&op.stiffness, &op.mass, 0.0, 0)?;
    Ok(eig.values[0] - lambda)
}

/// Findings of [`radiality_check`]; every list is empty when all checks pass.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialityReport {
    /// Modes present, ascending.
    pub modes_checked: Vec<usize>,
    /// `(mode, index, σ)` for each `σ ≤ 0` outside mode 0.
    pub nonradial_nonpositive: Vec<(usize, usize, f64)>,
    /// `(index, φ'(1), bound)` for mode-0 eigenfunctions with a slope above the bound.
    pub slope_violations: Vec<(usize, f64, f64)>,
    /// `(index, relative gap)` where the discrete `φ''(1)` strays more than
    /// 10% from `(λ+σ)V(1)⟨φ⟩`. Only evaluated for a weight positive at `r = 1`.
    pub curvature_violations: Vec<(usize, f64)>,
}

impl RadialityReport {
    pub fn passed(&self) -> bool {
        self.nonradial_nonpositive.is_empty()
            && self.slope_violations.is_empty()
            && self.curvature_violations.is_empty()
    }
}

/// Checks that non-positive eigenvalues occur only in mode 0 and that the
/// radial eigenfunctions satisfy `φ'(1) = 0` (to `10h`) and the boundary
/// identity `φ''(1) = (λ+σ)V(1)⟨φ⟩`.
pub fn radiality_check(spectra: &[ModeSpectrum]) -> Result<RadialityReport> {
    let mut modes: Vec<usize> = spectra.iter().map(|s| s.mode_k).collect();
    modes.sort_unstable();
    modes.dedup();
    if !(0..=3).all(|k| modes.contains(&k)) {
        return Err(Error::arg("radiality check needs modes 0 through 3"));
    }
    let mut report = RadialityReport {
        modes_checked: modes,
        nonradial_nonpositive: Vec::new(),
        slope_violations: Vec::new(),
        curvature_violations: Vec::new(),
    };
    for s in spectra {
        if s.mode_k == 0 {
            let bound = 10.0 * s.grid.max_spacing();
            for (i, slope) in s.boundary_slopes.iter().enumerate() {
                if slope.abs() > bound {
                    report.slope_violations.push((i, *slope, bound));
                }
                if s.boundary_weight > 0.0 && s.averages[i] != 0.0 {
                    let expect = (s.lambda + s.sigmas[i]) * s.boundary_weight * s.averages[i];
                    let gap = (s.boundary_curvatures[i] - expect).abs() / expect.abs();
                    if gap > 0.1 {
                        report.curvature_violations.push((i, gap));
                    }
                }
            }
        } else {
            for (i, sigma) in s.sigmas.iter().enumerate() {
                if *sigma <= 0.0 {
                    report.nonradial_nonpositive.push((s.mode_k, i, *sigma));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplicityReport {
    pub min_gap: f64,
    pub floor: f64,
    pub simple: bool,
}

/// Gaps below this are treated as a numerically repeated radial eigenvalue.
pub const SIMPLICITY_FLOOR: f64 = 1e-3;

/// Checks that consecutive mode-0 eigenvalues are separated.
pub fn radial_simplicity_check(spectrum: &ModeSpectrum) -> Result<SimplicityReport> {
    if spectrum.mode_k != 0 {
        return Err(Error::arg("simplicity check applies to mode 0"));
    }
    if spectrum.len() < 5 {
        return Err(Error::arg("simplicity check needs at least 5 eigenvalues"));
    }
    let min_gap = spectrum.sigmas.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    Ok(SimplicityReport { min_gap, floor: SIMPLICITY_FLOOR, simple: min_gap > SIMPLICITY_FLOOR })
}
