//! Generalized nodal domains of radial eigenfunctions.
//!
//! A zero `r₀` with `φ(r₀) = φ'(r₀) = 0` and `φ''(r₀) > 0` is a singular
//! point; same-sign regions separated only by singular spheres form a single
//! generalized nodal domain. Where the weight vanishes at `r = 1`, the
//! boundary zero is classified instead by its fitted vanishing order.
//! Domains are listed outermost first, so index 1 touches `r = 1`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mfe_solver::WeightProfile;
use crate::numerics::{
    central_first_derivative, right_first_derivative, second_derivative, weighted_integral,
    RadialGrid,
};
use crate::spectral::ModeSpectrum;

pub const MAX_ZEROS: usize = 64;
/// Minimum separation of two zeros, in local grid cells.
const MIN_ZERO_CELLS: f64 = 3.0;
/// RMS log-residual above which a vanishing-order fit is rejected.
pub const POOR_FIT_THRESHOLD: f64 = 0.1;
/// Default number of nodes in a vanishing-order fit window.
pub const DEFAULT_FIT_WINDOW: usize = 12;

/// Thresholds for zero and slope detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodalTolerances {
    pub zero_tol: f64,
    pub slope_tol: f64,
}

impl NodalTolerances {
    /// `zero_tol = 1e-8‖φ‖∞`; `slope_tol = max(1e-6‖φ'‖∞, h²‖φ''‖∞)`, the
    /// second term being the error scale of the one-sided boundary stencil.
    pub fn for_profile(phi: &[f64], grid: &RadialGrid) -> Self {
        let sup = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let r = grid.nodes();
        let (mut d1, mut d2) = (0.0f64, 0.0f64);
        for i in 1..r.len() - 1 {
            let x = [r[i - 1], r[i], r[i + 1]];
            let y = [phi[i - 1], phi[i], phi[i + 1]];
            d1 = d1.max(central_first_derivative(x, y).abs());
            d2 = d2.max(second_derivative(x, y).abs());
        }
        let h = grid.max_spacing();
        Self { zero_tol: 1e-8 * sup, slope_tol: (1e-6 * d1).max(h * h * d2) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub radius: f64,
    /// `true` when `φ` changes sign across the zero.
    pub crossing: bool,
}

/// Cubic Lagrange interpolant through nodes `lo..lo+4`.
fn cubic(r: &[f64], phi: &[f64], lo: usize, x: f64) -> f64 {
    let mut s = 0.0;
    for j in lo..lo + 4 {
        let mut l = 1.0;
        for k in lo..lo + 4 {
            if k != j {
                l *= (x - r[k]) / (r[j] - r[k]);
            }
        }
        s += phi[j] * l;
    }
    s
}

fn stencil_start(len: usize, i: usize) -> usize {
    i.saturating_sub(1).min(len - 4)
}

/// Zeros of `φ` in `(0, 1]`, ascending. Sign changes between nodes are
/// bisected on a local cubic interpolant; sampled zeros must be local minima
/// of `|φ|` below `zero_tol`, and tangential ones also need a slope below
/// `slope_tol`. The origin is never reported.
pub fn find_zeros(phi: &[f64], grid: &RadialGrid, tol: &NodalTolerances) -> Result<Vec<Zero>> {
    let r = grid.nodes();
    if phi.len() != r.len() {
        return Err(Error::arg("sample count differs from grid size"));
    }
    let last = r.len() - 1;
    let small = |i: usize| phi[i].abs() <= tol.zero_tol;
    let mut zeros = Vec::new();
    for i in 1..=last {
        if small(i) {
            let local_min = phi[i].abs() <= phi[i - 1].abs()
                && (i == last || phi[i].abs() <= phi[i + 1].abs());
            if !local_min {
                continue;
            }
            if i == last {
                zeros.push(Zero { radius: 1.0, crossing: false });
                continue;
            }
            // sign on either side, skipping samples inside the tolerance band
            let left = (0..i).rev().find(|&j| !small(j)).map(|j| phi[j].signum());
            let right = (i + 1..=last).find(|&j| !small(j)).map(|j| phi[j].signum());
            let crossing = matches!((left, right), (Some(a), Some(b)) if a != b);
            let slope = central_first_derivative(
                [r[i - 1], r[i], r[i + 1]],
                [phi[i - 1], phi[i], phi[i + 1]],
            );
            if crossing || slope.abs() <= tol.slope_tol {
                zeros.push(Zero { radius: r[i], crossing });
            }
        } else if i < last && !small(i + 1) && phi[i] * phi[i + 1] < 0.0 {
            let lo = stencil_start(r.len(), i);
            let (mut a, mut b) = (r[i], r[i + 1]);
            let fa = cubic(r, phi, lo, a).signum();
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if cubic(r, phi, lo, m).signum() == fa {
                    a = m;
                } else {
                    b = m;
                }
            }
            zeros.push(Zero { radius: 0.5 * (a + b), crossing: true });
        }
        if zeros.len() > MAX_ZEROS {
            return Err(Error::Resolution {
                radius: zeros.last().unwrap().radius,
                reason: format!("more than {MAX_ZEROS} zeros"),
            });
        }
    }
    for w in zeros.windows(2) {
        let j = r.partition_point(|x| *x <= 0.5 * (w[0].radius + w[1].radius)).clamp(1, last);
        let h = r[j] - r[j - 1];
        if w[1].radius - w[0].radius < MIN_ZERO_CELLS * h {
            return Err(Error::Resolution {
                radius: w[0].radius,
                reason: "zeros closer than 3 grid cells; refine the grid".into(),
            });
        }
    }
    Ok(zeros)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint {
    pub radius: f64,
    pub second_derivative: f64,
    /// Fitted order, present only where the weight vanishes at the point.
    pub vanishing_order: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroClass {
    Regular,
    Singular(SingularPoint),
}

/// Data of the eigenpair that owns `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair<'a> {
    pub phi: &'a [f64],
    pub lambda: f64,
    pub sigma: f64,
    pub average: f64,
}

/// Decides whether the zero at `radius` is a singular point. The stencil
/// value of `φ''` must agree in sign with `(λ+σ)V⟨φ⟩`, which breaks ties
/// when the stencil is below its noise level.
pub fn classify_singular(
    pair: &Eigenpair<'_>,
    weight: &WeightProfile,
    radius: f64,
    tol: &NodalTolerances,
) -> Result<ZeroClass> {
    let g = &weight.grid;
    let r = g.nodes();
    let phi = pair.phi;
    let last = r.len() - 1;
    let i = g.nearest(radius);
    if phi[i].abs() > tol.zero_tol {
        return Ok(ZeroClass::Regular);
    }
    let (slope, curv) = if i == last {
        let x = [r[last - 2], r[last - 1], r[last]];
        let y = [phi[last - 2], phi[last - 1], phi[last]];
        (right_first_derivative(x, y), second_derivative(x, y))
    } else if i == 0 {
        return Ok(ZeroClass::Regular);
    } else {
        let x = [r[i - 1], r[i], r[i + 1]];
        let y = [phi[i - 1], phi[i], phi[i + 1]];
        (central_first_derivative(x, y), second_derivative(x, y))
    };
    if slope.abs() > tol.slope_tol {
        return Ok(ZeroClass::Regular);
    }

    if weight.v[i] == 0.0 {
        let fit = fit_vanishing_order(phi, g, r[i], DEFAULT_FIT_WINDOW)?;
        return Ok(if fit.beta.is_finite() && fit.beta > 2.0 {
            ZeroClass::Singular(SingularPoint {
                radius: r[i],
                second_derivative: curv,
                vanishing_order: Some(fit.beta),
            })
        } else {
            ZeroClass::Regular
        });
    }

    let expected = (pair.lambda + pair.sigma) * weight.v[i] * pair.average;
    let h = g.cell(i.min(last - 1));
    let noise = tol.zero_tol / (h * h);
    if curv.abs() > noise && expected != 0.0 && curv.signum() != expected.signum() {
        return Err(Error::Diagnostic(format!(
            "second derivative {curv:e} at r = {} contradicts equation value {expected:e}",
            r[i]
        )));
    }
    if expected > 0.0 {
        Ok(ZeroClass::Singular(SingularPoint {
            radius: r[i],
            second_derivative: curv,
            vanishing_order: None,
        }))
    } else {
        Err(Error::Diagnostic(format!(
            "tangential zero at r = {} with non-positive curvature {expected:e}",
            r[i]
        )))
    }
}

/// A generalized nodal domain `(inner, outer)` with the sign of `φ` on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub inner: f64,
    pub outer: f64,
    pub sign: i8,
}

/// Partitions `(0, 1)` at the interior zeros and merges neighbours that are
/// separated only by singular points. `singular[j]` flags `zeros[j]`.
pub fn count_domains(
    phi: &[f64],
    grid: &RadialGrid,
    zeros: &[Zero],
    singular: &[bool],
    tol: &NodalTolerances,
) -> Result<Vec<Domain>> {
    assert_eq!(zeros.len(), singular.len());
    let r = grid.nodes();
    let interior: Vec<(f64, bool)> = zeros
        .iter()
        .zip(singular)
        .filter(|(z, _)| z.radius < 1.0)
        .map(|(z, s)| (z.radius, *s))
        .collect();
    let mut cuts = vec![0.0];
    cuts.extend(interior.iter().map(|z| z.0));
    cuts.push(1.0);

    let mut pieces: Vec<Domain> = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let peak = (0..r.len())
            .filter(|&i| r[i] > w[0] && r[i] < w[1])
            .map(|i| phi[i])
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if peak.abs() <= tol.zero_tol {
            return Err(Error::Resolution {
                radius: 0.5 * (w[0] + w[1]),
                reason: "no sample resolves the sign between consecutive zeros".into(),
            });
        }
        pieces.push(Domain { inner: w[0], outer: w[1], sign: peak.signum() as i8 });
    }

    let mut domains: Vec<Domain> = vec![pieces[0]];
    for (k, piece) in pieces.iter().enumerate().skip(1) {
        let (radius, is_singular) = interior[k - 1];
        let prev = domains.last_mut().unwrap();
        if piece.sign == prev.sign {
            if !is_singular {
                return Err(Error::Diagnostic(format!(
                    "same sign on both sides of the regular zero at r = {radius}"
                )));
            }
            prev.outer = piece.outer;
        } else {
            domains.push(*piece);
        }
    }
    domains.reverse();
    Ok(domains)
}

/// `m_j = ∫_{Ω_j} Vφ / ∫V` with each node credited to the domain that
/// contains it, so that `Σ m_j` reproduces `⟨φ⟩` under the same quadrature.
pub fn weighted_averages(
    phi: &[f64],
    weight: &WeightProfile,
    domains: &[Domain],
) -> Result<(Vec<f64>, f64)> {
    let g = &weight.grid;
    let total = weighted_integral(&weight.v, g)?;
    let owner = |x: f64| {
        domains
            .iter()
            .position(|d| x >= d.inner && x < d.outer)
            .unwrap_or(0) // r = 1 belongs to the outermost domain
    };
    let mut masked = vec![vec![0.0; phi.len()]; domains.len()];
    for (i, x) in g.nodes().iter().enumerate() {
        masked[owner(*x)][i] = phi[i] * weight.v[i];
    }
    let m: Vec<f64> = masked
        .iter()
        .map(|u| weighted_integral(u, g).map(|s| s / total))
        .collect::<Result<_>>()?;
    let m_total = m.iter().sum();
    Ok((m, m_total))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanishingFit {
    pub beta: f64,
    pub coefficient: f64,
    /// RMS residual of the log-log fit.
    pub fit_residual: f64,
}

/// Fits `|u(r)| ≈ a |r - r0|^β` by least squares on `log|u|` against
/// `log|r - r0|`, using the `window` nodes nearest `r0` whose samples sit
/// above the round-off floor.
pub fn fit_vanishing_order(
    samples: &[f64],
    grid: &RadialGrid,
    r0: f64,
    window: usize,
) -> Result<VanishingFit> {
    if window < 8 {
        return Err(Error::arg("fit window needs at least 8 nodes"));
    }
    if samples.len() != grid.len() {
        return Err(Error::arg("sample count differs from grid size"));
    }
    let r = grid.nodes();
    let sup = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = 1e-12 * sup;
    let mut idx: Vec<usize> = (0..r.len()).filter(|&i| (r[i] - r0).abs() > 0.0).collect();
    idx.sort_by(|&a, &b| (r[a] - r0).abs().total_cmp(&(r[b] - r0).abs()));
    let pts: Vec<(f64, f64)> = idx
        .into_iter()
        .filter(|&i| samples[i].abs() > floor)
        .take(window)
        .map(|i| ((r[i] - r0).abs().ln(), samples[i].abs().ln()))
        .collect();
    if pts.len() < window {
        return Err(Error::PoorFit { residual: f64::INFINITY });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let beta = sxy / sxx;
    let intercept = my - beta * mx;
    let fit_residual =
        (pts.iter().map(|p| (p.1 - intercept - beta * p.0).powi(2)).sum::<f64>() / k).sqrt();
    if !(fit_residual <= POOR_FIT_THRESHOLD) {
        return Err(Error::PoorFit { residual: fit_residual });
    }
    Ok(VanishingFit { beta, coefficient: intercept.exp(), fit_residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodalReport {
    /// 1-based position of the eigenfunction in its mode-0 spectrum.
    pub eigen_index: usize,
    pub zeros: Vec<Zero>,
    pub singular_points: Vec<SingularPoint>,
    /// Outermost first.
    pub domains: Vec<Domain>,
    /// `m_j`, aligned with `domains`.
    pub averages: Vec<f64>,
    pub m_total: f64,
    /// The eigenfunction's `⟨φ⟩` as reported by the spectral solve.
    pub average: f64,
    pub bound_satisfied: bool,
    /// Boundary radii of negative domains where the outward slope fails to
    /// exceed `5h‖φ''‖∞`.
    pub hopf_violations: Vec<f64>,
    pub tolerances: NodalTolerances,
}

impl NodalReport {
    pub fn domain_count(&self) -> usize {
        self.domains.len()
    }

    /// `(-1)^j m_j < 0` for every `j` (outermost `j = 1`).
    pub fn signs_alternate(&self) -> bool {
        self.averages
            .iter()
            .enumerate()
            .all(|(j, m)| if j % 2 == 0 { *m > 0.0 } else { *m < 0.0 })
    }
}

/// Slope of the local cubic interpolant at `x`.
fn cubic_slope(r: &[f64], phi: &[f64], x: f64) -> f64 {
    let i = r.partition_point(|t| *t <= x).clamp(1, r.len() - 1) - 1;
    let lo = stencil_start(r.len(), i);
    let h = 1e-3 * (r[i + 1] - r[i]);
    let a = (x - h).max(r[lo]);
    let b = (x + h).min(r[lo + 3]);
    (cubic(r, phi, lo, b) - cubic(r, phi, lo, a)) / (b - a)
}

/// Full nodal analysis of the `index`-th (0-based) eigenfunction of a
/// mode-0 spectrum.
pub fn analyze(spectrum: &ModeSpectrum, index: usize, weight: &WeightProfile) -> Result<NodalReport> {
    if spectrum.mode_k != 0 {
        return Err(Error::arg("nodal analysis applies to radial (mode 0) eigenfunctions"));
    }
    let phi = spectrum
        .eigenfunctions
        .get(index)
        .ok_or_else(|| Error::arg(format!("eigenfunction {index} not computed")))?;
    let g = &weight.grid;
    let r = g.nodes();
    let tol = NodalTolerances::for_profile(phi, g);
    let pair = Eigenpair {
        phi,
        lambda: spectrum.lambda,
        sigma: spectrum.sigmas[index],
        average: spectrum.averages[index],
    };
    let zeros = find_zeros(phi, g, &tol)?;
    let mut singular = Vec::with_capacity(zeros.len());
    let mut singular_points = Vec::new();
    for z in &zeros {
        match if z.crossing { ZeroClass::Regular } else { classify_singular(&pair, weight, z.radius, &tol)? } {
            ZeroClass::Singular(p) => {
                singular.push(true);
                singular_points.push(p);
            }
            ZeroClass::Regular => singular.push(false),
        }
    }
    let domains = count_domains(phi, g, &zeros, &singular, &tol)?;
    let (averages, m_total) = weighted_averages(phi, weight, &domains)?;

    let mut hopf_violations = Vec::new();
    if pair.average > 0.0 {
        for d in domains.iter().filter(|d| d.sign < 0) {
            for (x, outward) in [(d.inner, -1.0), (d.outer, 1.0)] {
                if x <= 0.0 {
                    continue;
                }
                let j = g.nearest(x).clamp(1, r.len() - 2);
                let h = g.cell(j);
                let curv = (1..r.len() - 1)
                    .map(|i| {
                        second_derivative(
                            [r[i - 1], r[i], r[i + 1]],
                            [phi[i - 1], phi[i], phi[i + 1]],
                        )
                        .abs()
                    })
                    .fold(0.0, f64::max);
                if outward * cubic_slope(r, phi, x) <= 5.0 * h * curv {
                    hopf_violations.push(x);
                }
            }
        }
    }

    let eigen_index = index + 1;
    Ok(NodalReport {
        eigen_index,
        bound_satisfied: domains.len() <= 2 * eigen_index,
        zeros,
        singular_points,
        domains,
        averages,
        m_total,
        average: pair.average,
        hopf_violations,
        tolerances: tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSummary {
    /// Eigen indices whose domain count exceeds `2k`.
    pub violations: Vec<usize>,
    /// Largest observed domain count per eigen index.
    pub max_counts: BTreeMap<usize, usize>,
}

impl BoundSummary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_bounds(reports: &[NodalReport]) -> BoundSummary {
    let mut max_counts = BTreeMap::new();
    let mut violations = Vec::new();
    for rep in reports {
        let e = max_counts.entry(rep.eigen_index).or_insert(0);
        *e = (*e).max(rep.domain_count());
        if rep.domain_count() > 2 * rep.eigen_index {
            violations.push(rep.eigen_index);
        }
    }
    BoundSummary { violations, max_counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sampled(count: usize, f: impl Fn(f64) -> f64) -> (RadialGrid, Vec<f64>) {
        let g = RadialGrid::uniform(count, 2).unwrap();
        let u = g.nodes().iter().map(|r| f(*r)).collect();
        (g, u)
    }

    #[test]
    fn sine_zeros() {
        // 200 cells: 1/3 and 2/3 fall between nodes
        let (g, u) = sampled(201, |r| (3.0 * PI * r).sin());
        let tol = NodalTolerances::for_profile(&u, &g);
        let z = find_zeros(&u, &g, &tol).unwrap();
        let radii: Vec<f64> = z.iter().map(|z| z.radius).collect();
        assert_eq!(radii.len(), 3, "{radii:?}");
        for (a, b) in radii.iter().zip([1.0 / 3.0, 2.0 / 3.0, 1.0]) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
        assert!(z[0].crossing && z[1].crossing);
    }

    #[test]
    fn sine_zeros_on_nodes() {
        let (g, u) = sampled(301, |r| (3.0 * PI * r).sin());
        let tol = NodalTolerances::for_profile(&u, &g);
        let z = find_zeros(&u, &g, &tol).unwrap();
        assert_eq!(z.len(), 3);
        assert!(z[0].crossing && z[1].crossing);
        let flags = vec![false; 3];
        let d = count_domains(&u, &g, &z, &flags, &tol).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d[0].sign, 1);
        assert_eq!(d[1].sign, -1);
    }

    #[test]
    fn squared_profile_has_tangential_boundary_zero() {
        let (g, u) = sampled(129, |r| (1.0 - r).powi(2));
        let tol = NodalTolerances::for_profile(&u, &g);
        let z = find_zeros(&u, &g, &tol).unwrap();
        assert_eq!(z, vec![Zero { radius: 1.0, crossing: false }]);
    }

    #[test]
    fn singular_sphere_merges_shell() {
        // sign change at 0.2, touching zero at 0.5
        let (g, u) = sampled(257, |r| (r - 0.2) * (r - 0.5).powi(2) * (1.0 + r));
        let tol = NodalTolerances::for_profile(&u, &g);
        let z = find_zeros(&u, &g, &tol).unwrap();
        let inner: Vec<&Zero> = z.iter().filter(|z| z.radius < 1.0).collect();
        assert_eq!(inner.len(), 2, "{z:?}");
        assert!(inner[0].crossing && !inner[1].crossing);
        let singular: Vec<bool> = z.iter().map(|z| !z.crossing && z.radius < 1.0).collect();
        let d = count_domains(&u, &g, &z, &singular, &tol).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d[0].inner - 0.2).abs() < 1e-9 && d[0].outer == 1.0 && d[0].sign == 1);
        // without the singular flag the same profile is inconsistent
        let flags = vec![false; z.len()];
        assert!(count_domains(&u, &g, &z, &flags, &tol).is_err());
    }

    #[test]
    fn domain_count_is_scale_invariant() {
        let (g, u) = sampled(201, |r| (5.0 * r).cos() + 0.1);
        for s in [1e-6, 1.0, 3e4] {
            let v: Vec<f64> = u.iter().map(|x| s * x).collect();
            let tol = NodalTolerances::for_profile(&v, &g);
            let z = find_zeros(&v, &g, &tol).unwrap();
            let flags = vec![false; z.len()];
            assert_eq!(count_domains(&v, &g, &z, &flags, &tol).unwrap().len(), 3);
        }
    }

    #[test]
    fn crowded_zeros_are_a_resolution_error() {
        let (g, u) = sampled(65, |r| (40.0 * PI * r).sin() + 0.001);
        let tol = NodalTolerances::for_profile(&u, &g);
        assert!(matches!(find_zeros(&u, &g, &tol), Err(Error::Resolution { .. })));
    }

    #[test]
    fn fit_recovers_monomial_order() {
        let (g, u) = sampled(513, |r| 3.0 * (1.0 - r).powi(2));
        let f = fit_vanishing_order(&u, &g, 1.0, 10).unwrap();
        assert!((f.beta - 2.0).abs() < 1e-3);
        assert!((f.coefficient - 3.0).abs() < 1e-3);
        assert!(fit_vanishing_order(&u, &g, 1.0, 4).is_err());
    }

    #[test]
    fn single_domain_average_is_total() {
        let g = RadialGrid::uniform(129, 2).unwrap();
        let w = WeightProfile::constant(g.clone(), 2.0).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|r| 1.0 - r * r).collect();
        let d = [Domain { inner: 0.0, outer: 1.0, sign: 1 }];
        let (m, total) = weighted_averages(&u, &w, &d).unwrap();
        assert!((m[0] - 0.5).abs() < 1e-12 && (total - 0.5).abs() < 1e-12);
    }
}
