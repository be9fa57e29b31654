//! Finite-dimensional matrices built from the signed nodal averages
//! `m = (m₁, …, m_N)` of an eigenfunction, and the spectral facts used to
//! bound the number of nodal domains.
//!
//! With `m_λ = Σ m_j`, the quadratic form `Q(a) = Σ mᵢmⱼaᵢaⱼ − m_λ Σ m_j a_j²`
//! has matrix `A = K₀ + K₁`, `K₀ = −m_λ diag(m)`, `K₁ = m mᵀ`. The change of
//! variables `b_j = m_j a_j` turns it into `B = −m_λ diag(1/m) + 11ᵀ`.

use crate::numerics::{sym_eigen, SymMatrix};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative threshold below which an eigenvalue counts as zero.
pub const ZERO_EIGEN_REL: f64 = 1e-9;

/// Signed averages over nodal domains, outermost domain first.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageVector {
    m: Vec<f64>,
    m_total: f64,
}

impl AverageVector {
    pub fn new(m: Vec<f64>) -> Result<Self> {
        if m.len() < 2 {
            return Err(Error::arg(format!("need at least 2 averages, got {}", m.len())));
        }
        if let Some(j) = m.iter().position(|x| !x.is_finite()) {
            return Err(Error::arg(format!("m_{} is not finite", j + 1)));
        }
        if let Some(j) = m.iter().position(|&x| x == 0.0) {
            return Err(Error::arg(format!("m_{} is zero", j + 1)));
        }
        if let Some(j) = m.iter().enumerate().position(|(j, &x)| (x > 0.0) != (j % 2 == 0)) {
            return Err(Error::arg(format!(
                "signs must alternate starting positive, but m_{} = {}",
                j + 1,
                m[j]
            )));
        }
        let m_total: f64 = m.iter().sum();
        if m_total <= 0.0 {
            return Err(Error::arg(format!("total m_total = {m_total} must be positive")));
        }
        Ok(Self { m, m_total })
    }

    /// Magnitudes uniform in `[0.5, 5]` with alternating signs, resampled
    /// until the total is positive.
    pub fn random(len: usize, rng: &mut impl Rng) -> Result<Self> {
        if len < 2 {
            return Err(Error::arg(format!("need at least 2 averages, got {len}")));
        }
        loop {
            let m: Vec<f64> = (0..len)
                .map(|j| {
                    let mag = rng.gen_range(0.5..=5.0);
                    if j % 2 == 0 { mag } else { -mag }
                })
                .collect();
            if m.iter().sum::<f64>() > 0.0 {
                return Self::new(m);
            }
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.m
    }

    pub fn total(&self) -> f64 {
        self.m_total
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    A,
    B,
    BReduced,
    K0,
    K0PlusK1,
}

impl MatrixKind {
    pub fn label(self) -> &'static str {
        match self {
            MatrixKind::A => "A",
            MatrixKind::B => "B",
            MatrixKind::BReduced => "B_reduced",
            MatrixKind::K0 => "K0",
            MatrixKind::K0PlusK1 => "K0_plus_K1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InertiaReport {
    pub matrix_kind: MatrixKind,
    pub order: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Leading principal minors; filled for `BReduced` only.
    pub minors: Vec<f64>,
    pub inertia: Inertia,
    /// Unit vector spanning the kernel when it is one-dimensional.
    pub kernel_basis: Option<Vec<f64>>,
}

/// `−m_λ diag(m) + m mᵀ`.
pub fn build_a(avg: &AverageVector) -> SymMatrix {
    let mut a = build_k0(avg);
    a.add_outer(1.0, avg.values());
    a
}

/// `−m_λ diag(m)`.
pub fn build_k0(avg: &AverageVector) -> SymMatrix {
    let d: Vec<f64> = avg.values().iter().map(|x| -avg.total() * x).collect();
    SymMatrix::diagonal(&d)
}

/// `−m_λ diag(1/m) + 11ᵀ`, of order N.
pub fn build_b(avg: &AverageVector) -> SymMatrix {
    b_block(avg, avg.len())
}

/// `B` restricted to the first N−1 coordinates.
pub fn build_b_reduced(avg: &AverageVector) -> SymMatrix {
    b_block(avg, avg.len() - 1)
}

fn b_block(avg: &AverageVector, order: usize) -> SymMatrix {
    let m = avg.values();
    SymMatrix::from_fn(order, |i, j| {
        if i == j { 1.0 - avg.total() / m[i] } else { 1.0 }
    })
}

pub fn build(avg: &AverageVector, kind: MatrixKind) -> SymMatrix {
    match kind {
        MatrixKind::A | MatrixKind::K0PlusK1 => build_a(avg),
        MatrixKind::B => build_b(avg),
        MatrixKind::BReduced => build_b_reduced(avg),
        MatrixKind::K0 => build_k0(avg),
    }
}

/// `det(diag + v vᵀ) = (1 + vᵀ diag⁻¹ v) · Π diag`.
pub fn det_via_mdl(diag_vals: &[f64], v: &[f64]) -> Result<f64> {
    if diag_vals.len() != v.len() {
        return Err(Error::arg(format!(
            "diagonal has {} entries but vector has {}",
            diag_vals.len(),
            v.len()
        )));
    }
    if let Some(i) = diag_vals.iter().position(|&d| d == 0.0) {
        return Err(Error::arg(format!("diagonal entry {i} is zero")));
    }
    let corr: f64 = diag_vals.iter().zip(v).map(|(d, x)| x * x / d).sum();
    Ok((1.0 + corr) * diag_vals.iter().product::<f64>())
}

/// Determinant of the leading `j × j` corner of `B_{N−1}`:
/// `(−1)^j m_λ^{j−1} (m_{j+1} + … + m_N) / (m₁⋯m_j)`. The empty corner
/// `j = 0` gives 1.
pub fn closed_form_minor(avg: &AverageVector, j: usize) -> Result<f64> {
    let n = avg.len();
    if j >= n {
        return Err(Error::arg(format!("minor index {j} outside 0..={}", n - 1)));
    }
    let m = avg.values();
    let tail: f64 = m[j..].iter().sum();
    let head: f64 = m[..j].iter().product();
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * avg.total().powi(j as i32 - 1) * tail / head)
}

/// Determinants of the upper-left `j × j` corners, `j = 1..order`.
pub fn leading_minors(m: &SymMatrix) -> Vec<f64> {
    (1..=m.order()).map(|j| m.leading_block(j).determinant()).collect()
}

fn zero_threshold(values: &[f64]) -> f64 {
    ZERO_EIGEN_REL * values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

fn count_inertia(values: &[f64], tau: f64) -> Inertia {
    Inertia {
        negative: values.iter().filter(|&&v| v < -tau).count(),
        zero: values.iter().filter(|v| v.abs() <= tau).count(),
        positive: values.iter().filter(|&&v| v > tau).count(),
    }
}

pub fn inertia_of(m: &SymMatrix) -> Result<Inertia> {
    let e = sym_eigen(m)?;
    Ok(count_inertia(&e.values, zero_threshold(&e.values)))
}

pub fn report(avg: &AverageVector, kind: MatrixKind) -> Result<InertiaReport> {
    let mat = build(avg, kind);
    let e = sym_eigen(&mat)?;
    let tau = zero_threshold(&e.values);
    let inertia = count_inertia(&e.values, tau);
    let kernel_basis = if inertia.zero == 1 {
        let i = e.values.iter().position(|v| v.abs() <= tau).unwrap();
        let mut k = e.vectors[i].clone();
        let norm = k.iter().map(|x| x * x).sum::<f64>().sqrt();
        let flip = if k.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        k.iter_mut().for_each(|x| *x *= flip / norm);
        Some(k)
    } else {
        None
    };
    let minors = if kind == MatrixKind::BReduced { leading_minors(&mat) } else { Vec::new() };
    Ok(InertiaReport {
        matrix_kind: kind,
        order: mat.order(),
        eigenvalues: e.values,
        minors,
        inertia,
        kernel_basis,
    })
}

/// Outcome of checking both interlacing chains between `K₀` and `K₀ + vvᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterlacingReport {
    pub base: Vec<f64>,
    pub updated: Vec<f64>,
    pub slack: f64,
    /// Indices `j` (1-based) where a chain inequality fails.
    pub violations: Vec<usize>,
}

impl InterlacingReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks, for `1 ≤ j ≤ N−2` with ascending eigenvalues,
/// `λ_j(K₀+vvᵀ) ≤ λ_{j+1}(K₀) ≤ λ_{j+2}(K₀+vvᵀ)` and
/// `λ_j(K₀) ≤ λ_{j+1}(K₀+vvᵀ) ≤ λ_{j+2}(K₀)`.
pub fn interlacing_check(k0: &SymMatrix, v: &[f64]) -> Result<InterlacingReport> {
    if v.len() != k0.order() {
        return Err(Error::arg(format!(
            "vector has {} entries for a matrix of order {}",
            v.len(),
            k0.order()
        )));
    }
    let base = sym_eigen(k0)?.values;
    let mut upd = k0.clone();
    upd.add_outer(1.0, v);
    let updated = sym_eigen(&upd)?.values;
    let slack = zero_threshold(&base).max(zero_threshold(&updated));
    let violations = (0..base.len().saturating_sub(2))
        .filter(|&j| {
            let ok = updated[j] <= base[j + 1] + slack
                && base[j + 1] <= updated[j + 2] + slack
                && base[j] <= updated[j + 1] + slack
                && updated[j + 1] <= base[j + 2] + slack;
            !ok
        })
        .map(|j| j + 1)
        .collect();
    Ok(InterlacingReport { base, updated, slack, violations })
}

/// Sign-pattern witness that `B_{N−1}` has a non-positive leading minor.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorWitness {
    /// `N mod 4`.
    pub residue: usize,
    /// Size of the corner whose determinant is not positive.
    pub minor_index: usize,
    pub closed_form: f64,
    pub direct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegativeCertificate {
    pub most_negative: f64,
    pub threshold: f64,
    pub witness: MinorWitness,
}

impl NegativeCertificate {
    pub fn found(&self) -> bool {
        self.most_negative < -self.threshold && self.witness.closed_form <= 0.0
    }
}

/// Picks the corner of `B_{N−1}` that cannot have positive determinant using
/// only the sign pattern of `m` and of its tail sums.
pub fn sylvester_witness(avg: &AverageVector) -> Result<(usize, usize)> {
    let n = avg.len();
    if n < 3 {
        return Err(Error::arg(format!("witness needs N ≥ 3, got {n}")));
    }
    let m = avg.values();
    let tail = |k: usize| m[n - k..].iter().sum::<f64>();
    let residue = n % 4;
    let j = match residue {
        0 | 3 => n - 1,
        // the two-term tail sum decides which corner fails
        1 => if tail(2) > 0.0 { n - 3 } else { n - 2 },
        _ => if tail(3) > 0.0 { n - 4 } else { n - 3 },
    };
    Ok((residue, j))
}

pub fn negative_eigenvalue_certificate(avg: &AverageVector) -> Result<NegativeCertificate> {
    let (residue, minor_index) = sylvester_witness(avg)?;
    let e = sym_eigen(&build_a(avg))?;
    let reduced = build_b_reduced(avg);
    Ok(NegativeCertificate {
        most_negative: e.values[0],
        threshold: zero_threshold(&e.values),
        witness: MinorWitness {
            residue,
            minor_index,
            closed_form: closed_form_minor(avg, minor_index)?,
            direct: reduced.leading_block(minor_index).determinant(),
        },
    })
}

/// Deterministic per-trial generator for randomized sweeps.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
