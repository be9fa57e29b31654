//! Dense symmetric and symmetric-definite eigensolvers.
//!
//! `sym_eigen` reduces to tridiagonal form with Householder reflections and
//! then runs implicit QL with Wilkinson-type shifts (the EISPACK
//! `tred2`/`tql2` pair). `gen_sym_eigen` reduces the pencil `(A, B)` to a
//! standard problem through the Cholesky factor of `A + shift·B`, which
//! tolerates a singular `B`: kernel directions of `B` surface as zero
//! eigenvalues of the reduced matrix and are dropped.

use super::matrix::{backward_solve_transpose, cholesky, forward_solve_rows, SymMatrix};
use crate::error::{Error, Result};

/// Eigenpairs with ascending values; `vectors[i]` belongs to `values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Full eigendecomposition of a symmetric matrix.
pub fn sym_eigen(m: &SymMatrix) -> Result<EigenDecomposition> {
    if !m.is_finite() {
        return Err(Error::arg("matrix has non-finite entries"));
    }
    let n = m.order();
    if n == 0 {
        return Ok(EigenDecomposition { values: vec![], vectors: vec![] });
    }
    let mut v = m.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    // tql2 rotates columns of V; work on the transpose so those are rows.
    let mut vt = transpose(n, &v);
    tql2(n, &mut vt, &mut d, &mut e)?;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = idx.iter().map(|&i| d[i]).collect();
    let vectors = idx.iter().map(|&i| vt[i * n..(i + 1) * n].to_vec()).collect();
    Ok(EigenDecomposition { values, vectors })
}

/// Solves `A φ = μ B φ` for symmetric `A` and positive semidefinite `B`,
/// given `shift` with `A + shift·B` positive definite. Returns the finite
/// eigenvalues ascending with `B`-orthonormal vectors. At most `max_kernel`
/// kernel directions of `B` may be deflated.
pub fn gen_sym_eigen(
    a: &SymMatrix,
    b: &SymMatrix,
    shift: f64,
    max_kernel: usize,
) -> Result<EigenDecomposition> {
    let n = a.order();
    if b.order() != n {
        return Err(Error::arg("pencil matrices differ in order"));
    }
    if !a.is_finite() || !b.is_finite() || !shift.is_finite() {
        return Err(Error::arg("pencil has non-finite entries"));
    }
    let k = if shift == 0.0 { a.clone() } else { a.add_scaled(shift, b) };
    let l = cholesky(&k)
        .ok_or_else(|| Error::arg("A + shift·B is not positive definite"))?;

    // C = L⁻¹ B L⁻ᵀ, assembled with two row-oriented triangular solves.
    let mut y = b.as_slice().to_vec();
    forward_solve_rows(n, &l, &mut y, n);
    let mut c = transpose(n, &y);
    forward_solve_rows(n, &l, &mut c, n);
    let reduced = SymMatrix::new(n, c)?;
    let eig = sym_eigen(&reduced)?;

    // θ = 1 / (μ + shift); B ⪰ 0 means θ ≥ 0 up to rounding.
    let scale = eig.values.iter().fold(0.0f64, |s, t| s.max(t.abs()));
    let floor = 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    if let Some(&lowest) = eig.values.first() {
        if lowest < -floor {
            return Err(Error::arg(format!(
                "B is indefinite (reduced eigenvalue {lowest:e})"
            )));
        }
    }
    let kernel = eig.values.iter().filter(|&&t| t <= floor).count();
    if kernel > max_kernel {
        return Err(Error::Degeneracy { found: kernel, bound: max_kernel });
    }

    // largest θ first gives ascending μ
    let mut values = Vec::with_capacity(n - kernel);
    let mut vectors = Vec::with_capacity(n - kernel);
    for (theta, yv) in eig.values.iter().zip(&eig.vectors).rev() {
        if *theta <= floor {
            break;
        }
        values.push(1.0 / theta - shift);
        let mut phi = backward_solve_transpose(n, &l, yv);
        let s = 1.0 / theta.sqrt();
        phi.iter_mut().for_each(|x| *x *= s);
        vectors.push(phi);
    }
    Ok(EigenDecomposition { values, vectors })
}

fn transpose(n: usize, a: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

/// Householder tridiagonalization. On return `d` holds the diagonal, `e`
/// the subdiagonal in `e[1..]`, and `v` the accumulated transform.
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    d.copy_from_slice(&v[at(n - 1, 0)..at(n - 1, 0) + n]);

    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);

            for j in 0..i {
                let f = d[j];
                v[at(j, i)] = f;
                let mut g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)`; `vt` holds eigenvectors as rows.
fn tql2(n: usize, vt: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Diagnostic("QL iteration failed to converge".into()));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (lo, hi) = vt.split_at_mut((i + 1) * n);
                    let row_i = &mut lo[i * n..];
                    let row_i1 = &mut hi[..n];
                    for (a, b) in row_i.iter_mut().zip(row_i1.iter_mut()) {
                        let hb = *b;
                        *b = s * *a + c * hb;
                        *a = c * *a - s * hb;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
