use std::fmt;

use crate::error::{Error, Result};

/// Dense symmetric matrix stored row-major. Construction symmetrizes the
/// input as `(M + Mᵀ) / 2`.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn new(order: usize, mut data: Vec<f64>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::arg(format!(
                "expected {} entries for order {order}, got {}",
                order * order,
                data.len()
            )));
        }
        for i in 0..order {
            for j in i + 1..order {
                let avg = 0.5 * (data[i * order + j] + data[j * order + i]);
                data[i * order + j] = avg;
                data[j * order + i] = avg;
            }
        }
        Ok(Self { order, data })
    }

    pub fn zeros(order: usize) -> Self {
        Self { order, data: vec![0.0; order * order] }
    }

    pub fn identity(order: usize) -> Self {
        Self::diagonal(&vec![1.0; order])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = *d;
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                m.data[i * order + j] = v;
                m.data[j * order + i] = v;
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] = v;
        self.data[j * self.order + i] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] += v;
        if i != j {
            self.data[j * self.order + i] += v;
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self += alpha · v vᵀ`.
    pub fn add_outer(&mut self, alpha: f64, v: &[f64]) {
        assert_eq!(v.len(), self.order);
        for i in 0..self.order {
            let s = alpha * v[i];
            for (j, vj) in v.iter().enumerate() {
                self.data[i * self.order + j] += s * vj;
            }
        }
    }

    /// `self + alpha · other`.
    pub fn add_scaled(&self, alpha: f64, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.order, other.order);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + alpha * b).collect();
        SymMatrix { order: self.order, data }
    }

    pub fn scaled(&self, alpha: f64) -> SymMatrix {
        SymMatrix { order: self.order, data: self.data.iter().map(|a| alpha * a).collect() }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.order);
        (0..self.order).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.matvec(x))
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Upper-left `size × size` corner.
    pub fn leading_block(&self, size: usize) -> SymMatrix {
        assert!(size <= self.order);
        let mut data = Vec::with_capacity(size * size);
        for i in 0..size {
            data.extend_from_slice(&self.row(i)[..size]);
        }
        SymMatrix { order: size, data }
    }

    /// Principal submatrix on the given (sorted or not) index set.
    pub fn principal(&self, idx: &[usize]) -> SymMatrix {
        let mut data = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        SymMatrix { order: idx.len(), data }
    }

    /// Determinant by LU factorization with partial pivoting.
    pub fn determinant(&self) -> f64 {
        determinant(self.order, &self.data)
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SymMatrix({})", self.order)?;
        for i in 0..self.order {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Determinant of a general row-major square matrix (empty matrix → 1).
pub fn determinant(order: usize, data: &[f64]) -> f64 {
    let n = order;
    let mut a = data.to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let akk = a[k * n + k];
        det *= akk;
        for i in k + 1..n {
            let l = a[i * n + k] / akk;
            if l != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= l * a[k * n + j];
                }
            }
        }
    }
    det
}

/// Lower Cholesky factor, row-major; `None` if the matrix is not
/// numerically positive definite.
pub fn cholesky(m: &SymMatrix) -> Option<Vec<f64>> {
    let n = m.order();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        // row i of L only has entries from the first nonzero of row i of M
        let first = (0..=i).find(|&k| m.get(i, k) != 0.0).unwrap_or(i);
        for j in first..=i {
            let mut s = m.get(i, j);
            for k in first..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Solves `L X = B` in place for a row-major `n × cols` right-hand side,
/// processing whole rows so that sparse rows of `L` stay cheap.
pub(crate) fn forward_solve_rows(n: usize, l: &[f64], b: &mut [f64], cols: usize) {
    for i in 0..n {
        for k in 0..i {
            let lik = l[i * n + k];
            if lik != 0.0 {
                let (done, rest) = b.split_at_mut(i * cols);
                let src = &done[k * cols..(k + 1) * cols];
                for (t, s) in rest[..cols].iter_mut().zip(src) {
                    *t -= lik * s;
                }
            }
        }
        let d = l[i * n + i];
        for t in &mut b[i * cols..(i + 1) * cols] {
            *t /= d;
        }
    }
}

/// Solves `Lᵀ x = y` for a single vector.
pub(crate) fn backward_solve_transpose(n: usize, l: &[f64], y: &[f64]) -> Vec<f64> {
    let mut x = y.to_vec();
    for i in (0..n).rev() {
        x[i] /= l[i * n + i];
        let xi = x[i];
        for k in 0..i {
            let lik = l[i * n + k];
            if lik != 0.0 {
                x[k] -= lik * xi;
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrizes_on_construction() {
        let m = SymMatrix::new(2, vec![1.0, 2.0, 4.0, 3.0]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(determinant(0, &[]), 1.0);
        assert!((determinant(2, &[2.0, 1.0, 1.0, 3.0]) - 5.0).abs() < 1e-14);
        let d = determinant(3, &[0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 4.0, -3.0, 8.0]);
        assert!((d - (-2.0)).abs() < 1e-12, "{d}");
    }

    #[test]
    fn cholesky_roundtrip_and_failure() {
        let m = SymMatrix::new(3, vec![4.0, 2.0, 0.0, 2.0, 5.0, 1.0, 0.0, 1.0, 3.0]).unwrap();
        let l = cholesky(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| l[i * 3 + k] * l[j * 3 + k]).sum();
                assert!((s - m.get(i, j)).abs() < 1e-14);
            }
        }
        assert!(cholesky(&SymMatrix::diagonal(&[1.0, -1.0])).is_none());
    }
}
