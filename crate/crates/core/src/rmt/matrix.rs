use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
// Needed without std; std's inherent float methods shadow it when linked.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: alloc::vec![Complex64::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&alloc::vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut out = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            out[(i, i)] = d;
        }
        out
    }

    /// Panics unless `data.len() == n * n`.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), n * n, "row-major data must have n^2 entries");
        Self { n, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), n, "matrix must be square");
                r.iter().map(|&v| Complex64::new(v, 0.0))
            })
            .collect();
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^k` by repeated multiplication; `k = 0` gives the identity.
    pub fn power(&self, k: u32) -> Self {
        match k {
            0 => Self::identity(self.n),
            _ => (1..k).fold(self.clone(), |acc, _| acc.matmul(self)),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    /// `Tr(self · rhs)` without forming the product.
    pub fn trace_of_product(&self, rhs: &Self) -> Complex64 {
        let n = self.n;
        let mut acc = Complex64::zero();
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * rhs.data[j * n + i];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// `‖A - A^*‖_F / ‖A‖_F` (zero for the zero matrix).
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.n;
        let mut diff = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = self.data[i * n + j] - self.data[j * n + i].conj();
                diff += if i == j { d.norm_sqr() } else { 2.0 * d.norm_sqr() };
            }
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            0.0
        } else {
            diff.sqrt() / norm
        }
    }

    /// Replaces the matrix with `(A + A^*) / 2`.
    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            let d = &mut self.data[i * n + i];
            *d = Complex64::new(d.re, 0.0);
            for j in i + 1..n {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// `W = X^m (X^*)^m` after symmetrization, with the deviation from
/// Hermitian symmetry measured just before it.
#[derive(Debug, Clone)]
pub struct PowerProduct {
    pub w: ComplexMatrix,
    pub hermitian_deviation: f64,
}

pub fn power_product(x: &ComplexMatrix, m: u32) -> PowerProduct {
    assert!(m >= 1, "m must be positive");
    let xm = x.power(m);
    let mut w = xm.matmul(&xm.adjoint());
    let hermitian_deviation = w.hermitian_deviation();
    w.symmetrize();
    PowerProduct {
        w,
        hermitian_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_power_product() {
        let w = power_product(&ComplexMatrix::identity(4), 3).w;
        assert_eq!(w, ComplexMatrix::identity(4));
    }

    #[test]
    fn diagonal_power_product() {
        let d = [c(0.5, 0.5), c(-2.0, 0.0), c(0.0, 1.5)];
        let x = ComplexMatrix::from_diagonal(&d);
        for m in 1..4 {
            let w = power_product(&x, m).w;
            for i in 0..3 {
                for j in 0..3 {
                    let expected = if i == j { d[i].norm_sqr().powi(m as i32) } else { 0.0 };
                    assert!((w[(i, j)] - c(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn m_one_is_gram_of_rows() {
        let x = ComplexMatrix::from_row_major(
            2,
            alloc::vec![c(1.0, 2.0), c(0.5, -1.0), c(-3.0, 0.0), c(0.0, 0.25)],
        );
        let w = power_product(&x, 1).w;
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| a * b.conj()).sum();
                assert!((w[(i, j)] - dot).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn trace_of_product_matches_matmul() {
        let a = ComplexMatrix::from_row_major(2, alloc::vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(3.0, 0.5)]);
        let b = a.adjoint();
        let direct = a.matmul(&b).trace();
        assert!((a.trace_of_product(&b) - direct).norm() < 1e-14);
    }

    #[test]
    fn symmetrize_removes_antihermitian_part() {
        let mut a = ComplexMatrix::from_row_major(2, alloc::vec![c(1.0, 0.1), c(2.0, 1.0), c(2.2, 0.0), c(3.0, 0.0)]);
        assert!(a.hermitian_deviation() > 0.1);
        a.symmetrize();
        assert_eq!(a.hermitian_deviation(), 0.0);
        assert_eq!(a[(0, 1)], c(2.1, 0.5));
    }
}
