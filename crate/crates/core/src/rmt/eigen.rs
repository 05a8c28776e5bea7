//! Dense Hermitian eigensolvers.
//!
//! Two independent routes: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL (the default, `O(N^3)` with a
//! small constant), and cyclic complex Jacobi rotations (slower, also
//! yields eigenvectors directly). Each is used to check the other.

use alloc::vec::Vec;

use num_complex::Complex64;
// Needed without std; std's inherent float methods shadow it when linked.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Largest accepted `‖W - W^*‖_F / ‖W‖_F`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius norm is below this times `‖W‖_F`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 60;
const QL_MAX_ITERATIONS: usize = 60;

/// Real eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Sorts the values; rejects NaN.
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("NaN eigenvalue".into()));
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    /// `N^{-1} Σ λ_k^p`.
    pub fn moment(&self, p: u32) -> f64 {
        let n = self.eigenvalues.len() as f64;
        self.eigenvalues.iter().map(|l| l.powi(p as i32)).sum::<f64>() / n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    Tridiagonal,
    Jacobi,
}

fn check_hermitian(w: &ComplexMatrix) -> Result<()> {
    if !w.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let dev = w.hermitian_deviation();
    if dev > HERMITIAN_TOLERANCE {
        return Err(Error::NonHermitian(dev));
    }
    Ok(())
}

pub fn hermitian_eigenvalues(w: &ComplexMatrix) -> Result<Spectrum> {
    hermitian_eigenvalues_with(w, EigenMethod::Tridiagonal)
}

pub fn hermitian_eigenvalues_with(w: &ComplexMatrix, method: EigenMethod) -> Result<Spectrum> {
    match method {
        EigenMethod::Tridiagonal => TridiagonalForm::reduce(w)?.eigenvalues(),
        EigenMethod::Jacobi => Ok(jacobi_eigen(w, false)?.0),
    }
}

/// `W = Q D T D^* Q^*` with `T` real symmetric tridiagonal, `Q` a product
/// of Householder reflections and `D` a diagonal of unit phases.
#[derive(Debug, Clone)]
pub struct TridiagonalForm {
    diag: Vec<f64>,
    /// `offdiag[k] = T[k+1, k] >= 0`.
    offdiag: Vec<f64>,
    /// `(k, v, tau)`: acts on coordinates `k+1..N` as `I - tau v v^*`.
    reflectors: Vec<(usize, Vec<Complex64>, f64)>,
    phases: Vec<Complex64>,
}

impl TridiagonalForm {
    pub fn reduce(w: &ComplexMatrix) -> Result<Self> {
        check_hermitian(w)?;
        let n = w.dim();
        let mut a = w.as_slice().to_vec();
        let mut diag = Vec::with_capacity(n);
        let mut sub = Vec::with_capacity(n.saturating_sub(1));
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));

        for k in 0..n.saturating_sub(1) {
            diag.push(a[k * n + k].re);
            let r = n - k - 1;
            let mut v: Vec<Complex64> = (0..r).map(|i| a[(k + 1 + i) * n + k]).collect();
            let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
            if r == 1 || norm == 0.0 {
                sub.push(v[0]);
                continue;
            }
            let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { Complex64::new(1.0, 0.0) };
            let alpha = -phase * norm;
            v[0] -= alpha;
            let tau = 2.0 / v.iter().map(Complex64::norm_sqr).sum::<f64>();

            // p = tau B v on the trailing block B = a[k+1.., k+1..].
            let mut p: Vec<Complex64> = (0..r)
                .map(|i| {
                    let row = &a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
                    row.iter().zip(&v).map(|(b, x)| b * x).sum::<Complex64>() * tau
                })
                .collect();
            let vp: Complex64 = v.iter().zip(&p).map(|(x, y)| x.conj() * y).sum();
            let half_k = tau * 0.5 * vp.re;
            for (pi, vi) in p.iter_mut().zip(&v) {
                *pi -= vi * half_k;
            }
            // B -= v p^* + p v^*
            for i in 0..r {
                let (vi, pi) = (v[i], p[i]);
                let row = &mut a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
                for ((b, vj), pj) in row.iter_mut().zip(&v).zip(&p) {
                    *b -= vi * pj.conj() + pi * vj.conj();
                }
            }
            sub.push(alpha);
            reflectors.push((k, v, tau));
        }
        if n > 0 {
            diag.push(a[(n - 1) * n + n - 1].re);
        }

        let mut phases = Vec::with_capacity(n);
        let mut offdiag = Vec::with_capacity(sub.len());
        if n > 0 {
            phases.push(Complex64::new(1.0, 0.0));
        }
        for (k, e) in sub.iter().enumerate() {
            let mag = e.norm();
            let step = if mag > 0.0 { e / mag } else { Complex64::new(1.0, 0.0) };
            phases.push(phases[k] * step);
            offdiag.push(mag);
        }
        Ok(Self {
            diag,
            offdiag,
            reflectors,
            phases,
        })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn eigenvalues(&self) -> Result<Spectrum> {
        let mut d = self.diag.clone();
        let mut e = self.offdiag.clone();
        e.push(0.0);
        tridiagonal_ql(&mut d, &mut e)?;
        Spectrum::new(d)
    }

    /// Unit eigenvector of the original matrix for an eigenvalue `lambda`
    /// of `T`, by inverse iteration on `T` and back-transformation.
    pub fn eigenvector(&self, lambda: f64) -> Vec<Complex64> {
        let n = self.diag.len();
        let scale = self
            .diag
            .iter()
            .map(|d| d.abs())
            .chain(self.offdiag.iter().copied())
            .fold(f64::MIN_POSITIVE, f64::max);
        let shift = lambda + scale * 1e-14;
        // Deterministic, not aligned with any special structure.
        let mut y: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919 % 97) as f64 / 97.0)).collect();
        for _ in 0..4 {
            y = solve_shifted_tridiagonal(&self.diag, &self.offdiag, shift, &y, scale);
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            y.iter_mut().for_each(|v| *v /= norm);
        }
        let mut x: Vec<Complex64> = y.iter().zip(&self.phases).map(|(&v, ph)| ph * v).collect();
        for (k, v, tau) in self.reflectors.iter().rev() {
            let tail = &mut x[*k + 1..];
            let dot: Complex64 = v.iter().zip(tail.iter()).map(|(a, b)| a.conj() * b).sum();
            for (t, vi) in tail.iter_mut().zip(v) {
                *t -= vi * dot * *tau;
            }
        }
        x
    }
}

/// Gaussian elimination with partial pivoting on `(T - shift I) y = b`.
fn solve_shifted_tridiagonal(diag: &[f64], off: &[f64], shift: f64, b: &[f64], scale: f64) -> Vec<f64> {
    let n = diag.len();
    // Row i after elimination: u0[i] y_i + u1[i] y_{i+1} + u2[i] y_{i+2} = rhs[i].
    let mut u0 = alloc::vec![0.0; n];
    let mut u1 = alloc::vec![0.0; n];
    let mut u2 = alloc::vec![0.0; n];
    let mut rhs = b.to_vec();
    let tiny = scale * f64::EPSILON;
    // Current pending row: (a, bcoef, c) for y_i, y_{i+1}, y_{i+2}.
    let mut cur = (diag[0] - shift, off.first().copied().unwrap_or(0.0), 0.0);
    for i in 0..n {
        if i + 1 < n {
            let below = (off[i], diag[i + 1] - shift, off.get(i + 1).copied().unwrap_or(0.0));
            if below.0.abs() > cur.0.abs() {
                // Swap the pending row with the next one.
                rhs.swap(i, i + 1);
                let pivot = below;
                let other = (cur.0, cur.1, cur.2);
                let f = other.0 / pivot.0;
                u0[i] = pivot.0;
                u1[i] = pivot.1;
                u2[i] = pivot.2;
                rhs[i + 1] -= f * rhs[i];
                cur = (other.1 - f * pivot.1, other.2 - f * pivot.2, 0.0);
            } else {
                let a = if cur.0.abs() < tiny { tiny } else { cur.0 };
                let f = below.0 / a;
                u0[i] = a;
                u1[i] = cur.1;
                u2[i] = cur.2;
                rhs[i + 1] -= f * rhs[i];
                cur = (below.1 - f * cur.1, below.2 - f * cur.2, 0.0);
            }
        } else {
            u0[i] = if cur.0.abs() < tiny { tiny } else { cur.0 };
        }
    }
    let mut y = alloc::vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        if i + 1 < n {
            acc -= u1[i] * y[i + 1];
        }
        if i + 2 < n {
            acc -= u2[i] * y[i + 2];
        }
        y[i] = acc / u0[i];
    }
    y
}

/// Implicit QL with Wilkinson shifts. `e[i]` couples `i` and `i + 1`;
/// `e[n-1]` is scratch. Eigenvalues overwrite `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > QL_MAX_ITERATIONS {
                return Err(Error::NoConvergence(iterations));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi. Returns the spectrum and, when asked, a unitary matrix
/// whose column `k` belongs to the `k`-th (ascending) eigenvalue.
pub fn jacobi_eigen(w: &ComplexMatrix, with_vectors: bool) -> Result<(Spectrum, Option<ComplexMatrix>)> {
    check_hermitian(w)?;
    let n = w.dim();
    let mut a = w.clone();
    a.symmetrize();
    let mut v = with_vectors.then(|| ComplexMatrix::identity(n));
    let target = JACOBI_TOLERANCE * w.frobenius_norm();

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let e = apq / r;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let ec = e.conj();
                // A <- A G with G = [[c, s], [-s conj(e), c conj(e)]].
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * c - akq * ec * s;
                    a[(k, q)] = akp * s + akq * ec * c;
                }
                // A <- G^* A
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * c - aqk * e * s;
                    a[(q, k)] = apk * s + aqk * e * c;
                }
                a[(p, q)] = Complex64::zero();
                a[(q, p)] = Complex64::zero();
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                        v[(k, p)] = vkp * c - vkq * ec * s;
                        v[(k, q)] = vkp * s + vkq * ec * c;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = v.map(|v| {
        let mut sorted = ComplexMatrix::zeros(n);
        for (col, &src) in order.iter().enumerate() {
            for k in 0..n {
                sorted[(k, col)] = v[(k, src)];
            }
        }
        sorted
    });
    Ok((Spectrum::new(values)?, vectors))
}

/// `‖W x - λ x‖ / ‖x‖`.
pub fn eigenpair_residual(w: &ComplexMatrix, lambda: f64, x: &[Complex64]) -> f64 {
    let n = w.dim();
    let norm = x.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    let mut acc = 0.0;
    for i in 0..n {
        let wx: Complex64 = w.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        acc += (wx - x[i] * lambda).norm_sqr();
    }
    acc.sqrt() / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmt::ensemble::{sample_matrix, EnsembleSpec, Family};
    use crate::rmt::matrix::power_product;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let x = sample_matrix(&EnsembleSpec::new(Family::ComplexGaussian, n, seed), 0).unwrap();
        let mut h = x.clone();
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = x[(i, j)] + x[(j, i)].conj();
            }
        }
        h
    }

    fn both(w: &ComplexMatrix) -> [Vec<f64>; 2] {
        [EigenMethod::Tridiagonal, EigenMethod::Jacobi]
            .map(|m| hermitian_eigenvalues_with(w, m).unwrap().eigenvalues().to_vec())
    }

    #[test]
    fn identity_gives_ones() {
        for values in both(&ComplexMatrix::identity(5)) {
            assert!(values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn diagonal_gives_sorted_diagonal() {
        let w = ComplexMatrix::from_diagonal(&[c(3.0, 0.0), c(-1.0, 0.0), c(2.5, 0.0), c(0.0, 0.0)]);
        for values in both(&w) {
            assert_eq!(values, [-1.0, 0.0, 2.5, 3.0]);
        }
    }

    #[test]
    fn two_by_two() {
        let w = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        for values in both(&w) {
            assert!((values[0] - 1.0).abs() < 1e-14 && (values[1] - 3.0).abs() < 1e-14);
        }
        let w = ComplexMatrix::from_row_major(2, alloc::vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        for values in both(&w) {
            assert!(values[0].abs() < 1e-14 && (values[1] - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let w = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eigenvalues(&w), Err(Error::NonHermitian(_))));
        assert!(matches!(jacobi_eigen(&w, false), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn routes_agree_on_random_hermitian() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (17, 4), (48, 5)] {
            let w = random_hermitian(n, seed);
            let [tri, jac] = both(&w);
            let scale = jac.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (a, b) in tri.iter().zip(&jac) {
                assert!((a - b).abs() < 1e-11 * scale, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn jacobi_vectors_are_eigenvectors() {
        let w = random_hermitian(24, 11);
        let (spec, vecs) = jacobi_eigen(&w, true).unwrap();
        let vecs = vecs.unwrap();
        let norm = spec.eigenvalues().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (k, &lambda) in spec.eigenvalues().iter().enumerate() {
            let col: Vec<Complex64> = (0..24).map(|i| vecs[(i, k)]).collect();
            assert!(eigenpair_residual(&w, lambda, &col) <= 1e-8 * norm);
        }
        // Unitary: V^* V = I
        let vv = vecs.adjoint().matmul(&vecs);
        for i in 0..24 {
            for j in 0..24 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((vv[(i, j)] - c(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_iteration_residuals() {
        for (n, seed) in [(5, 1), (40, 2), (96, 3)] {
            let w = random_hermitian(n, seed);
            let tri = TridiagonalForm::reduce(&w).unwrap();
            let spec = tri.eigenvalues().unwrap();
            let norm = spec.eigenvalues().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for k in [0, n / 3, n / 2, n - 1] {
                let lambda = spec.eigenvalues()[k];
                let x = tri.eigenvector(lambda);
                assert!(eigenpair_residual(&w, lambda, &x) <= 1e-8 * norm, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn power_product_spectra_are_psd() {
        for m in 1..=3 {
            let x = sample_matrix(&EnsembleSpec::new(Family::ComplexGaussian, 64, 3), 0).unwrap();
            let pp = power_product(&x, m);
            assert!(pp.hermitian_deviation <= 1e-10);
            let spec = hermitian_eigenvalues(&pp.w).unwrap();
            assert!(spec.min().unwrap() >= -1e-8 * spec.max().unwrap());
        }
    }

    #[test]
    fn ql_reports_trivial_sizes() {
        assert!(hermitian_eigenvalues(&ComplexMatrix::zeros(0)).unwrap().is_empty());
        let one = ComplexMatrix::from_real_rows(&[&[4.0]]);
        assert_eq!(hermitian_eigenvalues(&one).unwrap().eigenvalues(), [4.0]);
    }
}
