use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::{Error, Result};

const DK_MAX_ITERATIONS: usize = 500;
const NEWTON_MAX_ITERATIONS: usize = 50;

/// Polynomial with complex coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs a coefficient");
        Self { coeffs }
    }

    /// `u w^{m+1} - w + 1`.
    pub fn functional(m: u32, u: Complex64) -> Self {
        let mut coeffs = alloc::vec![Complex64::zero(); m as usize + 2];
        coeffs[0] = Complex64::new(1.0, 0.0);
        coeffs[1] = Complex64::new(-1.0, 0.0);
        coeffs[m as usize + 1] += u;
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * w + c)
    }

    /// Value and first derivative by Horner.
    pub fn eval_with_derivative(&self, w: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * w + p;
            p = p * w + c;
        }
        (p, dp)
    }

    /// Newton from `start`. Stops once the step is below `tol` relative,
    /// or is already tiny and no longer shrinking (the roundoff floor,
    /// which sits well above `tol` next to a near-double root). Fails if
    /// the derivative vanishes or the iteration wanders.
    pub fn newton(&self, start: Complex64, tol: f64) -> Result<Complex64> {
        let mut w = start;
        let mut previous = f64::INFINITY;
        for _ in 0..NEWTON_MAX_ITERATIONS {
            let (p, dp) = self.eval_with_derivative(w);
            if dp.norm() == 0.0 {
                return Err(Error::NoConvergence(NEWTON_MAX_ITERATIONS));
            }
            let step = p / dp;
            w -= step;
            if !w.re.is_finite() || !w.im.is_finite() {
                break;
            }
            let size = step.norm() / w.norm().max(1.0);
            if size <= tol || (size <= 1e-9 && size >= 0.5 * previous) {
                return Ok(w);
            }
            previous = size;
        }
        Err(Error::NoConvergence(NEWTON_MAX_ITERATIONS))
    }

    /// First-order bound on how far a computed root can sit from the true
    /// one because of rounding: `eps · Σ|c_k||w|^k / |P'(w)|`.
    pub fn rounding_radius(&self, w: Complex64) -> f64 {
        let (_, dp) = self.eval_with_derivative(w);
        let scale = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * w.norm() + c.norm());
        f64::EPSILON * scale / dp.norm()
    }

    /// All roots by Durand–Kerner, each then polished by Newton.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let n = self.degree();
        let lead = self.coeffs[n];
        if lead.norm() == 0.0 {
            return Err(Error::InvalidArgument("leading coefficient is zero".into()));
        }
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        // Cauchy bound on the root moduli.
        let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let seed = Complex64::new(0.4, 0.9);
        let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * (radius * 0.5)).collect();
        let eval = |w: Complex64| monic.iter().rev().fold(Complex64::zero(), |acc, &c| acc * w + c);
        let mut converged = false;
        for _ in 0..DK_MAX_ITERATIONS {
            let mut change: f64 = 0.0;
            for i in 0..n {
                let denom = (0..n)
                    .filter(|&j| j != i)
                    .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
                if denom.norm() == 0.0 {
                    z[i] += Complex64::new(1e-8, 1e-8) * radius;
                    continue;
                }
                let delta = eval(z[i]) / denom;
                z[i] -= delta;
                change = change.max(delta.norm() / z[i].norm().max(1e-300));
            }
            if change < 1e-14 {
                converged = true;
                break;
            }
        }
        // Clustered roots slow the iteration to a linear rate; accept the
        // iterate if its backward error is tiny anyway.
        if !converged && !z.iter().all(|&w| backward_error(&monic, w) < 1e-12) {
            return Err(Error::NoConvergence(DK_MAX_ITERATIONS));
        }
        Ok(z.into_iter().map(|r| self.newton(r, 1e-15).unwrap_or(r)).collect())
    }
}

/// `|P(w)| / Σ |c_k| |w|^k`.
fn backward_error(coeffs: &[Complex64], w: Complex64) -> f64 {
    let value = coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * w + c);
    let scale = coeffs.iter().rev().fold(0.0, |acc, c| acc * w.norm() + c.norm());
    value.norm() / scale
}

/// Smallest pairwise distance between distinct entries, relative to scale.
pub fn min_separation(roots: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            best = best.min((roots[i] - roots[j]).norm() / scale);
        }
    }
    best
}
