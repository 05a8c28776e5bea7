use alloc::vec::Vec;

// Needed without std; std's inherent float methods shadow it when linked.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::ToPrimitive;

use super::ensemble::{sample_matrix, EnsembleSpec};
use super::matrix::{power_product, ComplexMatrix};
use crate::combinatorics::fuss_catalan;
use crate::{Error, Result};

/// Largest accepted `|Im Tr W^p|` as a multiple of `N`.
pub const IMAGINARY_TRACE_TOLERANCE: f64 = 1e-9;

/// `N^{-1} Tr W^p` for `p = 1..=p_max`, with `W = X^m (X^*)^m`.
///
/// Uses powers `W^k` for `k <= ceil(p_max / 2)` and
/// `Tr W^p = Tr(W^a W^b)` with `a + b = p`; no eigendecomposition.
pub fn trace_moments(x: &ComplexMatrix, m: u32, p_max: u32) -> Result<Vec<f64>> {
    let w = power_product(x, m).w;
    trace_moments_of(&w, p_max)
}

/// Same as [`trace_moments`] for a given `W`.
pub fn trace_moments_of(w: &ComplexMatrix, p_max: u32) -> Result<Vec<f64>> {
    if p_max == 0 {
        return Err(Error::InvalidArgument("p_max must be at least 1".into()));
    }
    let n = w.dim();
    let half = p_max.div_ceil(2) as usize;
    let mut powers = Vec::with_capacity(half);
    powers.push(w.clone());
    while powers.len() < half {
        let next = powers.last().expect("nonempty").matmul(w);
        powers.push(next);
    }
    let limit = IMAGINARY_TRACE_TOLERANCE * n as f64;
    (1..=p_max as usize)
        .map(|p| {
            let tr = if p == 1 {
                w.trace()
            } else {
                let a = p / 2;
                powers[a - 1].trace_of_product(&powers[p - a - 1])
            };
            if tr.im.abs() > limit {
                return Err(Error::ImaginaryTrace { imag: tr.im, limit });
            }
            Ok(tr.re / n as f64)
        })
        .collect()
}

/// One trial of [`monte_carlo_moments`].
pub fn trial_moments(spec: &EnsembleSpec, m: u32, p_max: u32, trial: u64) -> Result<Vec<f64>> {
    trace_moments(&sample_matrix(spec, trial)?, m, p_max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub p: u32,
    pub mean: f64,
    /// Sample standard deviation over `√trials`.
    pub stderr: f64,
    pub reference: f64,
}

impl MomentRow {
    /// `|mean - reference| <= max(k · stderr, rel · reference)`.
    pub fn within(&self, stderr_factor: f64, relative: f64) -> bool {
        (self.mean - self.reference).abs() <= (stderr_factor * self.stderr).max(relative * self.reference)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub m: u32,
    pub n: usize,
    pub trials: usize,
    pub rows: Vec<MomentRow>,
}

impl MomentReport {
    /// Aggregates per-trial moment vectors, in trial order.
    pub fn from_trials(m: u32, n: usize, per_trial: &[Vec<f64>]) -> Result<Self> {
        let trials = per_trial.len();
        if trials < 2 {
            return Err(Error::InvalidArgument("need at least two trials".into()));
        }
        let p_max = per_trial[0].len();
        if per_trial.iter().any(|t| t.len() != p_max) {
            return Err(Error::InvalidArgument("trials disagree on p_max".into()));
        }
        let rows = (0..p_max)
            .map(|k| {
                let (mean, stderr) = mean_and_stderr(per_trial.iter().map(|t| t[k]));
                let p = k as u32 + 1;
                MomentRow {
                    p,
                    mean,
                    stderr,
                    reference: fuss_catalan(m, p).to_f64().unwrap_or(f64::INFINITY),
                }
            })
            .collect();
        Ok(Self { m, n, trials, rows })
    }
}

/// Sample mean and `s / √n` with the `n - 1` denominator.
pub fn mean_and_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let count = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / count;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

/// Sequential Monte Carlo over trials `0..trials`.
pub fn monte_carlo_moments(spec: &EnsembleSpec, m: u32, p_max: u32, trials: usize) -> Result<MomentReport> {
    if trials < 2 {
        return Err(Error::InvalidArgument("need at least two trials".into()));
    }
    let per_trial = (0..trials as u64)
        .map(|t| trial_moments(spec, m, p_max, t))
        .collect::<Result<Vec<_>>>()?;
    MomentReport::from_trials(m, spec.n, &per_trial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmt::eigen::hermitian_eigenvalues;
    use crate::rmt::ensemble::Family;

    #[test]
    fn identity_moments_are_one() {
        let ms = trace_moments(&ComplexMatrix::identity(6), 2, 5).unwrap();
        assert!(ms.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn first_moment_is_mean_squared_modulus() {
        let x = sample_matrix(&EnsembleSpec::new(Family::ComplexGaussian, 20, 4), 0).unwrap();
        let direct = x.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / 20.0;
        let ms = trace_moments(&x, 1, 1).unwrap();
        assert!((ms[0] - direct).abs() < 1e-13);
    }

    #[test]
    fn two_routes_agree() {
        for family in Family::ALL {
            for m in 1..=3 {
                let x = sample_matrix(&EnsembleSpec::new(family, 48, 17), m as u64).unwrap();
                let w = power_product(&x, m).w;
                let by_trace = trace_moments_of(&w, 6).unwrap();
                let spec = hermitian_eigenvalues(&w).unwrap();
                for (k, t) in by_trace.iter().enumerate() {
                    let by_eig = spec.moment(k as u32 + 1);
                    assert!((t - by_eig).abs() <= 1e-8 * t.abs(), "{family} m={m} p={}", k + 1);
                }
            }
        }
    }

    #[test]
    fn report_statistics() {
        let per_trial = [alloc::vec![1.0, 2.0], alloc::vec![3.0, 2.0]];
        let r = MomentReport::from_trials(1, 10, &per_trial).unwrap();
        assert_eq!(r.rows[0].mean, 2.0);
        assert!((r.rows[0].stderr - 1.0).abs() < 1e-15);
        assert_eq!(r.rows[1].stderr, 0.0);
        assert_eq!(r.rows[1].reference, 2.0);
        assert!(MomentReport::from_trials(1, 10, &per_trial[..1]).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = EnsembleSpec::new(Family::Rademacher, 24, 5);
        let a = monte_carlo_moments(&spec, 2, 3, 3).unwrap();
        let b = monte_carlo_moments(&spec, 2, 3, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_p_max_rejected() {
        assert!(trace_moments(&ComplexMatrix::identity(2), 1, 0).is_err());
    }
}
