use alloc::vec::Vec;

use num_complex::Complex64;
// Needed without std; std's inherent float methods shadow it when linked.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use super::ensemble::{trial_rng, EnsembleSpec, Family, HEAVY_EXPONENT};
use super::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Stream reserved for scalar Lindeberg draws, away from trial streams.
const LINDEBERG_STREAM: u64 = u64::MAX - 1;

/// `α_N = N^{-1/8}`.
pub fn alpha_schedule(n: usize) -> f64 {
    (n as f64).powf(-0.125)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TruncationInfo {
    pub zeroed: usize,
    /// Rows containing at least one zeroed entry.
    pub rows: usize,
    /// Columns containing at least one zeroed entry.
    pub cols: usize,
}

impl TruncationInfo {
    /// `X - X̃` is supported on `rows` rows and `cols` columns, so its rank
    /// is at most `min(rows, cols)`.
    pub fn perturbation_rank(&self) -> usize {
        self.rows.min(self.cols)
    }

    /// Bound on the Kolmogorov distance between the ESDs of `W(X)` and
    /// `W(X̃)`: `X^m - X̃^m` has rank at most `m r`, and `W - W̃` at most
    /// `2 m r`, and a rank-`k` Hermitian perturbation moves the ESD by at
    /// most `k / N`.
    pub fn esd_distance_bound(&self, m: u32, n: usize) -> f64 {
        (2 * m as usize * self.perturbation_rank()) as f64 / n as f64
    }
}

/// Zeroes every entry with `|X_ij| >= alpha`.
pub fn truncate(x: &ComplexMatrix, alpha: f64) -> Result<(ComplexMatrix, TruncationInfo)> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidArgument("alpha must be nonnegative".into()));
    }
    let n = x.dim();
    let mut out = x.clone();
    let mut row_hit = alloc::vec![false; n];
    let mut col_hit = alloc::vec![false; n];
    let mut zeroed = 0;
    for (k, z) in out.as_mut_slice().iter_mut().enumerate() {
        if z.norm() >= alpha {
            *z = Complex64::zero();
            zeroed += 1;
            row_hit[k / n] = true;
            col_hit[k % n] = true;
        }
    }
    let count = |v: &[bool]| v.iter().filter(|&&b| b).count();
    let info = TruncationInfo {
        zeroed,
        rows: count(&row_hit),
        cols: count(&col_hit),
    };
    Ok((out, info))
}

/// Monte Carlo estimate of `L_N(α) = E|x|^4 1{|x| > α √N}` from `draws`
/// scalar draws of the family (the entries are i.i.d.).
pub fn lindeberg_statistic(spec: &EnsembleSpec, alpha: f64, draws: usize) -> Result<f64> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    if draws == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    let threshold = alpha * (spec.n as f64).sqrt();
    let mut rng = trial_rng(spec.seed, LINDEBERG_STREAM);
    let mut sum = 0.0;
    for _ in 0..draws {
        let a = spec.family.sample(&mut rng).norm();
        if a > threshold {
            sum += a.powi(4);
        }
    }
    Ok(sum / draws as f64)
}

/// Exact `E|x|^4 1{|x| > s}` where known in closed form.
pub fn lindeberg_exact(family: Family, s: f64) -> Option<f64> {
    match family {
        Family::Rademacher => Some(if s < 1.0 { 1.0 } else { 0.0 }),
        Family::Heavy4 => Some(heavy4_tail_fourth_moment(s)),
        _ => None,
    }
}

/// For the raw density `(a-1)/2 (1+|t|)^{-a}` and `x = t/σ`:
/// `E x^4 1{|x|>s} = σ^{-4} (a-1) ∫_c^∞ t^4 (1+t)^{-a} dt` with `c = sσ`;
/// expand `t^4 = (w-1)^4` in `w = 1+t` and integrate term by term.
fn heavy4_tail_fourth_moment(s: f64) -> f64 {
    let a = HEAVY_EXPONENT;
    let sigma2 = 2.0 / ((a - 2.0) * (a - 3.0));
    let lower = 1.0 + s.max(0.0) * sigma2.sqrt();
    let binom = [1.0, 4.0, 6.0, 4.0, 1.0];
    let integral: f64 = (0..=4)
        .map(|k| {
            let sign = if (4 - k) % 2 == 0 { 1.0 } else { -1.0 };
            let e = a - k as f64 - 1.0;
            sign * binom[k] * lower.powf(-e) / e
        })
        .sum();
    (a - 1.0) * integral / (sigma2 * sigma2)
}

/// `L_N(α_N) / α_N^4` for each `N`, from `draws` scalar draws.
pub fn lindeberg_ratio_curve(spec: &EnsembleSpec, ns: &[usize], draws: usize) -> Result<Vec<(usize, f64)>> {
    ns.iter()
        .map(|&n| {
            let alpha = alpha_schedule(n);
            let l = lindeberg_statistic(&spec.with_n(n), alpha, draws)?;
            Ok((n, l / alpha.powi(4)))
        })
        .collect()
}
