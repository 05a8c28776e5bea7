use alloc::vec::Vec;

use super::eigen::Spectrum;
use crate::{Error, Result};

/// A distribution function that can be evaluated on both sides of a point.
pub trait Cdf {
    /// `F(x)`, right-continuous.
    fn cdf(&self, x: f64) -> f64;
    /// `F(x-)`. Equal to `cdf` for continuous distributions.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
    /// Points where `F` jumps, ascending. Empty when continuous.
    fn jumps(&self) -> &[f64] {
        &[]
    }
}

/// Step function `x ↦ #{λ ≤ x} / n` of one or more pooled spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn from_spectrum(spectrum: &Spectrum) -> Result<Self> {
        Self::from_values(spectrum.eigenvalues().to_vec())
    }

    /// Averaged ESD of several spectra (all of the same size).
    pub fn pooled<'a>(spectra: impl IntoIterator<Item = &'a Spectrum>) -> Result<Self> {
        Self::from_values(spectra.into_iter().flat_map(|s| s.eigenvalues().iter().copied()).collect())
    }

    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("NaN in spectrum".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }
}

impl Cdf for EmpiricalCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.sorted.len() as f64
    }

    fn jumps(&self) -> &[f64] {
        &self.sorted
    }
}

/// `sup |F - G|` over the grid and every jump of either function, using
/// both one-sided values at each point. Exact when both functions are
/// piecewise constant or one is continuous and monotone.
pub fn kolmogorov_distance(f: &impl Cdf, g: &impl Cdf, grid: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    let mut visit = |x: f64| {
        worst = worst
            .max((f.cdf(x) - g.cdf(x)).abs())
            .max((f.cdf_left(x) - g.cdf_left(x)).abs());
    };
    grid.iter().chain(f.jumps()).chain(g.jumps()).for_each(|&x| visit(x));
    worst
}

/// Evenly spaced grid of `points` values on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..points)
            .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ecdf(v: &[f64]) -> EmpiricalCdf {
        EmpiricalCdf::from_values(v.to_vec()).unwrap()
    }

    struct Uniform;
    impl Cdf for Uniform {
        fn cdf(&self, x: f64) -> f64 {
            x.clamp(0.0, 1.0)
        }
    }

    #[test]
    fn step_function_is_right_continuous() {
        let f = ecdf(&[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(f.cdf(0.5), 0.0);
        assert_eq!(f.cdf(2.0), 0.75);
        assert_eq!(f.cdf_left(2.0), 0.25);
        assert_eq!(f.cdf(3.0), 1.0);
    }

    #[test]
    fn identical_spectra_are_at_distance_zero() {
        let f = ecdf(&[0.3, 1.0, 4.5]);
        assert_eq!(kolmogorov_distance(&f, &f.clone(), &uniform_grid(0.0, 5.0, 11)), 0.0);
    }

    #[test]
    fn shifted_point_mass() {
        let f = ecdf(&[0.0, 1.0]);
        let g = ecdf(&[0.0, 2.0]);
        assert_eq!(kolmogorov_distance(&f, &g, &[]), 0.5);
    }

    #[test]
    fn against_continuous_law_uses_left_limits() {
        let f = ecdf(&[0.5]);
        assert_eq!(kolmogorov_distance(&f, &Uniform, &[]), 0.5);
        let g = ecdf(&[0.25, 0.75]);
        assert!((kolmogorov_distance(&g, &Uniform, &[]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn empty_is_rejected() {
        assert_eq!(EmpiricalCdf::from_values(Vec::new()), Err(Error::EmptySpectrum));
    }

    #[test]
    fn pooled_spectra() {
        let a = Spectrum::new(alloc::vec![1.0, 3.0]).unwrap();
        let b = Spectrum::new(alloc::vec![2.0, 4.0]).unwrap();
        let f = EmpiricalCdf::pooled([&a, &b]).unwrap();
        assert_eq!(f.values(), [1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(uniform_grid(0.0, 1.0, 3), [0.0, 0.5, 1.0]);
        assert!(uniform_grid(0.0, 1.0, 0).is_empty());
    }
}
