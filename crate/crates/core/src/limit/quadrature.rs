use alloc::vec::Vec;
use core::f64::consts::PI;

// Needed without std; std's inherent float methods shadow it when linked.
#[allow(unused_imports)]
use num_traits::Float;



use crate::{Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton on `P_n` from the Chebyshev guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Rule mapped to `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> Result<f64>>(&self, a: f64, b: f64, f: &mut F) -> Result<f64> {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x)?;
        }
        Ok(acc * half)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Adaptive bisection with a fixed Gauss–Legendre rule per panel. Every
/// panel must meet `abs_tol` on its own; the returned two-half sums are far
/// more accurate than the estimate, so the tolerance is not split.
#[derive(Debug, Clone)]
pub struct AdaptiveQuadrature {
    rule: GaussLegendre,
    pub abs_tol: f64,
    pub max_depth: usize,
}

impl Default for AdaptiveQuadrature {
    fn default() -> Self {
        Self::new(20, 1e-12, 30)
    }
}

impl AdaptiveQuadrature {
    pub fn new(order: usize, abs_tol: f64, max_depth: usize) -> Self {
        Self {
            rule: GaussLegendre::new(order),
            abs_tol,
            max_depth,
        }
    }

    pub fn integrate<F: FnMut(f64) -> Result<f64>>(&self, a: f64, b: f64, mut f: F) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let whole = self.rule.integrate(a, b, &mut f)?;
        self.refine(a, b, whole, 0, &mut f)
    }

    fn refine<F: FnMut(f64) -> Result<f64>>(
        &self,
        a: f64,
        b: f64,
        whole: f64,
        depth: usize,
        f: &mut F,
    ) -> Result<f64> {
        let mid = (a + b) / 2.0;
        let left = self.rule.integrate(a, mid, f)?;
        let right = self.rule.integrate(mid, b, f)?;
        if (left + right - whole).abs() <= self.abs_tol {
            return Ok(left + right);
        }
        if depth >= self.max_depth {
            return Err(Error::NoConvergence(depth));
        }
        Ok(self.refine(a, mid, left, depth + 1, f)? + self.refine(mid, b, right, depth + 1, f)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for n in [1, 2, 5, 20] {
            let g = GaussLegendre::new(n);
            assert!((g.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for (a, b) in g.nodes().iter().zip(g.nodes().iter().rev()) {
                assert!((a + b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let g = GaussLegendre::new(5);
        for d in 0..10 {
            let v = g.integrate(0.0, 1.0, &mut |x| Ok(x.powi(d))).unwrap();
            assert!((v - 1.0 / (d + 1) as f64).abs() < 1e-14, "degree {d}");
        }
    }

    #[test]
    fn two_point_nodes() {
        let g = GaussLegendre::new(2);
        assert!((g.nodes()[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let q = AdaptiveQuadrature::default();
        let v = q.integrate(0.0, 1.0, |x| Ok(x.sqrt())).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
        let s = q.integrate(0.0, PI, |x| Ok(x.sin())).unwrap();
        assert!((s - 2.0).abs() < 1e-13);
    }

    #[test]
    fn errors_propagate() {
        let q = AdaptiveQuadrature::default();
        assert!(q.integrate(0.0, 1.0, |_| Err(Error::EmptySpectrum)).is_err());
    }
}
