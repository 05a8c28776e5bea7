use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
// Needed without std; std's inherent float methods shadow it when linked.
#[allow(unused_imports)]
use num_traits::Float;


use super::quadrature::{AdaptiveQuadrature, GaussLegendre};
use super::roots::Polynomial;
use crate::rmt::ecdf::Cdf;
use crate::{Error, Result};

/// Imaginary offsets for the density, extrapolated linearly to zero.
/// Scaled by `min(1, x, edge - x)` so the offset stays small next to the
/// distance from both singular points.
pub const EPSILON_LADDER: [f64; 3] = [1e-4, 1e-5, 1e-6];
/// Offset at which [`DensityGrid`] sweeps along the real direction.
pub const SWEEP_EPSILON: f64 = 1e-4;
/// Highest moment [`LimitLaw::density_moments`] accepts.
pub const MAX_MOMENT: u32 = 8;

const NEWTON_TOL: f64 = 1e-15;
/// Two roots closer than this (relative) cannot be told apart.
const DUPLICATE_ROOT_TOL: f64 = 1e-12;
const MIN_STEP: f64 = 1e-300;
/// Within this relative distance of the edge the two coalescing roots
/// differ by less than double precision can resolve; the density there
/// (of order `1e-4`) is reported as 0.
pub const EDGE_RESOLUTION: f64 = 1e-8;

/// `(m+1)^{m+1} / m^m`.
pub fn support_edge(m: u32) -> f64 {
    assert!(m >= 1, "m must be positive");
    let m = m as f64;
    (m + 1.0).powf(m + 1.0) / m.powf(m)
}

/// Marchenko–Pastur density `√(x(4-x)) / (2πx)` on `(0, 4]`.
pub fn mp_density_closed_form(x: f64) -> f64 {
    if x <= 0.0 || x >= 4.0 {
        0.0
    } else {
        (x * (4.0 - x)).sqrt() / (2.0 * PI * x)
    }
}

/// The limiting law of the squared singular values of `X^m`.
///
/// `w(z) = M(1/z)` solves `u w^{m+1} - w + 1 = 0` with `u = 1/z`, and the
/// Stieltjes transform is `s(z) = -w/z`. The physical root is followed
/// from `w ≈ 1` high above the real axis.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitLaw {
    m: u32,
    edge: f64,
}

impl LimitLaw {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be positive".into()));
        }
        Ok(Self { m, edge: support_edge(m) })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn support_edge(&self) -> f64 {
        self.edge
    }

    fn polynomial(&self, z: Complex64) -> Polynomial {
        Polynomial::functional(self.m, z.inv())
    }

    /// `dw/dz = w^{m+1} / (z^2 ∂_w P)`.
    fn slope(&self, z: Complex64, w: Complex64) -> Complex64 {
        let u = z.inv();
        let dp = u * (self.m + 1) as f64 * w.powu(self.m) - 1.0;
        w.powu(self.m + 1) / (z * z * dp)
    }

    /// Height from which the walk down starts: there `|u|` is well below
    /// the radius of convergence `1/edge` of the moment series.
    fn start_height(&self, x: f64) -> f64 {
        4.0 * (self.edge + x.abs())
    }

    fn asymptotic_root(&self, z: Complex64) -> Result<Complex64> {
        let u = z.inv();
        let guess = 1.0 + u + u * u * (self.m + 1) as f64;
        self.polynomial(z).newton(guess, NEWTON_TOL)
    }

    /// One predictor-corrector step from `(z, w)` to `target`, shrinking
    /// the step until the corrector is small next to the predictor move.
    fn step_to(&self, z: Complex64, w: Complex64, target: Complex64) -> Result<Complex64> {
        let (mut from, mut w) = (z, w);
        while from != target {
            let mut to = target;
            loop {
                let pred = w + self.slope(from, w) * (to - from);
                let poly = self.polynomial(to);
                if let Ok(next) = poly.newton(pred, NEWTON_TOL) {
                    let moved = (pred - w).norm();
                    let corrected = (next - pred).norm();
                    let floor = 1e-13 * w.norm().max(1.0) + 16.0 * poly.rounding_radius(next);
                    if corrected <= 0.1 * moved + floor {
                        from = to;
                        w = next;
                        break;
                    }
                }
                let half = (to - from) * 0.5;
                if half.norm() < MIN_STEP.max(1e-15 * from.norm()) {
                    return Err(Error::NoConvergence(0));
                }
                to = from + half;
            }
        }
        Ok(w)
    }

    /// Walks down the vertical line `Re z = x` and returns the physical
    /// root at each height (descending heights).
    fn track_down(&self, x: f64, start: Option<(f64, Complex64)>, heights: &[f64]) -> Result<Vec<Complex64>> {
        let (mut y, mut w) = match start {
            Some(s) => s,
            None => {
                let top = self.start_height(x).max(heights[0]);
                (top, self.asymptotic_root(Complex64::new(x, top))?)
            }
        };
        let mut out = Vec::with_capacity(heights.len());
        for &target in heights {
            while y > target {
                let next = (y * 0.5).max(target);
                w = self.step_to(Complex64::new(x, y), w, Complex64::new(x, next))?;
                y = next;
            }
            out.push(w);
        }
        Ok(out)
    }

    /// Checks a tracked root against all roots of the polynomial: it must
    /// be one of them, be isolated, and give `Im s > 0`.
    fn confirm(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let ambiguity = Error::BranchAmbiguity { re: z.re, im: z.im };
        let roots = self.polynomial(z).roots()?;
        let scale = w.norm().max(1.0);
        let mut near = roots.iter().filter(|r| (**r - w).norm() <= 1e-8 * scale);
        let root = *near.next().ok_or(ambiguity.clone())?;
        let close = roots
            .iter()
            .filter(|r| (**r - root).norm() <= DUPLICATE_ROOT_TOL * scale)
            .count();
        let s = -root / z;
        if close > 1 || s.im <= -1e-14 * s.norm() {
            return Err(ambiguity);
        }
        Ok(root)
    }

    /// `s(z) = ∫ dG(x) / (x - z)` for `Im z > 0`.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        if z.im.is_nan() || z.im <= 0.0 {
            return Err(Error::InvalidArgument("Im z must be positive".into()));
        }
        let w = self.track_down(z.re, None, &[z.im])?[0];
        Ok(-self.confirm(z, w)? / z)
    }

    fn ladder(&self, x: f64) -> [f64; 3] {
        let scale = 1.0f64.min(x).min(self.edge - x);
        EPSILON_LADDER.map(|e| e * scale)
    }

    /// Root on the real axis from the ladder: least-squares line through
    /// the three rungs evaluated at zero, then Newton at `ε = 0`.
    fn root_on_axis(&self, x: f64, ladder: &[f64; 3], ws: &[Complex64]) -> Complex64 {
        let n = 3.0;
        let me = ladder.iter().sum::<f64>() / n;
        let mw = ws.iter().sum::<Complex64>() / n;
        let see: f64 = ladder.iter().map(|e| (e - me) * (e - me)).sum();
        let sew: Complex64 = ladder.iter().zip(ws).map(|(e, w)| (w - mw) * (e - me)).sum();
        let w0 = mw - sew / see * me;
        let real = Complex64::new(x, 0.0);
        match self.polynomial(real).newton(w0, NEWTON_TOL) {
            Ok(w) if (w - w0).norm() <= 1e-4 * w0.norm().max(1.0) => w,
            _ => w0,
        }
    }

    fn density_from_root(&self, x: f64, w: Complex64) -> f64 {
        (-w.im / (PI * x)).max(0.0)
    }

    fn resolvable(&self, x: f64) -> bool {
        x > 0.0 && x < self.edge * (1.0 - EDGE_RESOLUTION)
    }

    /// `lim (1/π) Im s(x + iε)`; zero outside `(0, edge)`.
    pub fn density(&self, x: f64) -> Result<f64> {
        if !self.resolvable(x) {
            return Ok(0.0);
        }
        let ladder = self.ladder(x);
        let ws = self.track_down(x, None, &ladder)?;
        for (&e, &w) in ladder.iter().zip(&ws) {
            self.confirm(Complex64::new(x, e), w)?;
        }
        Ok(self.density_from_root(x, self.root_on_axis(x, &ladder, &ws)))
    }

    /// `∫_a^b f(x) ρ(x) dx` for `0 <= a <= b <= edge`, with `x = t^{m+1}`
    /// on the lower half (density `~ x^{-m/(m+1)}` at 0) and
    /// `x = edge - s^2` on the upper half (square-root edge).
    pub fn integrate_density<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F, quad: &AdaptiveQuadrature) -> Result<f64> {
        let (a, b) = (a.max(0.0), b.min(self.edge));
        if a >= b {
            return Ok(0.0);
        }
        let half = self.edge / 2.0;
        let k = (self.m + 1) as f64;
        let mut total = 0.0;
        if a < half {
            let (t0, t1) = (a.powf(1.0 / k), b.min(half).powf(1.0 / k));
            total += quad.integrate(t0, t1, |t| {
                let x = t.powf(k);
                Ok(f(x) * self.density(x)? * k * t.powf(k - 1.0))
            })?;
        }
        if b > half {
            let (s0, s1) = ((self.edge - b).sqrt(), (self.edge - a.max(half)).sqrt());
            total += quad.integrate(s0, s1, |s| {
                let x = self.edge - s * s;
                Ok(f(x) * self.density(x)? * 2.0 * s)
            })?;
        }
        Ok(total)
    }

    /// `G(x) = ∫_0^x ρ`, clamped to `[0, 1]`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let v = self.integrate_density(0.0, x, |_| 1.0, &AdaptiveQuadrature::default())?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// Total mass, unclamped.
    pub fn normalization(&self) -> Result<f64> {
        self.integrate_density(0.0, self.edge, |_| 1.0, &AdaptiveQuadrature::default())
    }

    /// `∫ x^p ρ(x) dx` for `p = 0..=p_max`.
    pub fn density_moments(&self, p_max: u32) -> Result<Vec<f64>> {
        if p_max > MAX_MOMENT {
            return Err(Error::InvalidArgument("p_max must be at most 8".into()));
        }
        (0..=p_max)
            .map(|p| {
                // Scale the absolute tolerance with the size of the answer.
                let quad = AdaptiveQuadrature::new(20, 1e-12 * self.edge.powi(p as i32), 30);
                self.integrate_density(0.0, self.edge, |x| x.powi(p as i32), &quad)
            })
            .collect()
    }
}

/// Density sampled on a grid by one continuous sweep from `2 · edge`
/// down to 0 at height [`SWEEP_EPSILON`], each point then finished by the
/// ε-ladder. The last root of the sweep is the branch cache.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub m: u32,
    pub abscissae: Vec<f64>,
    pub densities: Vec<f64>,
    /// `G` at each abscissa, made nondecreasing by a running maximum.
    pub cdf: Vec<f64>,
    pub epsilon: f64,
}

impl DensityGrid {
    pub fn new(law: &LimitLaw, abscissae: &[f64]) -> Result<Self> {
        let mut xs = abscissae.to_vec();
        if xs.iter().any(|x| x.is_nan()) {
            return Err(Error::InvalidArgument("NaN abscissa".into()));
        }
        xs.sort_by(f64::total_cmp);
        let eps = SWEEP_EPSILON;
        let start_x = 2.0 * law.edge;
        let mut cache = (start_x, law.track_down(start_x, None, &[eps])?[0]);
        let max_step = 10.0 * eps;

        let mut densities = alloc::vec![0.0; xs.len()];
        for (i, &x) in xs.iter().enumerate().rev() {
            if !law.resolvable(x) {
                continue;
            }
            let (mut at, mut w) = cache;
            while at > x {
                let next = (at - max_step).max(x);
                w = law.step_to(Complex64::new(at, eps), w, Complex64::new(next, eps))?;
                at = next;
            }
            let w = law.confirm(Complex64::new(x, eps), w)?;
            cache = (x, w);
            let ladder = law.ladder(x);
            let ws = law.track_down(x, Some((eps, w)), &ladder)?;
            densities[i] = law.density_from_root(x, law.root_on_axis(x, &ladder, &ws));
        }

        let quad = AdaptiveQuadrature::new(20, 1e-12, 30);
        let mut cdf = Vec::with_capacity(xs.len());
        let (mut acc, mut prev) = (0.0, 0.0f64);
        for &x in &xs {
            acc += law.integrate_density(prev, x.max(0.0), |_| 1.0, &quad)?;
            prev = prev.max(x);
            let last = cdf.last().copied().unwrap_or(0.0);
            cdf.push(acc.clamp(0.0, 1.0).max(last));
        }
        Ok(Self {
            m: law.m,
            abscissae: xs,
            densities,
            cdf,
            epsilon: eps,
        })
    }

    /// Geometric spacing on `(0, 0.05 edge]` (the density blows up at 0)
    /// followed by uniform spacing up to the edge; both ends included.
    pub fn standard_abscissae(law: &LimitLaw, points: usize) -> Vec<f64> {
        let points = points.max(8);
        let edge = law.edge;
        let geometric = points / 4;
        let (lo, knee) = (1e-12 * edge, 0.05 * edge);
        let mut xs = alloc::vec![0.0];
        xs.extend((0..geometric).map(|k| lo * (knee / lo).powf(k as f64 / geometric as f64)));
        let uniform = points - 1 - geometric;
        xs.extend((0..uniform).map(|k| knee + (edge - knee) * k as f64 / (uniform - 1) as f64));
        xs
    }

    /// Trapezoid rule over the grid (crude near the singularity at 0).
    pub fn trapezoid(&self) -> f64 {
        self.abscissae
            .windows(2)
            .zip(self.densities.windows(2))
            .map(|(x, d)| (x[1] - x[0]) * (d[0] + d[1]) / 2.0)
            .sum()
    }
}

/// `G` tabulated at `x = edge · (k/n)^{m+1}` and interpolated linearly in
/// `t = x^{1/(m+1)}`, where it is smooth except for the edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    m: u32,
    t_max: f64,
    values: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new(law: &LimitLaw, intervals: usize) -> Result<Self> {
        let k = (law.m + 1) as f64;
        let t_max = law.edge.powf(1.0 / k);
        let h = t_max / intervals as f64;
        let rule = GaussLegendre::new(8);
        let mut values = Vec::with_capacity(intervals + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for i in 0..intervals {
            acc += rule.integrate(i as f64 * h, (i + 1) as f64 * h, &mut |t| {
                Ok(law.density(t.powf(k))? * k * t.powf(k - 1.0))
            })?;
            values.push(acc.min(1.0).max(*values.last().expect("nonempty")));
        }
        Ok(Self { m: law.m, t_max, values })
    }

    /// Mass captured by the table before clamping; should be 1.
    pub fn total(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }
}

impl Cdf for TabulatedCdf {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let t = x.powf(1.0 / (self.m + 1) as f64);
        if t >= self.t_max {
            return 1.0;
        }
        let n = self.values.len() - 1;
        let pos = t / self.t_max * n as f64;
        let i = (pos as usize).min(n - 1);
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::fuss_catalan;
    use num_traits::ToPrimitive;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn law(m: u32) -> LimitLaw {
        LimitLaw::new(m).unwrap()
    }

    #[test]
    fn edges() {
        assert_eq!(support_edge(1), 4.0);
        assert!((support_edge(2) - 6.75).abs() < 1e-15);
        assert!((support_edge(3) - 256.0 / 27.0).abs() < 1e-14);
        assert!(LimitLaw::new(0).is_err());
    }

    #[test]
    fn far_field_expansion() {
        for m in 1..=4 {
            for z in [c(1e6, 0.0), c(0.0, 1e6), c(-7e5, 7e5)] {
                let z = if z.im == 0.0 { z + c(0.0, 1.0) } else { z };
                let s = law(m).stieltjes(z).unwrap();
                let approx = -z.inv() - z.inv() * z.inv();
                assert!((s - approx).norm() <= 1e-5 * approx.norm());
            }
        }
    }

    #[test]
    fn m1_matches_closed_form() {
        let l = law(1);
        for z in [c(2.0, 0.5), c(-1.0, 0.01), c(3.9, 1e-5), c(4.1, 1e-3), c(0.01, 0.01), c(50.0, 3.0)] {
            let closed = ((1.0 - 4.0 / z).sqrt() - 1.0) / 2.0;
            assert!((l.stieltjes(z).unwrap() - closed).norm() <= 1e-10, "z = {z}");
        }
    }

    #[test]
    fn m1_inversion_near_axis() {
        let s = law(1).stieltjes(c(2.0, 1e-6)).unwrap();
        assert!((s.im - 0.5).abs() < 1e-3);
    }

    #[test]
    fn herglotz() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        for m in 1..=4 {
            let l = law(m);
            for _ in 0..100 {
                let z = c(30.0 * unit() - 10.0, 10f64.powf(-6.0 + 8.0 * unit()));
                assert!(l.stieltjes(z).unwrap().im > 0.0, "m={m} z={z}");
            }
        }
    }

    #[test]
    fn lower_half_plane_rejected() {
        assert!(law(2).stieltjes(c(1.0, 0.0)).is_err());
        assert!(law(2).stieltjes(c(1.0, -1.0)).is_err());
    }

    #[test]
    fn marchenko_pastur_points() {
        let l = law(1);
        assert!((l.density(1.0).unwrap() - 3f64.sqrt() / (2.0 * PI)).abs() < 1e-6);
        assert!((mp_density_closed_form(2.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(mp_density_closed_form(4.0), 0.0);
        assert_eq!(l.density(5.0).unwrap(), 0.0);
    }

    #[test]
    fn m1_density_on_grid() {
        let l = law(1);
        let worst = (0..512)
            .map(|k| 1e-3 + (4.0 - 1e-3) * k as f64 / 511.0)
            .map(|x| (l.density(x).unwrap() - mp_density_closed_form(x)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-6, "max error {worst}");
    }

    #[test]
    fn mp_closed_form_normalized() {
        let q = AdaptiveQuadrature::default();
        // x = 4 sin^2 θ removes both endpoint singularities.
        let v = q
            .integrate(0.0, PI / 2.0, |th| {
                let x = 4.0 * th.sin().powi(2);
                Ok(mp_density_closed_form(x) * 8.0 * th.sin() * th.cos())
            })
            .unwrap();
        assert!((v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn normalization() {
        for m in 1..=4 {
            let mass = law(m).normalization().unwrap();
            assert!((mass - 1.0).abs() <= 1e-6, "m={m}: {mass}");
        }
    }

    #[test]
    fn moments_match_fuss_catalan() {
        for m in 1..=3 {
            let got = law(m).density_moments(6).unwrap();
            for (p, v) in got.iter().enumerate() {
                let exact = fuss_catalan(m, p as u32).to_f64().unwrap();
                assert!((v - exact).abs() <= 1e-4 * exact, "m={m} p={p}: {v} vs {exact}");
            }
        }
        assert!(law(1).density_moments(9).is_err());
    }

    #[test]
    fn cdf_endpoints() {
        for m in 1..=2 {
            let l = law(m);
            assert_eq!(l.cdf(0.0).unwrap(), 0.0);
            assert!((l.cdf(l.support_edge()).unwrap() - 1.0).abs() <= 1e-6);
        }
        let l = law(1);
        // MP: G(2) = 1/2 + 1/π (by symmetry of θ ↦ π/2 - θ in x = 4 sin^2 θ).
        assert!((l.cdf(2.0).unwrap() - (0.5 + 1.0 / PI)).abs() < 1e-8);
    }

    #[test]
    fn no_mass_beyond_edge() {
        for m in 1..=4 {
            let l = law(m);
            for dx in [0.01, 0.5, 3.0] {
                let x = l.support_edge() + dx;
                assert_eq!(l.density(x).unwrap(), 0.0);
                let near = l.stieltjes(c(x, 1e-6)).unwrap().im / PI;
                assert!((0.0..=1e-6).contains(&near), "m={m} x={x}: {near}");
            }
        }
    }

    #[test]
    fn grid_sweep_matches_pointwise() {
        for m in 1..=3 {
            let l = law(m);
            let xs = DensityGrid::standard_abscissae(&l, 200);
            let g = DensityGrid::new(&l, &xs).unwrap();
            for (x, d) in g.abscissae.iter().zip(&g.densities) {
                let direct = l.density(*x).unwrap();
                assert!((d - direct).abs() <= 1e-8 * direct.max(1.0), "m={m} x={x}");
                assert!(*d >= 0.0);
            }
            assert!(g.cdf.windows(2).all(|w| w[0] <= w[1]));
            assert!((g.cdf.last().unwrap() - 1.0).abs() <= 1e-6);
            assert!((g.trapezoid() - 1.0).abs() <= 2e-2, "m={m}: {}", g.trapezoid());
        }
    }

    #[test]
    fn tabulated_cdf_close_to_adaptive() {
        let l = law(2);
        let t = TabulatedCdf::new(&l, 1024).unwrap();
        assert!((t.total() - 1.0).abs() < 1e-5);
        for x in [0.01, 0.5, 2.0, 5.0, 6.7] {
            assert!((t.cdf(x) - l.cdf(x).unwrap()).abs() < 1e-5, "x={x}");
        }
        assert_eq!(t.cdf(-1.0), 0.0);
        assert_eq!(t.cdf(100.0), 1.0);
    }
}
