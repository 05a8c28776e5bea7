use alloc::string::ToString;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
// Needed without std; std's inherent float methods shadow it when linked.
#[allow(unused_imports)]
use num_traits::Float;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Tail exponent of the heavy4 density `∝ (1 + |t|)^{-HEAVY_EXPONENT}`.
pub const HEAVY_EXPONENT: f64 = 5.5;
/// Variance of the unscaled heavy4 density: `2 / ((a-2)(a-3))` with a = 5.5.
const HEAVY_RAW_VARIANCE: f64 = 8.0 / 35.0;

/// Entry distribution. All have mean 0 and `E|x|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `(g_1 + i g_2) / √2`.
    ComplexGaussian,
    RealGaussian,
    /// `±1` with equal probability.
    Rademacher,
    /// Symmetric, density `∝ (1 + |t|)^{-5.5}`, rescaled to unit variance.
    Heavy4,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::ComplexGaussian,
        Family::RealGaussian,
        Family::Rademacher,
        Family::Heavy4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ComplexGaussian => "complex-gaussian",
            Family::RealGaussian => "real-gaussian",
            Family::Rademacher => "rademacher",
            Family::Heavy4 => "heavy4",
        }
    }

    /// Exact `E|x|^4`.
    pub fn fourth_moment(self) -> f64 {
        match self {
            Family::ComplexGaussian => 2.0,
            Family::RealGaussian => 3.0,
            Family::Rademacher => 1.0,
            // E t^4 = 24 / ((a-2)(a-3)(a-4)(a-5)) for the raw density.
            Family::Heavy4 => {
                let a = HEAVY_EXPONENT;
                24.0 / ((a - 2.0) * (a - 3.0) * (a - 4.0) * (a - 5.0)) / HEAVY_RAW_VARIANCE.powi(2)
            }
        }
    }

    pub fn is_real(self) -> bool {
        !matches!(self, Family::ComplexGaussian)
    }

    /// Two 64-bit words per entry regardless of family.
    pub fn sample(self, rng: &mut impl RngCore) -> Complex64 {
        let u1 = open_unit(rng.next_u64());
        let u2 = open_unit(rng.next_u64());
        match self {
            Family::ComplexGaussian => {
                let r = (-u1.ln()).sqrt();
                let theta = 2.0 * PI * u2;
                Complex64::new(r * theta.cos(), r * theta.sin())
            }
            Family::RealGaussian => {
                let r = (-2.0 * u1.ln()).sqrt();
                Complex64::new(r * (2.0 * PI * u2).cos(), 0.0)
            }
            Family::Rademacher => Complex64::new(if u1 < 0.5 { -1.0 } else { 1.0 }, 0.0),
            Family::Heavy4 => {
                // P(|t| > s) = (1 + s)^{-(a-1)}
                let magnitude = u1.powf(-1.0 / (HEAVY_EXPONENT - 1.0)) - 1.0;
                let sign = if u2 < 0.5 { -1.0 } else { 1.0 };
                Complex64::new(sign * magnitude / HEAVY_RAW_VARIANCE.sqrt(), 0.0)
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Uniform on (0, 1) from the top 52 bits, never 0 or 1.
fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    /// The bound `B` on `E|x|^4`.
    pub fourth_moment_bound: f64,
}

impl EnsembleSpec {
    /// Uses the family's exact fourth moment as the bound.
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            seed,
            fourth_moment_bound: family.fourth_moment(),
        }
    }

    pub fn with_n(self, n: usize) -> Self {
        Self { n, ..self }
    }
}

/// Independent stream per trial: ChaCha keyed by the master seed, stream
/// number = trial. Entry `(i, j)` always consumes words `4(iN + j) ..`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `X = N^{-1/2} (x_ij)` for one trial.
pub fn sample_matrix(spec: &EnsembleSpec, trial: u64) -> Result<ComplexMatrix> {
    if spec.n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let n = spec.n;
    let scale = 1.0 / (n as f64).sqrt();
    let mut rng = trial_rng(spec.seed, trial);
    let data = (0..n * n)
        .map(|_| spec.family.sample(&mut rng) * scale)
        .collect();
    Ok(ComplexMatrix::from_row_major(n, data))
}

/// Sample statistics of the scalar law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMoments {
    pub mean: Complex64,
    /// `E|x - mean|^2`.
    pub variance: f64,
    pub fourth: f64,
    pub draws: usize,
}

pub fn scalar_moments(family: Family, draws: usize, seed: u64) -> ScalarMoments {
    let mut rng = trial_rng(seed, u64::MAX);
    let (mut sum, mut sum_sq, mut sum_4) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
    for _ in 0..draws {
        let x = family.sample(&mut rng);
        let a2 = x.norm_sqr();
        sum += x;
        sum_sq += a2;
        sum_4 += a2 * a2;
    }
    let n = draws as f64;
    let mean = sum / n;
    ScalarMoments {
        mean,
        variance: sum_sq / n - mean.norm_sqr(),
        fourth: sum_4 / n,
        draws,
    }
}
