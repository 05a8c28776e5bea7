//! Dense truncated power series over exact rationals.
//!
//! Every operation truncates at the smaller order of its operands, so a
//! result through order `K` only depends on inputs through order `K`.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinatorics::{binomial, fuss_catalan};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

fn rat_from_uint(v: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v.clone()))
}

impl TruncatedSeries {
    /// Series `c_0 + c_1 z + … + c_K z^K`. `coeffs` must be nonempty.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series keeps at least the constant term");
        Self { coeffs }
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(coeffs: I) -> Self {
        Self::new(
            coeffs
                .into_iter()
                .map(|c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn zero(order: usize) -> Self {
        Self::new(alloc::vec![BigRational::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// The series `z`, truncated at `order >= 1`.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = BigRational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs: Vec<_> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, BigRational::zero());
        Self::new(coeffs)
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Multiplication by `z`, keeping the order.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(BigRational::zero());
        coeffs.extend(self.coeffs[..self.order()].iter().cloned());
        Self::new(coeffs)
    }

    /// Division by `z`. Needs a zero constant term; the order drops by one.
    pub fn shift_down(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidSeries("division by z needs a zero constant term"));
        }
        if self.order() == 0 {
            return Err(Error::InvalidSeries("division by z of an order-0 series"));
        }
        Ok(Self::new(self.coeffs[1..].to_vec()))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// `self(inner(z))`. `inner` must have a zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::InvalidSeries("inner series of a composition needs c_0 = 0"));
        }
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        // Horner from the top coefficient.
        let mut acc = Self::zero(order);
        for c in self.coeffs[..=order].iter().rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// The compositional inverse `v` with `self(v(z)) = z` through `order`.
    pub fn reversion(&self, order: usize) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidSeries("reversion needs c_0 = 0"));
        }
        if self.order() < 1 || self.coeffs[1].is_zero() {
            return Err(Error::InvalidSeries("reversion needs an invertible linear term"));
        }
        let order = order.min(self.order());
        let lead_inv = self.coeffs[1].recip();
        let mut inverse = Self::zero(order);
        if order >= 1 {
            inverse.coeffs[1] = lead_inv.clone();
        }
        // Fix one coefficient per round: the z^k coefficient of
        // self(inverse) is linear in inverse_k with slope c_1.
        for k in 2..=order {
            let err = self.compose(&inverse)?.coeffs[k].clone();
            inverse.coeffs[k] -= err * &lead_inv;
        }
        Ok(inverse)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        TruncatedSeries::new((0..=order).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect())
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        TruncatedSeries::new((0..=order).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect())
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        let mut out = alloc::vec![BigRational::zero(); order + 1];
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=order - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TruncatedSeries::new(out)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

/// `Σ_{p ≤ K} M_p^(m) x^p`.
pub fn moment_series(m: u32, order: usize) -> TruncatedSeries {
    TruncatedSeries::new(
        (0..=order as u32)
            .map(|p| rat_from_uint(&fuss_catalan(m, p)))
            .collect(),
    )
}

/// `M - 1 - x M^{m+1}` through `order`; identically zero for the true series.
pub fn functional_equation_residual(m: u32, order: usize) -> TruncatedSeries {
    let series = moment_series(m, order);
    let rhs = &TruncatedSeries::one(order) + &series.pow(m + 1).shift_up();
    &series - &rhs
}

/// The moment tail `u(z) = Σ_{p ≥ 1} M_p z^p`.
pub fn moment_tail(m: u32, order: usize) -> TruncatedSeries {
    let mut u = moment_series(m, order);
    u.coeffs[0] = BigRational::zero();
    u
}

/// `S(z) = ((z + 1) / z) · u^{-1}(z)`, valid through order `K - 1`.
pub fn s_transform_series(m: u32, order: usize) -> Result<TruncatedSeries> {
    if order < 1 {
        return Err(Error::InvalidArgument("S-transform needs order >= 1".into()));
    }
    let inverse = moment_tail(m, order).reversion(order)?;
    let over_z = inverse.shift_down()?;
    Ok(&over_z + &over_z.shift_up())
}

/// Coefficients of `(1 + z)^{-m}`: `(-1)^j binom(m - 1 + j, j)`.
pub fn inverse_binomial_series(m: u32, order: usize) -> TruncatedSeries {
    TruncatedSeries::new(
        (0..=order as u64)
            .map(|j| {
                let mag = BigInt::from(binomial(u64::from(m) - 1 + j, j));
                let signed = if j % 2 == 0 { mag } else { -mag };
                BigRational::from_integer(signed)
            })
            .collect(),
    )
}
