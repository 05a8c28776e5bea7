//! Exact Fuss–Catalan numbers `M_p^(m) = binom(mp + p, p) / (mp + 1)`.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// `binom(n, k)` in exact arithmetic.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc = binom(n, i) here, so the division is exact.
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// The p-th moment of the limit law for `X^m (X^*)^m`.
///
/// Panics if `binom(mp + p, p)` is not divisible by `mp + 1`, which would
/// mean the arithmetic above is broken.
pub fn fuss_catalan(m: u32, p: u32) -> BigUint {
    assert!(m >= 1, "m must be positive");
    let (m, p) = (u64::from(m), u64::from(p));
    let numerator = binomial(m * p + p, p);
    let (q, r) = numerator.div_rem(&BigUint::from(m * p + 1));
    assert!(r.is_zero(), "inexact Fuss-Catalan division at m={m}, p={p}");
    q
}

/// The ordinary Catalan number `binom(2p, p) / (p + 1)`.
pub fn catalan(p: u32) -> BigUint {
    let p = u64::from(p);
    binomial(2 * p, p) / BigUint::from(p + 1)
}

/// Moments `M_0 ..= M_{p_max}` for a fixed `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FussCatalanTable {
    m: u32,
    values: Vec<BigUint>,
}

impl FussCatalanTable {
    /// Fills the table from the closed form.
    pub fn new(m: u32, p_max: u32) -> Self {
        let values = (0..=p_max).map(|p| fuss_catalan(m, p)).collect();
        Self { m, values }
    }

    /// Fills the table using only `M_0 = 1` and [`fc_recurrence`].
    pub fn from_recurrence(m: u32, p_max: u32) -> Self {
        let mut table = Self {
            m,
            values: alloc::vec![BigUint::one()],
        };
        for p in 1..=p_max {
            let next = fc_recurrence(m, p, &table).expect("all smaller entries present");
            table.values.push(next);
        }
        table
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Largest p stored.
    pub fn p_max(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    pub fn get(&self, p: u32) -> Option<&BigUint> {
        self.values.get(p as usize)
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    /// `(p, M_p)` pairs in increasing p.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &BigUint)> {
        self.values.iter().enumerate().map(|(p, v)| (p as u32, v))
    }
}

/// Sum over all compositions `p_0 + … + p_m = p - 1` into `m + 1`
/// nonnegative parts of `Π table[p_i]`.
///
/// Evaluated as the `(m+1)`-fold convolution power of the table prefix.
pub fn fc_recurrence(m: u32, p: u32, table: &FussCatalanTable) -> Result<BigUint> {
    if p == 0 {
        return Err(Error::InvalidArgument("recurrence starts at p = 1".into()));
    }
    let target = (p - 1) as usize;
    if table.values.len() <= target {
        return Err(Error::MissingTableEntry(table.values.len()));
    }
    let prefix = &table.values[..=target];

    // conv[s] = number of ways with the parts seen so far summing to s.
    let mut conv = prefix.to_vec();
    for _ in 0..m {
        let mut next = alloc::vec![BigUint::zero(); target + 1];
        for (s, acc) in next.iter_mut().enumerate() {
            for t in 0..=s {
                *acc += &conv[t] * &prefix[s - t];
            }
        }
        conv = next;
    }
    Ok(conv.swap_remove(target))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Literal sum over every composition, enumerated one at a time.
    fn recurrence_by_compositions(m: u32, p: u32, table: &[BigUint]) -> BigUint {
        fn walk(parts_left: u32, remaining: usize, table: &[BigUint], acc: &BigUint, out: &mut BigUint) {
            if parts_left == 1 {
                *out += acc * &table[remaining];
                return;
            }
            for first in 0..=remaining {
                let next = acc * &table[first];
                walk(parts_left - 1, remaining - first, table, &next, out);
            }
        }
        let mut out = BigUint::zero();
        walk(m + 1, (p - 1) as usize, table, &BigUint::one(), &mut out);
        out
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(fuss_catalan(1, 0), BigUint::from(1u32));
        assert_eq!(fuss_catalan(2, 2), BigUint::from(3u32));
        assert_eq!(fuss_catalan(2, 3), BigUint::from(12u32));
        assert_eq!(fuss_catalan(3, 2), BigUint::from(4u32));
    }

    #[test]
    fn recurrence_examples() {
        let t2 = FussCatalanTable::new(2, 4);
        assert_eq!(fc_recurrence(2, 1, &t2).unwrap(), BigUint::from(1u32));
        assert_eq!(fc_recurrence(2, 2, &t2).unwrap(), BigUint::from(3u32));
        let t1 = FussCatalanTable::new(1, 4);
        assert_eq!(fc_recurrence(1, 3, &t1).unwrap(), BigUint::from(5u32));
    }

    #[test]
    fn recurrence_needs_smaller_entries() {
        let t = FussCatalanTable::new(2, 1);
        assert_eq!(fc_recurrence(2, 4, &t), Err(Error::MissingTableEntry(2)));
        assert!(fc_recurrence(2, 0, &t).is_err());
    }

    #[test]
    fn convolution_matches_literal_compositions() {
        for m in 1..=4 {
            let t = FussCatalanTable::new(m, 8);
            for p in 1..=8 {
                assert_eq!(
                    fc_recurrence(m, p, &t).unwrap(),
                    recurrence_by_compositions(m, p, t.values()),
                    "m={m} p={p}"
                );
            }
        }
    }

    #[test]
    fn large_entry() {
        // binom(72, 12) / 61
        assert_eq!(fuss_catalan(5, 12), BigUint::from(251_857_119_696u64));
    }

    #[test]
    fn table_from_recurrence_agrees() {
        for m in 1..=5 {
            assert_eq!(FussCatalanTable::new(m, 12), FussCatalanTable::from_recurrence(m, 12));
        }
    }

    #[test]
    fn m_one_is_catalan() {
        let known = [1u32, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786, 208012];
        for (p, &c) in known.iter().enumerate() {
            assert_eq!(fuss_catalan(1, p as u32), BigUint::from(c));
            assert_eq!(catalan(p as u32), BigUint::from(c));
        }
    }
}
