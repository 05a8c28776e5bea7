//! Gluing `m + 1` smaller regular paths onto the `(m, 1)` backbone, and
//! cutting a regular path back into those pieces.
//!
//! Part `k` (of size `p_k`) is attached at its own type-`k` vertex to the
//! type-`k` vertex of the backbone. Along the big path, part `k` occupies
//! the section `2m P_{k-1} + k ..= 2m P_k + k` (with `P_k = p_0 + … + p_k`),
//! reading the part's indices starting at its position `k`. The return leg
//! revisits the section ends at positions `2mp - k`.

use alloc::format;
use alloc::vec::Vec;

use crate::paths::{certify, IndexPath};
use crate::{Error, Result};

/// Builds the `(m, p)` path from parts with `p_0 + … + p_m = p - 1`.
pub fn delta_compose(parts: &[IndexPath], m: usize) -> Result<IndexPath> {
    if parts.len() != m + 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} parts, got {}",
            m + 1,
            parts.len()
        )));
    }
    for (index, part) in parts.iter().enumerate() {
        if part.m() != m || !part.is_canonical() || !certify(part)?.is_regular() {
            return Err(Error::InvalidPart { index });
        }
    }
    let p = parts.iter().map(IndexPath::p).sum::<usize>() + 1;
    let len = 2 * m * p;
    let mut out = alloc::vec![0u32; len];

    // Parts get disjoint label ranges; an empty part contributes one fresh
    // label for its backbone vertex.
    let mut label_base = 0u32;
    let mut start = 0usize;
    let mut section_ends = Vec::with_capacity(m + 1);
    for (k, part) in parts.iter().enumerate() {
        let span = part.len();
        if span == 0 {
            out[start] = label_base + 1;
            label_base += 1;
        } else {
            for s in 0..=span {
                if start + s < len {
                    out[start + s] = label_base + part.indices()[(k + s) % span];
                }
            }
            label_base += part.distinct() as u32;
        }
        section_ends.push(start + span);
        start += span + 1;
    }
    for k in 1..m {
        out[len - k] = out[section_ends[k]];
    }
    debug_assert!(out.iter().all(|&i| i != 0));
    Ok(IndexPath::new(m, p, out)?.canonicalize())
}

/// The position sets `J_0 … J_m` of a regular path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JSets {
    pub sets: Vec<Vec<usize>>,
}

impl JSets {
    pub fn compute(path: &IndexPath) -> Self {
        let (m, len) = (path.m(), path.len());
        let idx = path.indices();
        let positions_of = |target: u32, skip: Option<usize>| -> Vec<usize> {
            (0..len)
                .filter(|&j| idx[j] == target && Some(j) != skip)
                .collect()
        };
        let mut sets = Vec::with_capacity(m + 1);
        sets.push(positions_of(idx[0], None));
        for k in 1..m {
            sets.push(positions_of(idx[len - k], Some(len - k)));
        }
        if m >= 1 {
            sets.push(positions_of(idx[len - m], None));
        }
        Self { sets }
    }

    pub fn all_nonempty(&self) -> bool {
        self.sets.iter().all(|s| !s.is_empty())
    }

    pub fn pairwise_disjoint(&self) -> bool {
        self.sets.iter().enumerate().all(|(k, a)| {
            self.sets[k + 1..]
                .iter()
                .all(|b| a.iter().all(|j| !b.contains(j)))
        })
    }

    /// Every element of `J_k` precedes every element of `J_l` for `k < l`.
    pub fn ordered(&self) -> bool {
        self.sets
            .windows(2)
            .all(|w| match (w[0].last(), w[1].first()) {
                (Some(a), Some(b)) => a < b,
                _ => false,
            })
    }

    pub fn spans_divisible(&self, m: usize) -> bool {
        self.sets
            .iter()
            .all(|s| s.is_empty() || (s[s.len() - 1] - s[0]) % (2 * m) == 0)
    }

    /// `max J_k + 1 = min J_{k+1}`; informational only.
    pub fn adjacent_boundaries(&self) -> bool {
        self.sets
            .windows(2)
            .all(|w| matches!((w[0].last(), w[1].first()), (Some(a), Some(b)) if a + 1 == *b))
    }

    /// Interiors of the sections `min J_k ..= max J_k` use pairwise
    /// disjoint index sets.
    pub fn sections_disjoint(&self, path: &IndexPath) -> bool {
        let interiors: Vec<Vec<u32>> = self
            .sets
            .iter()
            .map(|s| match (s.first(), s.last()) {
                (Some(&lo), Some(&hi)) if hi > lo + 1 => path.indices()[lo + 1..hi].to_vec(),
                _ => Vec::new(),
            })
            .collect();
        interiors.iter().enumerate().all(|(k, a)| {
            interiors[k + 1..]
                .iter()
                .all(|b| a.iter().all(|i| !b.contains(i)))
        })
    }

    /// `(max J_k - min J_k) / 2m` for each k.
    pub fn part_sizes(&self, m: usize) -> Vec<usize> {
        self.sets
            .iter()
            .map(|s| (s[s.len() - 1] - s[0]) / (2 * m))
            .collect()
    }
}

/// Splits a regular `(m, p)` path into its `m + 1` canonical parts.
pub fn delta_invert(path: &IndexPath) -> Result<Vec<IndexPath>> {
    let m = path.m();
    if path.p() == 0 {
        return Err(Error::InvalidArgument("the empty path has no decomposition".into()));
    }
    if !path.is_canonical() || !certify(path)?.is_regular() {
        return Err(Error::CertificateViolation(format!("not a regular path: {path}")));
    }
    let j = JSets::compute(path);
    if !j.all_nonempty() {
        return Err(Error::CertificateViolation("some J_k is empty".into()));
    }
    if !j.pairwise_disjoint() || !j.ordered() {
        return Err(Error::CertificateViolation("J_k overlap or are out of order".into()));
    }
    if !j.spans_divisible(m) {
        return Err(Error::CertificateViolation("a J_k span is not divisible by 2m".into()));
    }
    let sizes = j.part_sizes(m);
    if sizes.iter().sum::<usize>() + 1 != path.p() {
        return Err(Error::CertificateViolation("part sizes do not add up to p - 1".into()));
    }

    let mut parts = Vec::with_capacity(m + 1);
    for (k, (set, &pk)) in j.sets.iter().zip(&sizes).enumerate() {
        if pk == 0 {
            parts.push(IndexPath::empty(m));
            continue;
        }
        let span = 2 * m * pk;
        let lo = set[0];
        let raw = (0..span)
            .map(|t| path.indices()[lo + (t + span - k % span) % span])
            .collect();
        let part = IndexPath::new(m, pk, raw)?.canonicalize();
        if !certify(&part)?.is_regular() {
            return Err(Error::CertificateViolation(format!("part {k} is not regular")));
        }
        parts.push(part);
    }
    Ok(parts)
}

/// Every weak composition of `total` into `parts` ordered summands, in
/// lexicographic order.
pub fn weak_compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 0..=left {
            cur.push(first);
            rec(left - first, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}
