//! Exact and numerical machinery for the singular-value law of `X^m`.
//!
//! The crate is `no_std` (it needs `alloc`) and has no IO. It covers:
//!
//! * [`combinatorics`] and [`series`]: exact Fuss–Catalan numbers, their
//!   recurrence, the moment generating series and its S-transform.
//! * [`paths`] and [`delta`]: closed index paths, their edge-class graphs,
//!   enumeration of regular paths and the gluing bijection that explains
//!   the Fuss–Catalan recurrence.
//! * [`rmt`]: sampling of `X`, the product `W = X^m (X^*)^m`, Hermitian
//!   eigensolvers, trace moments, truncation and empirical CDFs.
//! * [`limit`]: the limiting law itself, evaluated from its algebraic
//!   Stieltjes transform.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod combinatorics;
pub mod delta;
mod error;
pub mod limit;
pub mod paths;
pub mod rmt;
pub mod series;

pub use error::{Error, Result};
