//! Reliability of `(n,k)` MDS erasure-coded storage.
//!
//! The crate computes the probability of data loss in a time window `[0, t]`
//! (equivalently the reliability function `R(t) = 1 - P(D_t)`) by several
//! independent routes:
//!
//! * [`exact`]: exact conditional loss for constant repair duration, from
//!   failure-pattern enumeration and volumes of ordered polytopes
//!   ([`volume`], [`patterns`]), together with its small-repair asymptotics.
//! * [`avoidance`]: set-avoidance upper bounds built on the code's error
//!   polynomial.
//! * [`distributions`]: failure/repair laws, the cross probability
//!   `G = P(Y < Z)` and the limiting loss formula for general laws.
//! * [`simulator`]: seeded Monte Carlo oracles for all of the above.
//!
//! Probabilities that are combinatorial in nature are returned as exact
//! [`BigRational`](num_rational::BigRational) values; conversion to `f64`
//! happens only when reporting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod avoidance;
pub mod cli;
pub mod code;
pub mod combinatorics;
pub mod distributions;
pub mod error;
pub mod exact;
pub mod patterns;
pub mod montecarlo;
pub mod quadrature;
pub mod rational;
pub mod simulator;
pub mod validation;
pub mod volume;

pub use code::CodeParams;
pub use error::{Error, Result};
