//! Exact and asymptotic conditional loss probabilities for a constant repair
//! duration `t_rep`.
//!
//! Conditioned on the failure-count vector `m` (`m_i` failures of disk `i` in
//! `[0, t]`), the failure instants are uniform order statistics and every
//! pattern with counts `m` is equally likely. The loss probability is the
//! scaled volume of the error region summed over patterns:
//!
//! `P_m(D_t) = sum_f sum_{b error for f} v_b(rho) / (rho^s * multinomial(s; m))`.
//!
//! `lambda` in this module is always the per-disk Poisson failure rate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::code::CodeParams;
use crate::combinatorics::{factorial, falling_factorial, subset_product_sum, transition_counts};
use crate::error::{Error, Result};
use crate::patterns::{enumerate_patterns, error_vector_counts};
use crate::rational::recip;
use crate::volume::{check_validity, VolumePolynomial, VolumeTable};

/// Conditional loss query: code, failure counts and `rho = t / t_rep`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossQuery {
    pub code: CodeParams,
    pub m: Vec<u64>,
    pub rho: BigRational,
}

impl LossQuery {
    pub fn with_rho(code: CodeParams, m: Vec<u64>, rho: BigRational) -> Result<Self> {
        code.check_counts(&m)?;
        if !rho.is_positive() {
            return Err(Error::arg("rho must be positive"));
        }
        Ok(LossQuery { code, m, rho })
    }

    /// Query from `tau = t_rep / t`.
    pub fn with_tau(code: CodeParams, m: Vec<u64>, tau: BigRational) -> Result<Self> {
        if !tau.is_positive() {
            return Err(Error::arg("tau must be positive"));
        }
        Self::with_rho(code, m, recip(&tau)?)
    }

    pub fn failures(&self) -> u64 {
        self.m.iter().sum()
    }

    pub fn tau(&self) -> BigRational {
        recip(&self.rho).expect("rho is positive")
    }
}

/// Numerator polynomial of the exact loss: `sum_f sum_{b error} v_b(rho)`,
/// together with the number of patterns it is summed over.
#[derive(Debug, Clone, PartialEq)]
pub struct LossPolynomial {
    pub numerator: VolumePolynomial,
    pub patterns: BigInt,
    /// Total number of error vectors of each weight across all patterns.
    pub error_vectors: Vec<BigInt>,
}

impl LossPolynomial {
    /// `numerator(rho) / (rho^s * patterns)`, without the validity check.
    pub fn probability_at(&self, rho: &BigRational) -> BigRational {
        let s = self.numerator.dimension();
        if self.numerator.is_zero() {
            return BigRational::zero();
        }
        let den = num_traits::pow(rho.clone(), s) * BigRational::from(self.patterns.clone());
        self.numerator.eval(rho) / den
    }
}

/// Sums the error-region volume polynomials over every pattern with counts `m`.
pub fn loss_polynomial(code: CodeParams, m: &[u64]) -> Result<LossPolynomial> {
    code.check_counts(m)?;
    let patterns = enumerate_patterns(m)?;
    let total = patterns.total();
    let s = m.iter().sum::<u64>() as usize;
    let mut per_weight = vec![0u128; s];
    for f in patterns {
        for (acc, e) in per_weight.iter_mut().zip(error_vector_counts(&f, code)) {
            *acc += e;
        }
    }
    let numerator = if s == 0 {
        VolumePolynomial::zero(0)
    } else {
        let table = VolumeTable::new(s)?;
        per_weight
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e > 0)
            .map(|(w, &e)| table.full(w).scale(&BigInt::from(e)))
            .fold(VolumePolynomial::zero(s), |acc, p| &acc + &p)
    };
    Ok(LossPolynomial {
        numerator,
        patterns: total,
        error_vectors: per_weight.into_iter().map(BigInt::from).collect(),
    })
}

/// Exact conditional loss probability `P_m(D_t)` for `rho >= s - 1`.
pub fn exact_loss(q: &LossQuery) -> Result<BigRational> {
    let s = q.failures() as usize;
    if s >= 1 {
        check_validity(s, &q.rho)?;
    }
    Ok(loss_polynomial(q.code, &q.m)?.probability_at(&q.rho))
}

/// Loss probability of a `(2,1)` code with `m1`, `m2` failures from the
/// transition-count distribution: `1 - sum_j (1 - j tau)^s Pr(xi = j)`.
pub fn loss_21_closed(m1: u64, m2: u64, tau: &BigRational) -> Result<BigRational> {
    let s = m1 + m2;
    if tau.is_negative() || tau * BigRational::from(BigInt::from(s.saturating_sub(1))) > BigRational::one() {
        return Err(Error::arg(format!(
            "tau = {tau} outside [0, 1/(s-1)] for s = {s}"
        )));
    }
    if s == 0 {
        return Ok(BigRational::zero());
    }
    let counts = transition_counts(m1, m2);
    let total: BigInt = counts.iter().sum();
    let mut avoid = BigRational::zero();
    for (j, c) in counts.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let free = BigRational::one() - tau * BigRational::from(BigInt::from(j));
        avoid += num_traits::pow(free, s as usize) * BigRational::new(c.clone(), total.clone());
    }
    Ok(BigRational::one() - avoid)
}

/// `lim_{rho -> inf} P_m(D_t) rho^{n-k} = (n-k+1)! * e_{n-k+1}(m)`, with the
/// elementary symmetric sum over unordered `(n-k+1)`-subsets of disks.
pub fn asymptotic_loss(code: CodeParams, m: &[u64]) -> Result<BigInt> {
    code.check_counts(m)?;
    let r = code.loss_threshold();
    Ok(factorial(r as u64) * subset_product_sum(m, r))
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::arg(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

/// `n!/(k-1)!`, the falling factorial `(n)_{n-k+1}`.
fn lead(code: CodeParams) -> f64 {
    crate::rational::int_to_f64(&falling_factorial(code.n() as u64, code.loss_threshold() as u64))
}

/// `lim_{t_rep -> 0} P(D_t) / t_rep^{n-k} = n!/(k-1)! lambda^{n-k+1} t` for
/// independent Poisson failures of rate `lambda` per disk.
pub fn poisson_asymptotic(code: CodeParams, lambda: f64, t: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::arg("t must be nonnegative and finite"));
    }
    Ok(lead(code) * lambda.powi(code.loss_threshold() as i32) * t)
}

/// Markov-chain MTTDL and loss estimates for per-disk rate `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChenEstimate {
    /// `(k-1)! / (n! lambda^{n-k+1} t_rep^{n-k})`.
    pub mttdl: f64,
    /// First-order loss `t / mttdl`.
    pub p_first_order: f64,
    /// `1 - exp(-t / mttdl)`.
    pub p_exponential: f64,
}

pub fn chen_estimate(code: CodeParams, lambda: f64, t_rep: f64, t: f64) -> Result<ChenEstimate> {
    check_positive("lambda", lambda)?;
    check_positive("t_rep", t_rep)?;
    check_positive("t", t)?;
    let rate = lead(code)
        * lambda.powi(code.loss_threshold() as i32)
        * t_rep.powi(code.redundancy() as i32);
    Ok(ChenEstimate {
        mttdl: 1.0 / rate,
        p_first_order: rate * t,
        p_exponential: -(-rate * t).exp_m1(),
    })
}
