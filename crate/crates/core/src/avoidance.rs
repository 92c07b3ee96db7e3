//! Set-avoidance bounds on data loss.
//!
//! With one failure instant per disk, the `n` instants form a point of
//! `[0,t]^n` and data is lost exactly when the point lies in the error region
//! `R` of the code. Its scaled volume is the error polynomial
//! `e(rho) = t_rep^{-n} vol R = sum_{j=n-k}^{n-1} alpha_j v_{n-1-j, j}(rho)`.
//! For several failures per disk the loss event is that the Cartesian product
//! of the per-disk instant sets meets `R`; Jensen's inequality turns this into
//! the bound `1 - (1 - e/rho^n)^{m_1 ... m_n}`.
//!
//! The event bounded here is the chain definition of loss: `n-k+1` instants
//! on distinct disks whose sorted successive gaps are all shorter than `t_rep`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::code::CodeParams;
use crate::combinatorics::{alpha_j, binomial};
use crate::error::{Error, Result};
use crate::rational::{from_f64, to_f64};
use crate::volume::{check_validity, VolumePolynomial, VolumeTable};

/// Largest block length accepted by [`error_polynomial`].
pub const MAX_ERROR_POLY_N: usize = 20;

/// The error polynomial `e(rho)` of a code, in ambient dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorPolynomial {
    pub code: CodeParams,
    pub poly: VolumePolynomial,
}

impl ErrorPolynomial {
    /// `vol R / t^n = e(rho) / rho^n`, exactly.
    pub fn error_fraction(&self, rho: &BigRational) -> Result<BigRational> {
        check_validity(self.code.n(), rho)?;
        Ok(self.poly.eval(rho) / num_traits::pow(rho.clone(), self.code.n()))
    }
}

pub fn error_polynomial(code: CodeParams) -> Result<ErrorPolynomial> {
    let n = code.n();
    if n > MAX_ERROR_POLY_N {
        return Err(Error::arg(format!(
            "error polynomial supports n <= {MAX_ERROR_POLY_N}, got {n}"
        )));
    }
    let table = VolumeTable::new(n)?;
    let mut poly = VolumePolynomial::zero(n);
    for j in code.redundancy()..n {
        let a = alpha_j(code, j)?;
        if !a.is_zero() {
            poly = &poly + &table.full(j).scale(&a);
        }
    }
    Ok(ErrorPolynomial { code, poly })
}

/// `1 - (1 - p)^count` without cancellation for small `p`.
fn one_minus_power(p: f64, count: f64) -> f64 {
    if p >= 1.0 {
        return 1.0;
    }
    -(count * (-p).ln_1p()).exp_m1()
}

fn check_all_failed(code: CodeParams, m: &[u64]) -> Result<f64> {
    code.check_counts(m)?;
    if m.contains(&0) {
        return Err(Error::arg(
            "the product bound needs every disk to fail at least once; \
             use the Poisson bound to cover disks without failures",
        ));
    }
    Ok(m.iter().map(|&x| x as f64).product())
}

/// Jensen lower bound on the probability of no loss,
/// `(1 - e(rho)/rho^n)^{m_1 ... m_n}`, all `m_i >= 1`.
pub fn avoidance_reliability_lower(code: CodeParams, m: &[u64], rho: &BigRational) -> Result<f64> {
    Ok(1.0 - avoidance_loss_upper(code, m, rho)?)
}

/// Upper bound `1 - (1 - e(rho)/rho^n)^{m_1 ... m_n}` on the conditional loss
/// probability, all `m_i >= 1` and `rho >= n - 1`.
pub fn avoidance_loss_upper(code: CodeParams, m: &[u64], rho: &BigRational) -> Result<f64> {
    let count = check_all_failed(code, m)?;
    let p = to_f64(&error_polynomial(code)?.error_fraction(rho)?);
    Ok(one_minus_power(p, count))
}

/// Upper bound on the unconditional loss probability for Poisson failures of
/// rate `lambda` per disk:
/// `sum_{j=n-k+1}^{n} C(n,j) e^{-lambda t (n-j)} (lambda t)^j e_j(rho) / rho^j`,
/// where `e_j` is the error polynomial of the `(j, j-(n-k))` code formed by the
/// `j` disks that fail.
pub fn poisson_avoidance_upper(code: CodeParams, lambda: f64, t: f64, t_rep: f64) -> Result<f64> {
    if !(lambda > 0.0 && t > 0.0 && t_rep >= 0.0) || !(lambda * t).is_finite() {
        return Err(Error::arg("need lambda > 0, t > 0 and t_rep >= 0"));
    }
    if t_rep == 0.0 {
        return Ok(0.0);
    }
    let n = code.n();
    let rho = from_f64(t / t_rep)?;
    let min = (n - 1) as f64;
    if t < min * t_rep {
        return Err(Error::ValidityDomain {
            rho: format!("{}", t / t_rep),
            min: format!("{min}"),
        });
    }
    let lt = lambda * t;
    let mut total = 0.0;
    for j in code.loss_threshold()..=n {
        let sub = CodeParams::new(j, j - code.redundancy())?;
        let frac = to_f64(&error_polynomial(sub)?.error_fraction(&rho)?);
        let weight = to_f64(&BigRational::from(binomial(n as u64, j as i64)))
            * (-lt * (n - j) as f64).exp()
            * lt.powi(j as i32);
        total += weight * frac;
    }
    Ok(total)
}

/// Limiting ratio `(e^{-lambda t} + lambda t)^{k-1}` of the Poisson bound to the
/// true loss probability as `t_rep -> 0`.
pub fn multiplicative_gap(code: CodeParams, lambda_t: f64) -> Result<f64> {
    if !(lambda_t >= 0.0) || !lambda_t.is_finite() {
        return Err(Error::arg("lambda t must be nonnegative"));
    }
    Ok(((-lambda_t).exp() + lambda_t).powi(code.k() as i32 - 1))
}

/// Second-order upper bound on the probability that `m1 x m2` instant pairs
/// all avoid an error set of probability `p_eps`:
/// `1 - m1 m2 p + 2 C(m1,2) C(m2,2) p^2 + m2 C(m1,2) E[Q1^2] + m1 C(m2,2) E[Q2^2]`,
/// where `Q_i` is the error probability conditioned on the instant of disk `i`.
pub fn second_order_avoidance_upper(
    p_eps: f64,
    eq1_sq: f64,
    eq2_sq: f64,
    m1: u64,
    m2: u64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_eps) || !(eq1_sq >= 0.0) || !(eq2_sq >= 0.0) {
        return Err(Error::arg("p_eps must lie in [0,1] and moments must be nonnegative"));
    }
    let c2 = |m: u64| (m * m.saturating_sub(1) / 2) as f64;
    let (a, b) = (m1 as f64, m2 as f64);
    Ok(1.0 - a * b * p_eps
        + 2.0 * c2(m1) * c2(m2) * p_eps * p_eps
        + b * c2(m1) * eq1_sq
        + a * c2(m2) * eq2_sq)
}

/// Jensen lower bound `(1 - p_eps)^{m1 m2}` on the same avoidance probability.
pub fn product_avoidance_lower(p_eps: f64, m1: u64, m2: u64) -> f64 {
    1.0 - one_minus_power(p_eps, (m1 * m2) as f64)
}

/// Error probability `2 tau - tau^2` of a `(2,1)` code with one failure per disk.
pub fn pair_error_probability(tau: f64) -> f64 {
    2.0 * tau - tau * tau
}

/// `E[Q^2]` for a `(2,1)` code, `tau <= 1/2`: `Q(x)` is the length of
/// `[x - tau, x + tau] ∩ [0, 1]`, giving `4 tau^2 - 10 tau^3 / 3`.
pub fn pair_conditional_second_moment(tau: f64) -> f64 {
    4.0 * tau * tau - 10.0 * tau.powi(3) / 3.0
}

/// Exact scaled error-region volume `t_rep^{-n} vol R` as an integer polynomial
/// in `(t, t_rep)`: returns coefficients of `t^d t_rep^{n-d}`, ascending in `d`.
pub fn error_volume_homogeneous(code: CodeParams) -> Result<Vec<BigInt>> {
    Ok(error_polynomial(code)?.poly.coeffs().to_vec())
}

/// `e(rho) = rho^n - (rho - (n-1))^n` for `k = n - 1`.
pub fn single_parity_error_polynomial(n: usize) -> VolumePolynomial {
    let top = VolumePolynomial::rho_pow(n);
    &top - &top.shifted(-(n as i64 - 1))
}
