//! Volumes of ordered simplices with constrained successive differences.
//!
//! For `s` ordered points `0 <= x_1 <= ... <= x_s <= t`, a constraint vector
//! marks each of the `s - 1` gaps `x_{i+1} - x_i` as short (`< t_rep`), long
//! (`>= t_rep`) or free. With `i` long and `j` short gaps the scaled volume
//! `s! vol / t_rep^s` is the integer polynomial `v_{i,j}(rho)` in
//! `rho = t / t_rep`. The polynomial is the actual volume only once every
//! constraint pattern is feasible, which [`validity_min`] makes precise.
//!
//! Strict and non-strict inequalities give the same volumes (they differ on a
//! null set); the Monte Carlo oracle uses `<` for short and `>=` for long gaps.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::combinatorics::{binomial, factorial, stirling2};
use crate::error::{Error, Result};
use crate::montecarlo::{self, SimEstimate};

/// Dense integer polynomial in `rho`, tagged with the ambient dimension `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VolumePolynomial {
    s: usize,
    coeffs: Vec<BigInt>,
}

impl VolumePolynomial {
    pub fn zero(s: usize) -> Self {
        VolumePolynomial {
            s,
            coeffs: vec![BigInt::zero(); s + 1],
        }
    }

    /// `rho^s`.
    pub fn rho_pow(s: usize) -> Self {
        let mut p = Self::zero(s);
        p.coeffs[s] = BigInt::one();
        p
    }

    /// Builds a polynomial from ascending coefficients; missing high terms
    /// are zero.
    pub fn from_coeffs(s: usize, coeffs: impl IntoIterator<Item = BigInt>) -> Result<Self> {
        let mut p = Self::zero(s);
        for (d, c) in coeffs.into_iter().enumerate() {
            if d > s {
                if c.is_zero() {
                    continue;
                }
                return Err(Error::arg(format!("coefficient of rho^{d} exceeds dimension {s}")));
            }
            p.coeffs[d] = c;
        }
        Ok(p)
    }

    pub fn dimension(&self) -> usize {
        self.s
    }

    /// Ascending coefficients, `coeffs()[d]` multiplies `rho^d`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> BigInt {
        self.coeffs.get(d).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.degree().map(|d| self.coeffs[d].clone()).unwrap_or_default()
    }

    pub fn eval(&self, rho: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * rho + BigRational::from(c.clone()))
    }

    pub fn eval_f64(&self, rho: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * rho + crate::rational::int_to_f64(c))
    }

    /// The polynomial `rho -> p(rho + delta)`.
    pub fn shifted(&self, delta: i64) -> Self {
        let delta = BigInt::from(delta);
        let mut out = Self::zero(self.s);
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // c (rho + delta)^d
            let mut pow = BigInt::one();
            for e in (0..=d).rev() {
                out.coeffs[e] += c * binomial(d as u64, e as i64) * &pow;
                pow *= &delta;
            }
        }
        out
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        VolumePolynomial {
            s: self.s,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    fn combine(&self, other: &Self, sign: i32) -> Self {
        let s = self.s.max(other.s);
        let mut out = Self::zero(s);
        for (d, slot) in out.coeffs.iter_mut().enumerate() {
            let b = other.coeff(d);
            *slot = if sign > 0 { self.coeff(d) + b } else { self.coeff(d) - b };
        }
        out
    }
}

impl Add for &VolumePolynomial {
    type Output = VolumePolynomial;
    fn add(self, rhs: Self) -> VolumePolynomial {
        self.combine(rhs, 1)
    }
}

impl Sub for &VolumePolynomial {
    type Output = VolumePolynomial;
    fn sub(self, rhs: Self) -> VolumePolynomial {
        self.combine(rhs, -1)
    }
}

impl Mul<&VolumePolynomial> for &BigInt {
    type Output = VolumePolynomial;
    fn mul(self, rhs: &VolumePolynomial) -> VolumePolynomial {
        rhs.scale(self)
    }
}

impl std::iter::Sum for VolumePolynomial {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(VolumePolynomial::zero(0), |acc, p| &acc + &p)
    }
}

impl fmt::Display for VolumePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(top) = self.degree() else {
            return write!(f, "0");
        };
        for d in (0..=top).rev() {
            let c = &self.coeffs[d];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if d == top {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            let show_mag = d == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match d {
                0 => {}
                1 => write!(f, "{}rho", if show_mag { "*" } else { "" })?,
                _ => write!(f, "{}rho^{d}", if show_mag { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

fn check_index(i: usize, j: usize, s: usize) -> Result<()> {
    if s == 0 || i + j + 1 > s {
        return Err(Error::VolumeIndex { i, j, s });
    }
    Ok(())
}

/// All `v_{i,j}` for one dimension `s`, built from the initial condition
/// `v_{0,0} = rho^s`, the shift rule `v_{i+1,j}(rho) = v_{i,j}(rho - 1)` and the
/// first-difference rule `v_{i,j} = v_{i,j-1} - v_{i+1,j-1}`.
#[derive(Debug, Clone)]
pub struct VolumeTable {
    s: usize,
    // rows[i][j], i + j <= s - 1
    rows: Vec<Vec<VolumePolynomial>>,
}

impl VolumeTable {
    pub fn new(s: usize) -> Result<Self> {
        check_index(0, 0, s)?;
        let base = VolumePolynomial::rho_pow(s);
        let mut rows: Vec<Vec<VolumePolynomial>> = (0..s)
            .map(|i| vec![base.shifted(-(i as i64))])
            .collect();
        for j in 1..s {
            for i in 0..s - j {
                let next = &rows[i][j - 1] - &rows[i + 1][j - 1];
                rows[i].push(next);
            }
        }
        Ok(VolumeTable { s, rows })
    }

    pub fn dimension(&self) -> usize {
        self.s
    }

    pub fn get(&self, i: usize, j: usize) -> Result<&VolumePolynomial> {
        check_index(i, j, self.s)?;
        Ok(&self.rows[i][j])
    }

    /// `v_{s-1-w, w}`: the volume of one fully specified gap vector of weight `w`.
    pub fn full(&self, w: usize) -> &VolumePolynomial {
        &self.rows[self.s - 1 - w][w]
    }
}

/// `v_{i,j}` in dimension `s` by the rule system.
pub fn vp_rules(i: usize, j: usize, s: usize) -> Result<VolumePolynomial> {
    check_index(i, j, s)?;
    Ok(VolumeTable::new(s)?.rows[i][j].clone())
}

/// `v_{i,j}` from the Stirling-number coefficient formula
/// `a_r = C(s,r) j! (-1)^{s-r+j} sum_m C(s-r,m) i^m S2(s-r-m, j)`.
pub fn vp_closed(i: usize, j: usize, s: usize) -> Result<VolumePolynomial> {
    check_index(i, j, s)?;
    let jf = factorial(j as u64);
    let coeffs = (0..=s).map(|r| {
        let rest = (s - r) as u64;
        let mut inner = BigInt::zero();
        let mut ipow = BigInt::one();
        for m in 0..=rest {
            inner += binomial(rest, m as i64) * &ipow * stirling2(rest - m, j as u64);
            ipow *= i;
        }
        let mut a = binomial(s as u64, r as i64) * &jf * inner;
        if (rest + j as u64) % 2 == 1 {
            a = -a;
        }
        a
    });
    VolumePolynomial::from_coeffs(s, coeffs)
}

/// `v_{i,j}` as the alternating sum `sum_l (-1)^{j-l} C(j,l) (rho - i - j + l)^s`.
pub fn vp_shift_form(i: usize, j: usize, s: usize) -> Result<VolumePolynomial> {
    check_index(i, j, s)?;
    let base = VolumePolynomial::rho_pow(s);
    let mut out = VolumePolynomial::zero(s);
    for l in 0..=j {
        let term = base
            .shifted(l as i64 - (i + j) as i64)
            .scale(&binomial(j as u64, l as i64));
        out = if (j - l).is_multiple_of(2) { &out + &term } else { &out - &term };
    }
    Ok(out)
}

/// Smallest `rho` at which every `v_{i,j}` of dimension `s` is a true volume.
pub fn validity_min(s: usize) -> BigInt {
    BigInt::from(s.saturating_sub(1))
}

/// Checks `rho >= s - 1`.
pub fn check_validity(s: usize, rho: &BigRational) -> Result<()> {
    let min = validity_min(s);
    if *rho < BigRational::from(min.clone()) {
        return Err(Error::ValidityDomain {
            rho: rho.to_string(),
            min: min.to_string(),
        });
    }
    Ok(())
}

/// Volume `(t - i t_rep)^s / s!` of the ordered region whose `s` points keep
/// `i` prescribed gaps of at least `t_rep`; zero when `t <= i t_rep`.
pub fn simplex_volume(i: usize, s: usize, t: f64, t_rep: f64) -> Result<f64> {
    if s == 0 {
        return Err(Error::arg("dimension s must be >= 1"));
    }
    if !(t >= 0.0) || !(t_rep >= 0.0) {
        return Err(Error::arg("durations must be nonnegative"));
    }
    let side = t - i as f64 * t_rep;
    if side <= 0.0 {
        return Ok(0.0);
    }
    let mut v = 1.0;
    for d in 1..=s {
        v *= side / d as f64;
    }
    Ok(v)
}

/// Constraint on one gap between successive ordered points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapConstraint {
    /// Gap `>= t_rep` (written `0`).
    Long,
    /// Gap `< t_rep` (written `1`).
    Short,
    /// Unconstrained (written `*`).
    Free,
}

/// A vector of gap constraints such as `"01*1"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstraintVector(pub Vec<GapConstraint>);

impl ConstraintVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn count(&self, c: GapConstraint) -> usize {
        self.0.iter().filter(|&&g| g == c).count()
    }

    pub fn longs(&self) -> usize {
        self.count(GapConstraint::Long)
    }

    pub fn shorts(&self) -> usize {
        self.count(GapConstraint::Short)
    }

    /// The scaled volume `v_{#long, #short}` in dimension `len + 1`.
    pub fn volume(&self) -> Result<VolumePolynomial> {
        vp_closed(self.longs(), self.shorts(), self.len() + 1)
    }

    /// Whether sorted points `x` (in units of `t_rep`) satisfy the constraints.
    pub fn admits(&self, x: &[f64]) -> bool {
        self.0.iter().zip(x.windows(2)).all(|(c, w)| match c {
            GapConstraint::Long => w[1] - w[0] >= 1.0,
            GapConstraint::Short => w[1] - w[0] < 1.0,
            GapConstraint::Free => true,
        })
    }
}

impl FromStr for ConstraintVector {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Ok(GapConstraint::Long),
                '1' => Ok(GapConstraint::Short),
                '*' => Ok(GapConstraint::Free),
                other => Err(Error::parse(text, format!("unexpected character '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(ConstraintVector)
    }
}

impl fmt::Display for ConstraintVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            let ch = match c {
                GapConstraint::Long => '0',
                GapConstraint::Short => '1',
                GapConstraint::Free => '*',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

/// Monte Carlo estimate of a scaled volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    /// Estimate of `s! vol / t_rep^s`.
    pub value: f64,
    pub std_error: f64,
    /// Fraction of sampled cubes points that satisfied the constraints.
    pub fraction: SimEstimate,
}

impl VolumeEstimate {
    pub fn within(&self, exact: f64, sigmas: f64) -> bool {
        let floor = self.value.abs().max(exact.abs()) / self.fraction.trials.max(1) as f64;
        (self.value - exact).abs() <= sigmas * self.std_error.max(floor)
    }
}

/// Estimates `s! vol(R_b) / t_rep^s` for the constraint vector `b`
/// (`s = b.len() + 1`) by sampling uniform points in `[0, rho]^s`.
pub fn mc_volume(b: &ConstraintVector, rho: f64, trials: u64, seed: u64) -> Result<VolumeEstimate> {
    if trials == 0 {
        return Err(Error::arg("trials must be >= 1"));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::arg("rho must be positive and finite"));
    }
    let s = b.len() + 1;
    let fraction = montecarlo::estimate(
        trials,
        seed,
        || vec![0.0f64; s],
        |rng, x| {
            for v in x.iter_mut() {
                *v = rng.random::<f64>() * rho;
            }
            x.sort_unstable_by(f64::total_cmp);
            b.admits(x)
        },
    );
    let cube = rho.powi(s as i32);
    Ok(VolumeEstimate {
        value: fraction.p_hat * cube,
        std_error: fraction.std_error * cube,
        fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: usize, c: &[i64]) -> VolumePolynomial {
        VolumePolynomial::from_coeffs(s, c.iter().map(|&x| BigInt::from(x))).unwrap()
    }

    fn r(x: i64) -> BigRational {
        BigRational::from(BigInt::from(x))
    }

    #[test]
    fn initial_and_left_boundary() {
        assert_eq!(vp_rules(0, 0, 4).unwrap(), VolumePolynomial::rho_pow(4));
        // (rho - 2)^3
        assert_eq!(vp_rules(2, 0, 3).unwrap(), poly(3, &[-8, 12, -6, 1]));
        assert_eq!(vp_rules(0, 0, 1).unwrap(), poly(1, &[0, 1]));
    }

    #[test]
    fn one_short_gap_in_two_points() {
        // |x1 - x2| < 1 in the square: rho^2 - (rho-1)^2 = 2 rho - 1
        assert_eq!(vp_rules(0, 1, 2).unwrap(), poly(2, &[-1, 2]));
        assert_eq!(vp_closed(0, 1, 2).unwrap(), poly(2, &[-1, 2]));
    }

    #[test]
    fn example_polynomials() {
        let s4 = VolumeTable::new(4).unwrap();
        let e = &s4.get(1, 2).unwrap().scale(&2.into()) + s4.get(0, 3).unwrap();
        assert_eq!(e, poly(4, &[64, -72, 24]));
        assert_eq!(e.eval(&r(10)), r(1744));

        let s6 = VolumeTable::new(6).unwrap();
        let e6 = &s6.get(1, 2).unwrap().scale(&2.into()) + s6.get(0, 3).unwrap();
        assert_eq!(e6, poly(6, &[664, -1260, 960, -360, 60]));
    }

    #[test]
    fn rules_closed_and_shift_forms_agree() {
        for s in 1..=8 {
            let table = VolumeTable::new(s).unwrap();
            for i in 0..s {
                for j in 0..s - i {
                    let rules = table.get(i, j).unwrap();
                    assert_eq!(rules, &vp_closed(i, j, s).unwrap(), "closed ({i},{j},{s})");
                    assert_eq!(rules, &vp_shift_form(i, j, s).unwrap(), "shift ({i},{j},{s})");
                    assert_eq!(rules.degree(), Some(s - j));
                    assert_eq!(
                        rules.leading_coeff(),
                        factorial(j as u64) * binomial(s as u64, j as i64)
                    );
                }
            }
        }
    }

    #[test]
    fn shift_rule_holds() {
        let t = VolumeTable::new(6).unwrap();
        for i in 0..4 {
            for j in 0..5 - i {
                assert_eq!(t.get(i + 1, j).unwrap(), &t.get(i, j).unwrap().shifted(-1));
            }
        }
    }

    #[test]
    fn full_vectors_partition_the_simplex() {
        for s in 1..=9 {
            let t = VolumeTable::new(s).unwrap();
            let total: VolumePolynomial = (0..s)
                .map(|w| t.full(w).scale(&binomial(s as u64 - 1, w as i64)))
                .sum();
            assert_eq!(total, VolumePolynomial::rho_pow(s));
        }
    }

    #[test]
    fn nonnegative_on_validity_domain() {
        for s in 1..=7 {
            let t = VolumeTable::new(s).unwrap();
            for i in 0..s {
                for j in 0..s - i {
                    for extra in 0..4 {
                        let rho = BigRational::new((2 * (s as i64 - 1) + extra).into(), 2.into());
                        if check_validity(s, &rho).is_ok() {
                            assert!(!t.get(i, j).unwrap().eval(&rho).is_negative());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn index_errors() {
        assert_eq!(vp_rules(2, 2, 4), Err(Error::VolumeIndex { i: 2, j: 2, s: 4 }));
        assert!(vp_closed(0, 0, 0).is_err());
        assert!(check_validity(5, &r(3)).is_err());
        assert!(check_validity(5, &r(4)).is_ok());
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(vp_rules(0, 0, 3).unwrap().eval(&r(2)), r(8));
        assert_eq!(vp_rules(1, 0, 2).unwrap().eval(&r(1)), r(0));
        let p = poly(4, &[64, -72, 24]);
        assert_eq!(p.eval_f64(10.0), 1744.0);
    }

    #[test]
    fn display() {
        assert_eq!(poly(4, &[64, -72, 24]).to_string(), "24*rho^2 - 72*rho + 64");
        assert_eq!(poly(3, &[0, -1, 0, 1]).to_string(), "rho^3 - rho");
        assert_eq!(VolumePolynomial::zero(3).to_string(), "0");
    }

    #[test]
    fn simplex_volumes() {
        assert!((simplex_volume(0, 3, 2.0, 0.5).unwrap() - 8.0 / 6.0).abs() < 1e-15);
        assert_eq!(simplex_volume(2, 3, 0.2, 0.1).unwrap(), 0.0);
        let v = simplex_volume(2, 3, 1.0, 0.1).unwrap();
        assert!((v - 0.8f64.powi(3) / 6.0).abs() < 1e-15);
        assert!(simplex_volume(1, 2, -1.0, 0.1).is_err());
    }

    #[test]
    fn constraint_vector_parsing() {
        let b: ConstraintVector = "01*1".parse().unwrap();
        assert_eq!((b.longs(), b.shorts(), b.len()), (1, 2, 4));
        assert_eq!(b.to_string(), "01*1");
        assert!("01x".parse::<ConstraintVector>().is_err());
        assert_eq!(b.volume().unwrap(), vp_closed(1, 2, 5).unwrap());
    }

    #[test]
    fn mc_volume_matches_polynomial() {
        let b: ConstraintVector = "110".parse().unwrap();
        let est = mc_volume(&b, 10.0, 200_000, 3).unwrap();
        let exact = vp_closed(1, 2, 4).unwrap().eval_f64(10.0);
        assert!(est.within(exact, 4.0), "{est:?} vs {exact}");

        let free: ConstraintVector = "**".parse().unwrap();
        let est = mc_volume(&free, 4.0, 1000, 1).unwrap();
        assert_eq!(est.value, 64.0);

        let infeasible: ConstraintVector = "0".parse().unwrap();
        let est = mc_volume(&infeasible, 1.0, 10_000, 1).unwrap();
        assert_eq!(est.value, 0.0);
    }
}
