//! Published reference configurations for the limiting loss formula: Weibull
//! failure and repair laws with their published formula values and simulation
//! results, used by the `table1` command, the acceptance tests and the
//! `weibull_validation` example.

use crate::code::CodeParams;
use crate::distributions::{limiting_loss, Distribution, LimitingLoss};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationRow {
    pub n: usize,
    pub k: usize,
    pub t: f64,
    pub fail_shape: f64,
    pub rep_shape: f64,
    /// Mean system inter-failure time `1/lambda`.
    pub fail_mean: f64,
    /// Mean repair time `1/mu`.
    pub rep_mean: f64,
    pub published_formula: f64,
    /// Significant digits shown for `published_formula`.
    pub formula_digits: u32,
    pub published_sim: f64,
    pub published_sd: f64,
}

pub const VALIDATION_ROWS: [ValidationRow; 7] = [
    row(4, 2, 1.5, 2.0, 0.1, 0.001, 3.343e-6, 4, 3.429e-6, 4.07e-7),
    row(4, 2, 0.75, 2.0, 0.1, 0.001, 0.0044, 2, 0.0044, 5.38e-4),
    row(4, 2, 0.75, 0.75, 0.1, 0.001, 0.0035, 2, 0.0036, 1.94e-4),
    row(4, 2, 0.75, 0.75, 0.1, 1e-6, 1.185e-7, 4, 1.221e-7, 1.22e-8),
    row(8, 5, 0.75, 1.25, 0.001, 1e-6, 8.9289e-5, 5, 8.8383e-5, 1.2397e-5),
    row(8, 5, 2.0, 2.0, 0.01, 0.001, 3.981e-5, 4, 4.012e-5, 1.548e-6),
    row(8, 5, 0.5, 2.0, 0.01, 1e-6, 1.013e-4, 4, 1.008e-4, 2.766e-6),
];

#[allow(clippy::too_many_arguments)]
const fn row(
    n: usize,
    k: usize,
    fail_shape: f64,
    rep_shape: f64,
    fail_mean: f64,
    rep_mean: f64,
    published_formula: f64,
    formula_digits: u32,
    published_sim: f64,
    published_sd: f64,
) -> ValidationRow {
    ValidationRow {
        n,
        k,
        t: 1.0,
        fail_shape,
        rep_shape,
        fail_mean,
        rep_mean,
        published_formula,
        formula_digits,
        published_sim,
        published_sd,
    }
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits as i32 - 1 - exp);
    (x * factor).round() / factor
}

impl ValidationRow {
    pub fn code(&self) -> CodeParams {
        CodeParams::new(self.n, self.k).expect("reference rows hold valid codes")
    }

    pub fn fail(&self) -> Distribution {
        Distribution::weibull_with_mean(self.fail_shape, self.fail_mean).expect("valid law")
    }

    pub fn rep(&self) -> Distribution {
        Distribution::weibull_with_mean(self.rep_shape, self.rep_mean).expect("valid law")
    }

    pub fn limiting_loss(&self, tol: f64) -> Result<LimitingLoss> {
        limiting_loss(self.code(), &self.fail(), &self.rep(), self.t, tol)
    }

    /// Digits compared against the published value: four, or fewer when fewer
    /// were published.
    pub fn compared_digits(&self) -> u32 {
        self.formula_digits.min(4)
    }

    /// Whether `value` agrees with the published formula value at
    /// [`compared_digits`](Self::compared_digits) significant digits.
    pub fn formula_matches(&self, value: f64) -> bool {
        let d = self.compared_digits();
        round_sig(value, d) == round_sig(self.published_formula, d)
    }

    /// Number of published standard deviations between `estimate` and the
    /// published simulation value.
    pub fn sim_deviation(&self, estimate: f64) -> f64 {
        (estimate - self.published_sim).abs() / self.published_sd
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DEFAULT_G_TOL;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(3.343002e-6, 4), 3.343e-6);
        assert_eq!(round_sig(8.928898e-5, 4), 8.929e-5);
        assert_eq!(round_sig(4.430693e-3, 2), 4.4e-3);
        assert_eq!(round_sig(-0.012345, 3), -0.0123);
    }

    #[test]
    fn formula_column() {
        for (i, r) in VALIDATION_ROWS.iter().enumerate() {
            let p = r.limiting_loss(DEFAULT_G_TOL).unwrap().p_loss;
            assert!(r.formula_matches(p), "row {}: {p:e}", i + 1);
        }
    }
}
