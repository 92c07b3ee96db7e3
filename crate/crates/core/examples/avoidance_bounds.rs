//! Set-avoidance bounds: the error polynomial, the bound for fixed failure
//! counts, and the Poisson bound next to its small-repair limit.

use num_bigint::BigInt;
use num_rational::BigRational;

use ecrel::avoidance::{avoidance_loss_upper, error_polynomial, multiplicative_gap, poisson_avoidance_upper};
use ecrel::exact::{exact_loss, poisson_asymptotic, LossQuery};
use ecrel::rational::to_f64;
use ecrel::CodeParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, k) in [(3, 2), (4, 2), (6, 4)] {
        let code = CodeParams::new(n, k)?;
        println!("({n},{k}) e(rho) = {}", error_polynomial(code)?.poly);
    }

    let code = CodeParams::new(4, 2)?;
    let m = vec![2, 2, 1, 1];
    println!("\n(4,2) m = {m:?}");
    for rho in [20i64, 50, 200] {
        let r = BigRational::from(BigInt::from(rho));
        let exact = to_f64(&exact_loss(&LossQuery::with_rho(code, m.clone(), r.clone())?)?);
        let upper = avoidance_loss_upper(code, &m, &r)?;
        println!("  rho = {rho:>3}: exact {exact:.4e} <= bound {upper:.4e}");
    }

    let (lambda, t) = (1.0, 1.0);
    println!("\nPoisson failures, lambda t = {}", lambda * t);
    for t_rep in [1e-1 / 3.0, 1e-2, 1e-3, 1e-4] {
        let upper = poisson_avoidance_upper(code, lambda, t, t_rep)?;
        let asym = poisson_asymptotic(code, lambda, t)? * t_rep * t_rep;
        println!("  t_rep = {t_rep:.1e}: bound {upper:.4e}, bound / limit = {:.4}", upper / asym);
    }
    println!("  limiting ratio (e^-lt + lt)^(k-1) = {:.4}", multiplicative_gap(code, lambda * t)?);
    Ok(())
}
