//! Exact loss probability for fixed failure counts and a constant repair time,
//! and how it approaches its small-repair asymptote.
//!
//! cargo run --example exact_loss -- 4 2 2,1,1,1

use num_bigint::BigInt;
use num_rational::BigRational;

use ecrel::exact::{asymptotic_loss, exact_loss, loss_polynomial, LossQuery};
use ecrel::rational::to_f64;
use ecrel::CodeParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(4), |a| a.parse())?;
    let k: usize = args.get(1).map_or(Ok(2), |a| a.parse())?;
    let m: Vec<u64> = args
        .get(2)
        .map_or("2,1,1,1", String::as_str)
        .split(',')
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    let code = CodeParams::new(n, k)?;

    let lp = loss_polynomial(code, &m)?;
    println!("P_m(rho) = ({}) / ({} rho^{})", lp.numerator, lp.patterns, m.iter().sum::<u64>());
    let limit = asymptotic_loss(code, &m)?;
    println!("limit of P rho^(n-k): {limit}");
    for rho in [10i64, 100, 1000, 10_000] {
        let rho = BigRational::from(BigInt::from(rho));
        let p = exact_loss(&LossQuery::with_rho(code, m.clone(), rho.clone())?)?;
        let scaled = to_f64(&(p.clone() * num_traits::pow(rho.clone(), n - k)));
        println!("  rho = {rho:>6}: P = {:.6e}, P rho^(n-k) = {scaled:.4}", to_f64(&p));
    }
    Ok(())
}
