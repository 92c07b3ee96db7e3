//! G = P(Y < Z) and the limiting loss probability for arbitrary failure and
//! repair laws, given in the `kind:key=value` grammar.
//!
//! cargo run --example general_distributions -- weibull:shape=1.5,mean=0.1 weibull:shape=2,mean=0.001

use ecrel::distributions::{compute_g, g_by_quadrature, limiting_loss, worst_case_constant_repair, Distribution, DEFAULT_G_TOL};
use ecrel::CodeParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let fail: Distribution = args.first().map_or("weibull:shape=1.5,mean=0.1", String::as_str).parse()?;
    let rep: Distribution = args.get(1).map_or("weibull:shape=2,mean=0.001", String::as_str).parse()?;

    let g = compute_g(&fail, &rep, DEFAULT_G_TOL)?;
    println!("Y ~ {fail}, Z ~ {rep}");
    println!("G = {:.9e} ({}, error {:.1e})", g.g, g.method, g.abs_error);
    let quad = g_by_quadrature(&fail, &rep, DEFAULT_G_TOL)?;
    println!("quadrature alone: {:.9e} (error {:.1e})", quad.g, quad.abs_error);

    let code = CodeParams::new(4, 2)?;
    let t = 1.0;
    let limit = limiting_loss(code, &fail, &rep, t, DEFAULT_G_TOL)?;
    let worst = worst_case_constant_repair(code, &fail, rep.mean(), t)?;
    println!("(4,2), t = {t}: limiting loss {:.4e}", limit.p_loss);
    println!("constant repair with the same mean: {worst:.4e}");
    Ok(())
}
