//! Volume polynomials of ordered points with constrained gaps, checked against
//! Monte Carlo sampling.
//!
//! cargo run --example volume_polynomials -- 01*1 7.5

use ecrel::rational::from_f64;
use ecrel::volume::{mc_volume, vp_closed, ConstraintVector, VolumeTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let b: ConstraintVector = args.next().unwrap_or_else(|| "01*1".into()).parse()?;
    let rho: f64 = args.next().map(|r| r.parse()).transpose()?.unwrap_or(7.5);

    let s = 4;
    let table = VolumeTable::new(s)?;
    println!("v_(i,j) for s = {s} (i long gaps, j short gaps):");
    for i in 0..s {
        for j in 0..s - i {
            println!("  v_({i},{j}) = {}", table.get(i, j)?);
        }
    }
    assert_eq!(table.get(1, 2)?, &vp_closed(1, 2, s)?);

    let poly = b.volume()?;
    let exact = ecrel::rational::to_f64(&poly.eval(&from_f64(rho)?));
    let est = mc_volume(&b, rho, 1_000_000, 7)?;
    println!("\nb = {b}: s! vol / t_rep^s = {poly}");
    println!("  at rho = {rho}: exact {exact:.4}, sampled {:.4} +- {:.4}", est.value, est.std_error);
    Ok(())
}
