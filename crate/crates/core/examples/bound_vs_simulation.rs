//! Poisson set-avoidance bound against simulated chain losses as the repair
//! time shrinks.
//!
//! cargo run --release --example bound_vs_simulation

use ecrel::avoidance::{multiplicative_gap, poisson_avoidance_upper};
use ecrel::simulator::{simulate, LossDefinition, SimConfig, SimMode};
use ecrel::CodeParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let code = CodeParams::new(4, 2)?;
    let (lambda, t) = (1.0, 1.0);
    println!("(4,2), lambda = {lambda}, t = {t}; limiting ratio {:.4}", multiplicative_gap(code, lambda * t)?);
    for (t_rep, trials) in [(0.05, 200_000u64), (0.01, 1_000_000), (0.003, 4_000_000)] {
        let bound = poisson_avoidance_upper(code, lambda, t, t_rep)?;
        let mut row = vec![format!("t_rep = {t_rep:<6} bound {bound:.4e}")];
        for loss in [LossDefinition::Chain, LossDefinition::Cluster] {
            let est = simulate(&SimConfig {
                code,
                t,
                trials,
                seed: 5,
                mode: SimMode::ConstantPoisson { lambda, t_rep, loss },
            })?;
            row.push(format!("{loss} {:.4e} +- {:.1e}", est.p_hat, est.std_error));
            if loss == LossDefinition::Chain {
                row.push(format!("ratio {:.3}", bound / est.p_hat));
            }
        }
        println!("{}", row.join("  "));
    }
    Ok(())
}
