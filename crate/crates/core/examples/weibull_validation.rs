//! Limiting formula against the run-based simulator for the seven Weibull
//! reference configurations.
//!
//! cargo run --release --example weibull_validation -- 1000000

use ecrel::distributions::DEFAULT_G_TOL;
use ecrel::simulator::{simulate, SimConfig, SimMode};
use ecrel::validation::VALIDATION_ROWS;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials: u64 = std::env::args().nth(1).map_or(Ok(1_000_000), |a| a.parse())?;
    println!("row (n,k)  kappa_Y kappa_Z   formula     published   simulated (se)          published");
    for (i, row) in VALIDATION_ROWS.iter().enumerate() {
        let limit = row.limiting_loss(DEFAULT_G_TOL)?;
        let est = simulate(&SimConfig {
            code: row.code(),
            t: row.t,
            trials,
            seed: 1000 + i as u64,
            mode: SimMode::GeneralRuns {
                fail: row.fail(),
                rep: row.rep(),
            },
        })?;
        println!(
            "{:>3} ({},{})  {:>7} {:>7}   {:.4e}  {:.4e}  {:.4e} ({:.1e})  {:.4e} ({:.1e})",
            i + 1,
            row.n,
            row.k,
            row.fail_shape,
            row.rep_shape,
            limit.p_loss,
            row.published_formula,
            est.p_hat,
            est.std_error,
            row.published_sim,
            row.published_sd,
        );
    }
    Ok(())
}
