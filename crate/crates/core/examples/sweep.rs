//! Loss probability as the failure rate grows, for three repair laws with the
//! same mean: limiting formula, Markov-chain estimate and simulation.
//!
//! cargo run --release --example sweep -- 100000

use ecrel::distributions::{limiting_loss, Distribution, DEFAULT_G_TOL};
use ecrel::exact::chen_estimate;
use ecrel::simulator::{sweep, SimConfig, SimMode, SweepParam};
use ecrel::CodeParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials: u64 = std::env::args().nth(1).map_or(Ok(100_000), |a| a.parse())?;
    let code = CodeParams::new(4, 2)?;
    let (t, rep_mean) = (1.0, 0.1);
    let grid = [0.1, 0.2, 0.3, 0.4];
    let repairs = [
        Distribution::constant(rep_mean)?,
        Distribution::exponential(1.0 / rep_mean)?,
        Distribution::weibull_with_mean(0.5, rep_mean)?,
    ];
    for rep in repairs {
        println!("repair {rep}");
        let template = SimConfig {
            code,
            t,
            trials,
            seed: 11,
            mode: SimMode::GeneralRuns {
                fail: Distribution::exponential(1.0)?,
                rep,
            },
        };
        for point in sweep(&template, SweepParam::Lambda, &grid)? {
            let lambda = point.value;
            let fail = Distribution::exponential(code.n() as f64 * lambda)?;
            let limit = limiting_loss(code, &fail, &rep, t, DEFAULT_G_TOL)?.p_loss;
            let chen = chen_estimate(code, lambda, rep_mean, t)?.p_first_order;
            println!(
                "  lambda {lambda:.1}: limit {limit:.4e}  chen {chen:.4e}  sim {:.4e} +- {:.1e}",
                point.estimate.p_hat, point.estimate.std_error
            );
        }
    }
    Ok(())
}
