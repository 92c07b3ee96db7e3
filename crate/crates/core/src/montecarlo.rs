//! Reproducible parallel Monte Carlo plumbing.
//!
//! Trials are grouped into fixed blocks of [`BLOCK`] consecutive indices. Block
//! `b` draws from ChaCha8 stream `b` of the generator seeded with `seed`, so the
//! result of a run depends only on `(seed, trials)` and never on how rayon
//! schedules the blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Number of consecutive trials that share one generator stream.
pub const BLOCK: u64 = 4096;

/// Generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Binomial Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub p_hat: f64,
    pub std_error: f64,
    pub trials: u64,
    pub losses: u64,
    pub seed: u64,
}

impl SimEstimate {
    pub fn from_counts(losses: u64, trials: u64, seed: u64) -> Self {
        let p_hat = if trials == 0 {
            0.0
        } else {
            losses as f64 / trials as f64
        };
        let std_error = if trials == 0 {
            0.0
        } else {
            (p_hat * (1.0 - p_hat) / trials as f64).sqrt()
        };
        SimEstimate {
            p_hat,
            std_error,
            trials,
            losses,
            seed,
        }
    }

    /// Number of standard errors separating the estimate from `value`.
    /// Uses `1/trials` as a floor on the error so zero-loss runs compare sanely.
    pub fn z_score(&self, value: f64) -> f64 {
        let floor = 1.0 / self.trials.max(1) as f64;
        (self.p_hat - value).abs() / self.std_error.max(floor)
    }

    pub fn within(&self, value: f64, sigmas: f64) -> bool {
        self.z_score(value) <= sigmas
    }
}

/// Runs `trials` Bernoulli trials in parallel and counts successes.
///
/// `init` builds per-worker scratch state; `trial` performs one trial with the
/// block's generator.
pub fn count_successes<S, I, F>(trials: u64, seed: u64, init: I, trial: F) -> u64
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut ChaCha8Rng, &mut S) -> bool + Sync + Send,
{
    let blocks = trials.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map_init(&init, |state, b| {
            let mut rng = stream_rng(seed, b);
            let len = BLOCK.min(trials - b * BLOCK);
            (0..len).filter(|_| trial(&mut rng, state)).count() as u64
        })
        .sum()
}

/// Like [`count_successes`] but wrapped into a [`SimEstimate`].
pub fn estimate<S, I, F>(trials: u64, seed: u64, init: I, trial: F) -> SimEstimate
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut ChaCha8Rng, &mut S) -> bool + Sync + Send,
{
    SimEstimate::from_counts(count_successes(trials, seed, init, trial), trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn estimate_fields() {
        let e = SimEstimate::from_counts(25, 100, 7);
        assert_eq!(e.p_hat, 0.25);
        assert!((e.std_error - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert_eq!(e.seed, 7);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| count_successes(20_000, 42, || (), |rng, _| rng.random::<f64>() < 0.3))
        };
        let a = run(1);
        assert_eq!(a, run(3));
        assert_eq!(a, count_successes(20_000, 42, || (), |rng, _| rng.random::<f64>() < 0.3));
        assert_ne!(a, count_successes(20_000, 43, || (), |rng, _| rng.random::<f64>() < 0.3));
    }

    #[test]
    fn fair_coin() {
        let e = estimate(100_000, 1, || (), |rng, _| rng.random::<bool>());
        assert!(e.within(0.5, 4.0), "{e:?}");
    }
}
