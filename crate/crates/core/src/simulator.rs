//! Seeded Monte Carlo estimates of the loss probability.
//!
//! Two models are simulated:
//!
//! * General laws ([`SimMode::GeneralRuns`]): system failures arrive with iid
//!   inter-failure times `Y_i` and each failure starts a repair of duration
//!   `Z_i`. Failure `i` lands during the repair of failure `i - 1` when
//!   `Y_i < Z_{i-1}`. A maximal stretch of `u` such overlaps links `u + 1`
//!   failures, each on a uniformly chosen disk, and data is lost when one
//!   stretch touches more than `n - k` distinct disks. Failures are counted up
//!   to the horizon `t`.
//! * Constant repair time `t_rep` with uniform failure instants, either with a
//!   fixed count vector `m` or with independent Poisson counts per disk. Loss
//!   is detected by one of two definitions, see [`LossDefinition`].

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Poisson};

use crate::code::CodeParams;
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::montecarlo::{self, SimEstimate};


/// Which event counts as data loss under a constant repair time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossDefinition {
    /// Some tight cluster of the failure pattern has all its gaps shorter than
    /// `t_rep`; equivalently, some maximal stretch of failures separated by
    /// gaps under `t_rep` covers `n - k + 1` distinct disks.
    Cluster,
    /// Some `n - k + 1` failure instants on pairwise distinct disks have all
    /// sorted successive gaps shorter than `t_rep`.
    Chain,
}

impl fmt::Display for LossDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossDefinition::Cluster => "cluster",
            LossDefinition::Chain => "chain",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimMode {
    /// Renewal failures with law `fail` (system inter-failure time) and
    /// repairs with law `rep`.
    GeneralRuns { fail: Distribution, rep: Distribution },
    /// `m[d]` failures of disk `d + 1` at uniform instants in `[0, t]`.
    ConstantConditioned {
        m: Vec<u64>,
        t_rep: f64,
        loss: LossDefinition,
    },
    /// Independent Poisson failures of rate `lambda` on every disk.
    ConstantPoisson {
        lambda: f64,
        t_rep: f64,
        loss: LossDefinition,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub code: CodeParams,
    pub t: f64,
    pub trials: u64,
    pub seed: u64,
    pub mode: SimMode,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::arg("trials must be >= 1"));
        }
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::arg("horizon t must be positive and finite"));
        }
        match &self.mode {
            SimMode::GeneralRuns { fail, .. } => {
                if !(fail.mean() > 0.0) {
                    return Err(Error::InvalidDistribution(
                        "failure law must have a positive mean".into(),
                    ));
                }
            }
            SimMode::ConstantConditioned { m, t_rep, .. } => {
                self.code.check_counts(m)?;
                check_t_rep(*t_rep)?;
            }
            SimMode::ConstantPoisson { lambda, t_rep, .. } => {
                if !(*lambda > 0.0) || !lambda.is_finite() {
                    return Err(Error::arg("lambda must be positive and finite"));
                }
                check_t_rep(*t_rep)?;
            }
        }
        Ok(())
    }
}

fn check_t_rep(t_rep: f64) -> Result<()> {
    if t_rep >= 0.0 && t_rep.is_finite() {
        Ok(())
    } else {
        Err(Error::arg("t_rep must be nonnegative and finite"))
    }
}

/// Runs the simulation described by `cfg`.
pub fn simulate(cfg: &SimConfig) -> Result<SimEstimate> {
    match cfg.mode {
        SimMode::GeneralRuns { .. } => simulate_general(cfg),
        _ => simulate_constant(cfg),
    }
}

/// Run-based simulation for general failure and repair laws.
pub fn simulate_general(cfg: &SimConfig) -> Result<SimEstimate> {
    cfg.validate()?;
    let SimMode::GeneralRuns { fail, rep } = cfg.mode else {
        return Err(Error::arg("simulate_general needs the general-runs mode"));
    };
    let fail = Sampler::new(&fail);
    let overlap = OverlapTest::new(&rep);
    let n = cfg.code.n() as u32;
    let limit = cfg.code.redundancy() as u32;
    let t = cfg.t;
    Ok(montecarlo::estimate(cfg.trials, cfg.seed, || (), |rng, _| {
        general_trial(rng, &fail, &overlap, n, limit, t)
    }))
}

/// Inversion sampler with the per-law constants precomputed.
#[derive(Debug, Clone, Copy)]
enum Sampler {
    Exponential { mean: f64 },
    Weibull { scale: f64, inv_shape: f64 },
    Constant { value: f64 },
}

impl Sampler {
    fn new(d: &Distribution) -> Self {
        match *d {
            Distribution::Exponential { rate } => Sampler::Exponential { mean: 1.0 / rate },
            Distribution::Weibull { shape: 1.0, scale } => Sampler::Exponential { mean: scale },
            Distribution::Weibull { shape, scale } => Sampler::Weibull {
                scale,
                inv_shape: 1.0 / shape,
            },
            Distribution::Constant { value } => Sampler::Constant { value },
        }
    }

    #[inline]
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Sampler::Exponential { mean } => -mean * unit_open(rng).ln(),
            Sampler::Weibull { scale, inv_shape } => {
                scale * power(-unit_open(rng).ln(), inv_shape)
            }
            Sampler::Constant { value } => value,
        }
    }
}

/// `x^a` with the exponents of common shapes special-cased.
#[inline]
fn power(x: f64, a: f64) -> f64 {
    if a == 1.0 {
        x
    } else if a == 2.0 {
        x * x
    } else if a == 0.5 {
        x.sqrt()
    } else {
        x.powf(a)
    }
}

/// Uniform on `(0, 1]`, so that `-ln u` is finite.
#[inline]
fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Draws the event `Y < Z` for a given `Y = y` without sampling `Z` itself:
/// for a continuous repair law it happens with probability `S_Z(y)`.
#[derive(Debug, Clone, Copy)]
enum OverlapTest {
    /// Repairs of fixed duration `value`.
    Below { value: f64 },
    /// `S_Z(y) = exp(-(y/scale)^shape)`. Beyond `cutoff` the survival is below
    /// the resolution of a 53-bit uniform, so no draw is made.
    Hazard { scale: f64, shape: f64, cutoff: f64 },
}

/// Largest cumulative hazard whose survival a 53-bit uniform can still hit.
const HAZARD_CUTOFF: f64 = 37.0;

impl OverlapTest {
    fn new(rep: &Distribution) -> Self {
        let (scale, shape) = match *rep {
            Distribution::Constant { value } => return OverlapTest::Below { value },
            Distribution::Exponential { rate } => (1.0 / rate, 1.0),
            Distribution::Weibull { shape, scale } => (scale, shape),
        };
        OverlapTest::Hazard {
            scale,
            shape,
            cutoff: scale * HAZARD_CUTOFF.powf(1.0 / shape),
        }
    }

    #[inline]
    fn overlaps(&self, rng: &mut ChaCha8Rng, y: f64) -> bool {
        match *self {
            OverlapTest::Below { value } => y < value,
            OverlapTest::Hazard { scale, shape, cutoff } => {
                if y >= cutoff {
                    return false;
                }
                let hazard = power(y / scale, shape);
                rng.random::<f64>() < (-hazard).exp()
            }
        }
    }
}

#[inline]
fn general_trial(
    rng: &mut ChaCha8Rng,
    fail: &Sampler,
    overlap: &OverlapTest,
    n: u32,
    limit: u32,
    t: f64,
) -> bool {
    let mut x = fail.draw(rng);
    if x >= t {
        return false;
    }
    // disks touched by the current stretch; 0 when no stretch is open
    let mut mask: u64 = 0;
    loop {
        let y = fail.draw(rng);
        x += y;
        if x >= t {
            return false;
        }
        if overlap.overlaps(rng, y) {
            if mask == 0 {
                mask = 1 << rng.random_range(0..n);
            }
            mask |= 1 << rng.random_range(0..n);
            if mask.count_ones() > limit {
                return true;
            }
        } else {
            mask = 0;
        }
    }
}

/// Simulation with constant repair time, conditioned on counts or with
/// Poisson counts.
pub fn simulate_constant(cfg: &SimConfig) -> Result<SimEstimate> {
    cfg.validate()?;
    let code = cfg.code;
    let t = cfg.t;
    match &cfg.mode {
        SimMode::ConstantConditioned { m, t_rep, loss } => {
            let (m, t_rep, loss) = (m.clone(), *t_rep, *loss);
            Ok(montecarlo::estimate(cfg.trials, cfg.seed, Scratch::default, |rng, buf| {
                buf.events.clear();
                for (d, &count) in m.iter().enumerate() {
                    for _ in 0..count {
                        buf.events.push((rng.random::<f64>() * t, d as u32));
                    }
                }
                detect_loss(code, t_rep, loss, buf)
            }))
        }
        SimMode::ConstantPoisson { lambda, t_rep, loss } => {
            let counts = Poisson::new(lambda * t)
                .map_err(|e| Error::arg(format!("Poisson mean: {e}")))?;
            let (t_rep, loss) = (*t_rep, *loss);
            Ok(montecarlo::estimate(cfg.trials, cfg.seed, Scratch::default, |rng, buf| {
                buf.events.clear();
                for d in 0..code.n() as u32 {
                    let count = counts.sample(rng) as u64;
                    for _ in 0..count {
                        buf.events.push((rng.random::<f64>() * t, d));
                    }
                }
                detect_loss(code, t_rep, loss, buf)
            }))
        }
        SimMode::GeneralRuns { .. } => Err(Error::arg(
            "simulate_constant needs a constant-repair mode",
        )),
    }
}

#[derive(Debug, Default)]
struct Scratch {
    events: Vec<(f64, u32)>,
    chains: Vec<Vec<u64>>,
}

fn detect_loss(code: CodeParams, t_rep: f64, loss: LossDefinition, buf: &mut Scratch) -> bool {
    let need = code.loss_threshold() as u32;
    if buf.events.len() < need as usize {
        return false;
    }
    buf.events
        .sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    match loss {
        LossDefinition::Cluster => cluster_loss(&buf.events, t_rep, need),
        LossDefinition::Chain => chain_loss(&buf.events, t_rep, need, &mut buf.chains),
    }
}

/// Sorted events; loss when a stretch joined by gaps `< t_rep` has `need`
/// distinct disks.
pub(crate) fn cluster_loss(events: &[(f64, u32)], t_rep: f64, need: u32) -> bool {
    let mut mask = 0u64;
    let mut prev = f64::NEG_INFINITY;
    for &(x, d) in events {
        if x - prev >= t_rep {
            mask = 0;
        }
        mask |= 1 << d;
        if mask.count_ones() >= need {
            return true;
        }
        prev = x;
    }
    false
}

/// Sorted events; loss when some chain of instants on distinct disks with
/// successive gaps `< t_rep` reaches `need` disks. `chains[i]` holds the disk
/// sets of the chains ending at event `i`.
pub(crate) fn chain_loss(
    events: &[(f64, u32)],
    t_rep: f64,
    need: u32,
    chains: &mut Vec<Vec<u64>>,
) -> bool {
    chains.resize_with(events.len(), Vec::new);
    let mut window_start = 0;
    for (i, &(x, d)) in events.iter().enumerate() {
        let bit = 1u64 << d;
        while x - events[window_start].0 >= t_rep {
            window_start += 1;
        }
        let (earlier, rest) = chains.split_at_mut(i);
        let here = &mut rest[0];
        here.clear();
        here.push(bit);
        for prev in &earlier[window_start..i] {
            for &set in prev {
                if set & bit == 0 {
                    let grown = set | bit;
                    if grown.count_ones() >= need {
                        return true;
                    }
                    if !here.contains(&grown) {
                        here.push(grown);
                    }
                }
            }
        }
    }
    false
}

/// Scalar that a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Per-disk failure rate. In the general mode the failure law keeps its
    /// family and shape and gets mean `1 / (n lambda)`.
    Lambda,
    /// Repair time; in the general mode, the mean of the repair law.
    TRep,
    /// Horizon `t`.
    Horizon,
    /// Shape of a Weibull failure law at fixed mean (general mode).
    FailShape,
    /// Shape of a Weibull repair law at fixed mean (general mode).
    RepShape,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(SweepParam::Lambda),
            "trep" => Ok(SweepParam::TRep),
            "t" | "horizon" => Ok(SweepParam::Horizon),
            "kappa-fail" => Ok(SweepParam::FailShape),
            "kappa-rep" => Ok(SweepParam::RepShape),
            other => Err(Error::parse(
                other,
                "expected lambda, trep, t, kappa-fail or kappa-rep",
            )),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Lambda => "lambda",
            SweepParam::TRep => "trep",
            SweepParam::Horizon => "t",
            SweepParam::FailShape => "kappa-fail",
            SweepParam::RepShape => "kappa-rep",
        })
    }
}

fn reshape(d: &Distribution, shape: f64) -> Result<Distribution> {
    match d {
        Distribution::Constant { .. } => Err(Error::arg("a constant law has no shape")),
        _ => Distribution::weibull_with_mean(shape, d.mean()),
    }
}

/// `template` with `param` set to `value`.
pub fn apply_param(template: &SimConfig, param: SweepParam, value: f64) -> Result<SimConfig> {
    let mut cfg = template.clone();
    let n = cfg.code.n() as f64;
    match (&mut cfg.mode, param) {
        (_, SweepParam::Horizon) => cfg.t = value,
        (SimMode::GeneralRuns { fail, .. }, SweepParam::Lambda) => {
            if !(value > 0.0) {
                return Err(Error::arg("lambda must be positive"));
            }
            *fail = fail.with_mean(1.0 / (n * value))?;
        }
        (SimMode::GeneralRuns { rep, .. }, SweepParam::TRep) => *rep = rep.with_mean(value)?,
        (SimMode::GeneralRuns { fail, .. }, SweepParam::FailShape) => *fail = reshape(fail, value)?,
        (SimMode::GeneralRuns { rep, .. }, SweepParam::RepShape) => *rep = reshape(rep, value)?,
        (SimMode::ConstantPoisson { lambda, .. }, SweepParam::Lambda) => *lambda = value,
        (
            SimMode::ConstantPoisson { t_rep, .. } | SimMode::ConstantConditioned { t_rep, .. },
            SweepParam::TRep,
        ) => *t_rep = value,
        (_, p) => return Err(Error::arg(format!("parameter {p} does not apply to this mode"))),
    }
    Ok(cfg)
}

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub estimate: SimEstimate,
}

/// Simulates `template` at each grid value; point `i` uses seed `seed + i`.
pub fn sweep(template: &SimConfig, param: SweepParam, grid: &[f64]) -> Result<Vec<SweepPoint>> {
    if grid.is_empty() {
        return Err(Error::arg("sweep grid is empty"));
    }
    grid.iter()
        .enumerate()
        .map(|(i, &value)| {
            let mut cfg = apply_param(template, param, value)?;
            cfg.seed = template.seed.wrapping_add(i as u64);
            Ok(SweepPoint {
                value,
                estimate: simulate(&cfg)?,
            })
        })
        .collect()
}
