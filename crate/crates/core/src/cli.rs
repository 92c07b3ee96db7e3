//! Command-line interface, shared by the `ecrel` binary and the tests.
//!
//! Floating-point values are printed as `{:.6e}`; exact probabilities as
//! `numerator/denominator` followed by a decimal. Exit codes: 0 on success,
//! 1 for usage and parse errors, 2 for domain and guard errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use crate::avoidance::{avoidance_loss_upper, multiplicative_gap, poisson_avoidance_upper};
use crate::code::CodeParams;
use crate::distributions::{compute_g, limiting_loss, Distribution, DEFAULT_G_TOL};
use crate::error::Error;
use crate::exact::{asymptotic_loss, chen_estimate, exact_loss, loss_polynomial, LossQuery};
use crate::rational::{parse_rational, recip, to_f64};
use crate::simulator::{simulate, LossDefinition, SimConfig, SimMode, SweepParam};
use crate::validation::VALIDATION_ROWS;

/// Formats a float the way every command prints it.
pub fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

#[derive(Debug, Parser)]
#[command(name = "ecrel", version, about = "Data-loss probability of (n,k) MDS erasure-coded storage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross probability G = P(Y < Z) of failure and repair durations.
    G {
        #[arg(long, value_parser = parse_dist)]
        fail: Distribution,
        #[arg(long, value_parser = parse_dist)]
        rep: Distribution,
        #[arg(long, default_value_t = DEFAULT_G_TOL)]
        tol: f64,
    },
    /// Exact conditional loss probability for a constant repair time.
    Exact {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u64>,
        /// rho = t / t_rep (exact: integer, fraction or decimal).
        #[arg(long, value_parser = parse_exact, conflicts_with = "tau", required_unless_present = "tau")]
        rho: Option<BigRational>,
        /// tau = t_rep / t.
        #[arg(long, value_parser = parse_exact)]
        tau: Option<BigRational>,
        /// Also print the numerator polynomial in rho.
        #[arg(long)]
        polynomial: bool,
    },
    /// Limit of P_m(D_t) rho^(n-k) as the repair time goes to zero.
    Asym {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u64>,
    },
    /// Limiting loss probability for general failure and repair laws.
    Limit {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        t: f64,
        /// System inter-failure law.
        #[arg(long, value_parser = parse_dist)]
        fail: Distribution,
        #[arg(long, value_parser = parse_dist)]
        rep: Distribution,
        #[arg(long, default_value_t = DEFAULT_G_TOL)]
        tol: f64,
    },
    /// Set-avoidance upper bounds on the loss probability.
    Bound {
        #[command(flatten)]
        code: CodeArgs,
        /// Failure counts (product bound); needs --rho.
        #[arg(long, value_delimiter = ',', requires = "rho", conflicts_with_all = ["lambda", "t", "trep"])]
        m: Option<Vec<u64>>,
        #[arg(long, value_parser = parse_exact)]
        rho: Option<BigRational>,
        /// Per-disk Poisson failure rate (Poisson bound); needs --t and --trep.
        #[arg(long, requires_all = ["t", "trep"], required_unless_present = "m")]
        lambda: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        trep: Option<f64>,
    },
    /// Markov-chain MTTDL and the matching first-order loss probability.
    Chen {
        #[command(flatten)]
        code: CodeArgs,
        /// Per-disk failure rate.
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        trep: f64,
        #[arg(long)]
        t: f64,
    },
    /// Limiting formula and simulation for the Weibull reference configurations, as CSV.
    Table1 {
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// 1-based row numbers to run (default: all).
        #[arg(long, value_delimiter = ',')]
        rows: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_G_TOL)]
        tol: f64,
    },
    /// Sweep one parameter and write `param,method,value,stderr` CSV.
    Sweep(SweepArgs),
    /// Monte Carlo estimate of the loss probability.
    Sim(SimArgs),
}

#[derive(Debug, Args)]
struct CodeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
}

impl CodeArgs {
    fn code(&self) -> Result<CodeParams, Error> {
        CodeParams::new(self.n, self.k)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LossArg {
    Cluster,
    Chain,
}

impl From<LossArg> for LossDefinition {
    fn from(l: LossArg) -> Self {
        match l {
            LossArg::Cluster => LossDefinition::Cluster,
            LossArg::Chain => LossDefinition::Chain,
        }
    }
}

#[derive(Debug, Args)]
struct SimArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// System inter-failure law (general mode).
    #[arg(long, value_parser = parse_dist, requires = "rep", conflicts_with = "trep")]
    fail: Option<Distribution>,
    #[arg(long, value_parser = parse_dist)]
    rep: Option<Distribution>,
    /// Constant repair time (constant mode); needs --m or --lambda.
    #[arg(long, required_unless_present = "fail")]
    trep: Option<f64>,
    #[arg(long, value_delimiter = ',', conflicts_with = "lambda")]
    m: Option<Vec<u64>>,
    /// Per-disk Poisson failure rate.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value = "cluster")]
    loss: LossArg,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_param)]
    param: SweepParam,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    steps: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// System inter-failure law.
    #[arg(long, value_parser = parse_dist)]
    fail: Distribution,
    #[arg(long, value_parser = parse_dist)]
    rep: Distribution,
    /// Simulation trials per point; 0 skips simulation.
    #[arg(long, default_value_t = 0)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_G_TOL)]
    tol: f64,
}

fn parse_dist(s: &str) -> Result<Distribution, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_exact(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_param(s: &str) -> Result<SweepParam, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (including the program name) and runs the command, writing
/// data to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Parse { .. } => 1,
                _ => 2,
            }
        }
    }
}

enum Failure {
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::G { fail, rep, tol } => {
            let g = compute_g(&fail, &rep, tol)?;
            writeln!(out, "g: {}", sci(g.g))?;
            writeln!(out, "method: {}", g.method)?;
            writeln!(out, "abs_error: {}", sci(g.abs_error))?;
        }
        Command::Exact {
            code,
            m,
            rho,
            tau,
            polynomial,
        } => {
            let code = code.code()?;
            let rho = match (rho, tau) {
                (Some(r), _) => r,
                (None, Some(t)) => recip(&t)?,
                (None, None) => unreachable!("clap requires one of --rho/--tau"),
            };
            let query = LossQuery::with_rho(code, m.clone(), rho)?;
            let p = exact_loss(&query)?;
            writeln!(out, "method: exact")?;
            writeln!(out, "p: {p}")?;
            writeln!(out, "decimal: {}", sci(to_f64(&p)))?;
            if polynomial {
                let lp = loss_polynomial(code, &m)?;
                writeln!(out, "numerator: {}", lp.numerator)?;
                writeln!(out, "patterns: {}", lp.patterns)?;
            }
        }
        Command::Asym { code, m } => {
            let c = asymptotic_loss(code.code()?, &m)?;
            writeln!(out, "method: asymptotic")?;
            writeln!(out, "coefficient: {c}")?;
        }
        Command::Limit {
            code,
            t,
            fail,
            rep,
            tol,
        } => {
            let l = limiting_loss(code.code()?, &fail, &rep, t, tol)?;
            writeln!(out, "method: limit")?;
            writeln!(out, "p_loss: {}", sci(l.p_loss))?;
            writeln!(out, "g: {}", sci(l.g.g))?;
            writeln!(out, "g_method: {}", l.g.method)?;
        }
        Command::Bound {
            code,
            m,
            rho,
            lambda,
            t,
            trep,
        } => {
            let code = code.code()?;
            writeln!(out, "method: bound")?;
            match (m, rho, lambda, t, trep) {
                (Some(m), Some(rho), ..) => {
                    let upper = avoidance_loss_upper(code, &m, &rho)?;
                    writeln!(out, "upper: {}", sci(upper))?;
                }
                (_, _, Some(lambda), Some(t), Some(trep)) => {
                    let upper = poisson_avoidance_upper(code, lambda, t, trep)?;
                    writeln!(out, "upper: {}", sci(upper))?;
                    writeln!(out, "gap: {}", sci(multiplicative_gap(code, lambda * t)?))?;
                }
                _ => return Err(Error::arg("give --m with --rho, or --lambda, --t and --trep").into()),
            }
        }
        Command::Chen {
            code,
            lambda,
            trep,
            t,
        } => {
            let c = chen_estimate(code.code()?, lambda, trep, t)?;
            writeln!(out, "method: chen")?;
            writeln!(out, "mttdl: {}", sci(c.mttdl))?;
            writeln!(out, "p_first_order: {}", sci(c.p_first_order))?;
            writeln!(out, "p_exponential: {}", sci(c.p_exponential))?;
        }
        Command::Table1 {
            trials,
            seed,
            rows,
            out: path,
            tol,
        } => {
            let sink = open_sink(path, out)?;
            table1(trials, seed, rows, tol, sink)?;
        }
        Command::Sweep(args) => {
            let sink = open_sink(args.out.clone(), out)?;
            sweep_csv(&args, sink)?;
        }
        Command::Sim(args) => {
            let cfg = sim_config(&args)?;
            let e = simulate(&cfg)?;
            writeln!(out, "method: sim")?;
            writeln!(out, "p_hat: {}", sci(e.p_hat))?;
            writeln!(out, "std_error: {}", sci(e.std_error))?;
            writeln!(out, "losses: {}", e.losses)?;
            writeln!(out, "trials: {}", e.trials)?;
            writeln!(out, "seed: {}", e.seed)?;
        }
    }
    Ok(())
}

fn open_sink<'a>(path: Option<PathBuf>, out: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, Failure> {
    Ok(match path {
        Some(p) => Box::new(File::create(&p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?),
        None => Box::new(out),
    })
}

fn table1(
    trials: u64,
    seed: u64,
    rows: Option<Vec<usize>>,
    tol: f64,
    sink: Box<dyn Write + '_>,
) -> Result<(), Failure> {
    let selected: Vec<usize> = rows.unwrap_or_else(|| (1..=VALIDATION_ROWS.len()).collect());
    if let Some(bad) = selected.iter().find(|&&r| r == 0 || r > VALIDATION_ROWS.len()) {
        return Err(Error::arg(format!("row {bad} outside 1..={}", VALIDATION_ROWS.len())).into());
    }
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "row",
        "n",
        "k",
        "t",
        "kappa_fail",
        "kappa_rep",
        "mean_fail",
        "mean_rep",
        "g",
        "limit",
        "sim",
        "sim_stderr",
        "trials",
        "seed",
    ])?;
    for r in selected {
        let row = VALIDATION_ROWS[r - 1];
        let limit = row.limiting_loss(tol)?;
        let cfg = SimConfig {
            code: row.code(),
            t: row.t,
            trials,
            seed: seed.wrapping_add(r as u64),
            mode: SimMode::GeneralRuns {
                fail: row.fail(),
                rep: row.rep(),
            },
        };
        let e = simulate(&cfg)?;
        w.write_record([
            r.to_string(),
            row.n.to_string(),
            row.k.to_string(),
            sci(row.t),
            sci(row.fail_shape),
            sci(row.rep_shape),
            sci(row.fail_mean),
            sci(row.rep_mean),
            sci(limit.g.g),
            sci(limit.p_loss),
            sci(e.p_hat),
            sci(e.std_error),
            e.trials.to_string(),
            e.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn grid(from: f64, to: f64, steps: u64) -> Vec<f64> {
    if steps == 1 {
        return vec![from];
    }
    (0..steps)
        .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
        .collect()
}

fn sweep_csv(args: &SweepArgs, sink: Box<dyn Write + '_>) -> Result<(), Failure> {
    let code = args.code.code()?;
    let template = SimConfig {
        code,
        t: args.t,
        trials: args.trials.max(1),
        seed: args.seed,
        mode: SimMode::GeneralRuns {
            fail: args.fail,
            rep: args.rep,
        },
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["param", "method", "value", "stderr"])?;
    for (i, x) in grid(args.from, args.to, args.steps).into_iter().enumerate() {
        let mut cfg = crate::simulator::apply_param(&template, args.param, x)?;
        cfg.seed = args.seed.wrapping_add(i as u64);
        let SimMode::GeneralRuns { fail, rep } = cfg.mode else {
            unreachable!("template is general")
        };
        let limit = limiting_loss(code, &fail, &rep, cfg.t, args.tol)?;
        w.write_record([sci(x), "g".into(), sci(limit.g.g), String::new()])?;
        w.write_record([sci(x), "limit".into(), sci(limit.p_loss), String::new()])?;
        if let (Distribution::Exponential { rate }, Distribution::Constant { value }) = (fail, rep) {
            if value > 0.0 {
                let lambda = rate / code.n() as f64;
                let c = chen_estimate(code, lambda, value, cfg.t)?;
                w.write_record([sci(x), "chen".into(), sci(c.p_first_order), String::new()])?;
            }
        }
        if args.trials > 0 {
            let e = simulate(&cfg)?;
            w.write_record([sci(x), "sim".into(), sci(e.p_hat), sci(e.std_error)])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn sim_config(args: &SimArgs) -> Result<SimConfig, Error> {
    let code = args.code.code()?;
    let mode = match (&args.fail, &args.rep, args.trep) {
        (Some(fail), Some(rep), _) => SimMode::GeneralRuns {
            fail: *fail,
            rep: *rep,
        },
        (None, _, Some(t_rep)) => match (&args.m, args.lambda) {
            (Some(m), _) => SimMode::ConstantConditioned {
                m: m.clone(),
                t_rep,
                loss: args.loss.into(),
            },
            (None, Some(lambda)) => SimMode::ConstantPoisson {
                lambda,
                t_rep,
                loss: args.loss.into(),
            },
            (None, None) => return Err(Error::arg("constant mode needs --m or --lambda")),
        },
        _ => return Err(Error::arg("give --fail and --rep, or --trep with --m or --lambda")),
    };
    Ok(SimConfig {
        code,
        t: args.t,
        trials: args.trials,
        seed: args.seed,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("ecrel").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn g_command() {
        let (code, out, _) = call(&["g", "--fail", "exp:rate=1", "--rep", "exp:rate=1"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("g: 5.000000e-1\n"), "{out}");
    }

    #[test]
    fn usage_and_domain_exit_codes() {
        assert_eq!(call(&["g", "--fail", "exp:rate=x", "--rep", "exp:rate=1"]).0, 1);
        assert_eq!(call(&["nonsense"]).0, 1);
        assert_eq!(call(&["--help"]).0, 0);
        let (code, _, err) = call(&["exact", "--n", "4", "--k", "2", "--m", "2,2,1,1", "--rho", "3"]);
        assert_eq!(code, 2);
        assert!(err.contains("validity"), "{err}");
        assert_eq!(call(&["asym", "--n", "2", "--k", "3", "--m", "1,1"]).0, 2);
    }

    #[test]
    fn grid_points() {
        assert_eq!(grid(1.0, 2.0, 1), vec![1.0]);
        assert_eq!(grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
