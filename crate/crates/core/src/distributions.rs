//! Failure and repair duration laws, the cross probability `G = P(Y < Z)`
//! and the limiting loss formula for general laws.
//!
//! `Y` is the time between successive failures of the whole system and `Z`
//! the duration of a repair. When repairs are short compared with failures,
//! `G` is small and
//!
//! `P(D_t) ≈ t (n-1)!/(k-1)! / E[Y] * (G/n)^{n-k}`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::code::CodeParams;
use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::rational::int_to_f64;

/// Default absolute tolerance for [`compute_g`].
pub const DEFAULT_G_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    /// Point mass at `value`.
    Constant { value: f64 },
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidDistribution(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

impl Distribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Distribution::Exponential {
            rate: positive("rate", rate)?,
        })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Ok(Distribution::Weibull {
            shape: positive("shape", shape)?,
            scale: positive("scale", scale)?,
        })
    }

    /// Weibull law with the given shape and mean, `scale = mean / Γ(1 + 1/shape)`.
    pub fn weibull_with_mean(shape: f64, mean: f64) -> Result<Self> {
        let shape = positive("shape", shape)?;
        let mean = positive("mean", mean)?;
        Self::weibull(shape, mean / libm::tgamma(1.0 + 1.0 / shape))
    }

    /// Point mass at `value >= 0`.
    pub fn constant(value: f64) -> Result<Self> {
        if value >= 0.0 && value.is_finite() {
            Ok(Distribution::Constant { value })
        } else {
            Err(Error::InvalidDistribution(format!(
                "constant value must be nonnegative and finite, got {value}"
            )))
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, Distribution::Constant { .. })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Exponential { rate } => 1.0 / rate,
            Distribution::Weibull { shape, scale } => scale * libm::tgamma(1.0 + 1.0 / shape),
            Distribution::Constant { value } => value,
        }
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Distribution::Constant { value } => f64::from(x >= value),
            _ if x <= 0.0 => 0.0,
            _ => -(-self.cumulative_hazard(x)).exp_m1(),
        }
    }

    /// `P(X > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        match *self {
            Distribution::Constant { value } => f64::from(x < value),
            _ if x <= 0.0 => 1.0,
            _ => (-self.cumulative_hazard(x)).exp(),
        }
    }

    /// Density; zero everywhere for a point mass.
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            Distribution::Exponential { rate } => rate * (-rate * x).exp(),
            Distribution::Weibull { shape, scale } => {
                if x == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0 / scale,
                        _ => 0.0,
                    };
                }
                let z = x / scale;
                shape / scale * z.powf(shape - 1.0) * (-z.powf(shape)).exp()
            }
            Distribution::Constant { .. } => 0.0,
        }
    }

    /// `-ln P(X > x)` for the continuous laws.
    fn cumulative_hazard(&self, x: f64) -> f64 {
        match *self {
            Distribution::Exponential { rate } => rate * x,
            Distribution::Weibull { shape, scale } => (x / scale).powf(shape),
            Distribution::Constant { .. } => unreachable!("point mass has no hazard"),
        }
    }

    /// Inverse CDF for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Distribution::Exponential { rate } => -(-u).ln_1p() / rate,
            Distribution::Weibull { shape, scale } => scale * (-(-u).ln_1p()).powf(1.0 / shape),
            Distribution::Constant { value } => value,
        }
    }

    /// Draws one value by inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Distribution::Constant { value } => value,
            _ => self.quantile(rng.random::<f64>()),
        }
    }

    /// The same law with every duration multiplied by `c > 0`.
    pub fn rescaled(&self, c: f64) -> Self {
        match *self {
            Distribution::Exponential { rate } => Distribution::Exponential { rate: rate / c },
            Distribution::Weibull { shape, scale } => Distribution::Weibull {
                shape,
                scale: scale * c,
            },
            Distribution::Constant { value } => Distribution::Constant { value: value * c },
        }
    }

    /// The law with the same family and shape but the given mean.
    pub fn with_mean(&self, mean: f64) -> Result<Self> {
        match *self {
            Distribution::Exponential { .. } => Self::exponential(1.0 / positive("mean", mean)?),
            Distribution::Weibull { shape, .. } => Self::weibull_with_mean(shape, mean),
            Distribution::Constant { .. } => Self::constant(mean),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Exponential { rate } => write!(f, "exp:rate={rate}"),
            Distribution::Weibull { shape, scale } => {
                write!(f, "weibull:shape={shape},scale={scale}")
            }
            Distribution::Constant { value } => write!(f, "const:value={value}"),
        }
    }
}

/// Parses `exp:rate=<r>`, `weibull:shape=<k>,mean=<m>`,
/// `weibull:shape=<k>,scale=<a>` or `const:value=<c>`.
impl FromStr for Distribution {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |reason: &str| Error::parse(text, reason);
        let (kind, rest) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| bad("expected <kind>:<key>=<value>,..."))?;
        let mut params: Vec<(&str, f64)> = Vec::new();
        for item in rest.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| bad("parameters are written key=value"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| bad(&format!("'{}' is not a number", value.trim())))?;
            let key = key.trim();
            if params.iter().any(|(k, _)| *k == key) {
                return Err(bad(&format!("parameter '{key}' given twice")));
            }
            params.push((key, value));
        }
        let get = |key: &str| params.iter().find(|(k, _)| *k == key).map(|&(_, v)| v);
        let allow = |keys: &[&str]| -> Result<()> {
            match params.iter().find(|(k, _)| !keys.contains(k)) {
                Some((k, _)) => Err(bad(&format!("unknown parameter '{k}' for {kind}"))),
                None => Ok(()),
            }
        };
        let need = |key: &str| get(key).ok_or_else(|| bad(&format!("missing parameter '{key}'")));
        let dist = match kind.trim() {
            "exp" => {
                allow(&["rate"])?;
                Distribution::exponential(need("rate")?)
            }
            "weibull" => {
                allow(&["shape", "mean", "scale"])?;
                let shape = need("shape")?;
                match (get("mean"), get("scale")) {
                    (Some(mean), None) => Distribution::weibull_with_mean(shape, mean),
                    (None, Some(scale)) => Distribution::weibull(shape, scale),
                    _ => return Err(bad("weibull needs exactly one of mean= or scale=")),
                }
            }
            "const" => {
                allow(&["value"])?;
                Distribution::constant(need("value")?)
            }
            other => return Err(bad(&format!("unknown distribution kind '{other}'"))),
        };
        dist.map_err(|e| bad(&e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GMethod {
    Analytic,
    Quadrature,
}

impl fmt::Display for GMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GMethod::Analytic => "analytic",
            GMethod::Quadrature => "quadrature",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GResult {
    pub g: f64,
    pub method: GMethod,
    pub abs_error: f64,
}

fn analytic(g: f64) -> GResult {
    GResult {
        g,
        method: GMethod::Analytic,
        abs_error: 0.0,
    }
}

/// `G = P(Y < Z)` for independent failure duration `Y` and repair duration `Z`.
///
/// Closed forms cover point masses, two exponentials, two Weibull laws with a
/// common shape and identical continuous laws. Otherwise the integral
/// `∫_0^1 F_Y(Q_Z(w)) dw` (the `Z` quantile substitution of `∫ F_Y f_Z`) is
/// evaluated on the unit interval, which needs no tail truncation.
pub fn compute_g(fail: &Distribution, rep: &Distribution, tol: f64) -> Result<GResult> {
    use Distribution::*;
    if !(tol > 0.0) {
        return Err(Error::arg("tolerance must be positive"));
    }
    match (*fail, *rep) {
        (Constant { value: y }, Constant { value: z }) => Ok(analytic(f64::from(y < z))),
        (_, Constant { value }) => Ok(analytic(fail.cdf(value))),
        (Constant { value }, _) => Ok(analytic(rep.survival(value))),
        (Exponential { rate: l }, Exponential { rate: m }) => Ok(analytic(l / (l + m))),
        _ if fail == rep => Ok(analytic(0.5)),
        (Weibull { shape: a, scale: sy }, Weibull { shape: b, scale: sz })
            if a == b =>
        {
            let hy = sy.powf(-a);
            let hz = sz.powf(-a);
            Ok(analytic(hy / (hy + hz)))
        }
        _ => g_by_quadrature(fail, rep, tol),
    }
}

/// Evaluates `G` by quadrature even when a closed form exists.
pub fn g_by_quadrature(fail: &Distribution, rep: &Distribution, tol: f64) -> Result<GResult> {
    if !rep.is_continuous() {
        return Err(Error::arg("quadrature needs a continuous repair law"));
    }
    let r = integrate(|w| fail.cdf(rep.quantile(w)), 0.0, 1.0, tol)?;
    Ok(GResult {
        g: r.value.clamp(0.0, 1.0),
        method: GMethod::Quadrature,
        abs_error: r.abs_error,
    })
}

/// Limiting loss probability and the `G` it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitingLoss {
    pub p_loss: f64,
    pub g: GResult,
}

/// `t (n-1)!/(k-1)! / E[Y] * (G/n)^{n-k}` with `G` given.
pub fn limiting_loss_from_g(code: CodeParams, mean_fail: f64, g: f64, t: f64) -> Result<f64> {
    if !(mean_fail > 0.0) || !mean_fail.is_finite() {
        return Err(Error::InvalidDistribution("failure law needs a finite positive mean".into()));
    }
    if !(t >= 0.0) || !(0.0..=1.0).contains(&g) {
        return Err(Error::arg("need t >= 0 and G in [0, 1]"));
    }
    let n = code.n() as u64;
    let ratio = int_to_f64(&(factorial(n - 1) / factorial(code.k() as u64 - 1)));
    Ok(t * ratio / mean_fail * (g / n as f64).powi(code.redundancy() as i32))
}

/// Limiting loss for failure law `fail` (system inter-failure time) and repair
/// law `rep` over `[0, t]`.
pub fn limiting_loss(
    code: CodeParams,
    fail: &Distribution,
    rep: &Distribution,
    t: f64,
    tol: f64,
) -> Result<LimitingLoss> {
    let g = compute_g(fail, rep, tol)?;
    Ok(LimitingLoss {
        p_loss: limiting_loss_from_g(code, fail.mean(), g.g, t)?,
        g,
    })
}

/// Limiting loss with `G` replaced by `F_Y(rep_mean)`.
///
/// For a failure law with concave CDF (exponential, Weibull with shape <= 1)
/// Jensen's inequality gives `G = E[F_Y(Z)] <= F_Y(E[Z])`, so this is the largest
/// limiting loss over repair laws with mean `rep_mean`, attained by a constant
/// repair time. The concavity is the caller's responsibility.
pub fn worst_case_constant_repair(
    code: CodeParams,
    fail: &Distribution,
    rep_mean: f64,
    t: f64,
) -> Result<f64> {
    limiting_loss_from_g(code, fail.mean(), fail.cdf(rep_mean), t)
}

/// System failure rate `n lambda` of `n` disks failing independently at rate
/// `lambda`.
pub fn system_rate(n: usize, per_disk_lambda: f64) -> Result<f64> {
    positive("lambda", per_disk_lambda).map(|l| n as f64 * l)
}

/// System inter-failure law for `n` independent exponential disks. Only
/// exponential laws superpose into a renewal law of the same family.
pub fn system_failure_law(n: usize, per_disk: &Distribution) -> Result<Distribution> {
    match *per_disk {
        Distribution::Exponential { rate } => Distribution::exponential(system_rate(n, rate)?),
        other => Err(Error::InvalidDistribution(format!(
            "rate conversion is defined for exponential laws only, got {other}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn code(n: usize, k: usize) -> CodeParams {
        CodeParams::new(n, k).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn basic_laws() {
        let e = Distribution::exponential(4.0).unwrap();
        assert_eq!(e.mean(), 0.25);
        let c = Distribution::constant(2.0).unwrap();
        assert_eq!((c.cdf(1.999), c.cdf(2.0), c.mean()), (0.0, 1.0, 2.0));
        let w = Distribution::weibull(1.0, 0.25).unwrap();
        for x in [0.0, 0.01, 0.3, 2.0] {
            assert!((w.cdf(x) - e.cdf(x)).abs() < 1e-15);
            assert!((w.pdf(x) - e.pdf(x)).abs() < 1e-13);
        }
        assert!((w.mean() - 0.25).abs() < 1e-15);
        assert!(Distribution::exponential(0.0).is_err());
        assert!(Distribution::weibull(-1.0, 1.0).is_err());
        assert!(Distribution::constant(-1.0).is_err());
    }

    #[test]
    fn weibull_mean_round_trip() {
        for shape in [0.5, 0.75, 1.25, 2.0, 3.7] {
            for mean in [1e-6, 0.001, 0.1, 7.0] {
                let w = Distribution::weibull_with_mean(shape, mean).unwrap();
                assert!(close(w.mean(), mean, 1e-12), "{shape} {mean}");
            }
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let w = Distribution::weibull_with_mean(0.75, 0.01).unwrap();
        for u in [1e-9, 0.1, 0.5, 0.999] {
            assert!(close(w.cdf(w.quantile(u)), u, 1e-12));
        }
    }

    #[test]
    fn parse_grammar() {
        let d: Distribution = "exp:rate=10".parse().unwrap();
        assert_eq!(d, Distribution::exponential(10.0).unwrap());
        let w: Distribution = "weibull:shape=1.5,mean=0.1".parse().unwrap();
        assert!(close(w.mean(), 0.1, 1e-14));
        let s: Distribution = "weibull:shape=2,scale=3".parse().unwrap();
        assert_eq!(s, Distribution::weibull(2.0, 3.0).unwrap());
        let c: Distribution = "const:value=0.001".parse().unwrap();
        assert_eq!(c.mean(), 0.001);
        for bad in [
            "exp",
            "exp:rate=abc",
            "exp:scale=1",
            "gamma:shape=1",
            "weibull:shape=1,mean=1,scale=1",
            "weibull:mean=1",
            "exp:rate=-1",
        ] {
            assert!(matches!(bad.parse::<Distribution>(), Err(Error::Parse { .. })), "{bad}");
        }
        assert_eq!(s.to_string().parse::<Distribution>().unwrap(), s);
    }

    #[test]
    fn analytic_g_cases() {
        let e1 = Distribution::exponential(1.0).unwrap();
        assert_eq!(compute_g(&e1, &e1, DEFAULT_G_TOL).unwrap().g, 0.5);
        let e10 = Distribution::exponential(10.0).unwrap();
        let c = Distribution::constant(0.001).unwrap();
        let g = compute_g(&e10, &c, DEFAULT_G_TOL).unwrap();
        assert_eq!(g.method, GMethod::Analytic);
        assert!(close(g.g, 9.950166250831946e-3, 1e-14));
        let e3 = Distribution::exponential(3.0).unwrap();
        assert_eq!(compute_g(&e1, &e3, DEFAULT_G_TOL).unwrap().g, 0.25);
        let zero = Distribution::constant(0.0).unwrap();
        assert_eq!(compute_g(&e1, &zero, DEFAULT_G_TOL).unwrap().g, 0.0);
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let laws = [
            Distribution::exponential(2.0).unwrap(),
            Distribution::exponential(50.0).unwrap(),
            Distribution::weibull(1.5, 0.3).unwrap(),
            Distribution::weibull(1.5, 0.01).unwrap(),
            Distribution::weibull(0.6, 1.0).unwrap(),
        ];
        for y in &laws {
            for z in &laws {
                let exact = compute_g(y, z, DEFAULT_G_TOL).unwrap();
                if exact.method != GMethod::Analytic {
                    continue;
                }
                let quad = g_by_quadrature(y, z, DEFAULT_G_TOL).unwrap();
                assert!((quad.g - exact.g).abs() <= 2.0 * DEFAULT_G_TOL, "{y} {z}");
            }
        }
    }

    #[test]
    fn g_is_scale_invariant() {
        let y = Distribution::weibull_with_mean(0.75, 0.1).unwrap();
        let z = Distribution::weibull_with_mean(2.0, 0.001).unwrap();
        let base = compute_g(&y, &z, DEFAULT_G_TOL).unwrap().g;
        for c in [1e-3, 0.5, 40.0] {
            let g = compute_g(&y.rescaled(c), &z.rescaled(c), DEFAULT_G_TOL).unwrap().g;
            assert!((g - base).abs() < 2.0 * DEFAULT_G_TOL);
        }
    }

    #[test]
    fn first_validation_row() {
        let y = Distribution::weibull_with_mean(1.5, 0.1).unwrap();
        let z = Distribution::weibull_with_mean(2.0, 0.001).unwrap();
        let r = limiting_loss(code(4, 2), &y, &z, 1.0, DEFAULT_G_TOL).unwrap();
        assert_eq!(r.g.method, GMethod::Quadrature);
        assert!(close(r.g.g, 9.44175405e-4, 1e-7), "{}", r.g.g);
        assert!(close(r.p_loss, 3.343002e-6, 1e-6), "{}", r.p_loss);
    }

    #[test]
    fn worst_case_dominates() {
        let c = code(4, 2);
        let y = Distribution::weibull_with_mean(0.5, 0.1).unwrap();
        let mean = 0.002;
        let worst = worst_case_constant_repair(c, &y, mean, 1.0).unwrap();
        for shape in [0.5, 0.8, 1.0, 1.5, 3.0] {
            let z = Distribution::weibull_with_mean(shape, mean).unwrap();
            let l = limiting_loss(c, &y, &z, 1.0, DEFAULT_G_TOL).unwrap();
            assert!(l.p_loss <= worst * (1.0 + 1e-9), "shape {shape}");
        }
        let e = Distribution::exponential(2.0).unwrap();
        let via_g = limiting_loss_from_g(c, 0.5, -(-2.0f64 * 0.01).exp_m1(), 1.0).unwrap();
        assert!(close(worst_case_constant_repair(c, &e, 0.01, 1.0).unwrap(), via_g, 1e-15));
        assert_eq!(worst_case_constant_repair(c, &e, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn rate_conversion() {
        assert_eq!(system_rate(4, 0.25).unwrap(), 1.0);
        assert_eq!(system_rate(1, 0.3).unwrap(), 0.3);
        let law = system_failure_law(8, &Distribution::exponential(0.5).unwrap()).unwrap();
        assert_eq!(law, Distribution::exponential(4.0).unwrap());
        assert!(system_failure_law(8, &Distribution::weibull(1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let w = Distribution::weibull_with_mean(0.75, 2.0).unwrap();
        let draw = |seed| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..5).map(|_| w.sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let n = 200_000;
        let mean = (0..n).map(|_| w.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!(close(mean, 2.0, 0.03));
    }
}
