//! θ → 1⁻ sweeps, extrapolation and divergence flags.

use serde::{Deserialize, Serialize};

use super::{fixed_theta_seminorm, SeminormConfig, SeminormEstimate};
use crate::alexander_spanier::Multifunction;
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::numerics::complement;

pub const DEFAULT_THETAS: [f64; 5] = [0.9, 0.95, 0.975, 0.99, 0.995];

/// Points used by the extrapolation fit (the largest thetas).
pub const FIT_POINTS: usize = 3;

/// Largest-sample share of the total above which the last estimate is
/// considered dominated by a divergent tail.
pub const TAIL_THRESHOLD: f64 = 0.1;

/// Estimates below this are treated as numerically zero.
pub const NEGLIGIBLE_POWER: f64 = 1e-12;

/// Model for the `p`-th power as a function of `t = 1 - θ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extrapolation {
    /// `a + b sqrt(t)`.
    SqrtLinear,
    /// `a + b t`.
    Linear,
    /// Fit both and keep the one with the smaller largest residual.
    #[default]
    Auto,
}

impl Extrapolation {
    fn abscissa(self, theta: f64) -> f64 {
        match self {
            Extrapolation::SqrtLinear => complement(theta).sqrt(),
            _ => complement(theta),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Extrapolation::SqrtLinear => "sqrt-linear",
            Extrapolation::Linear => "linear",
            Extrapolation::Auto => "auto",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Limit {
    pub model: Extrapolation,
    /// Extrapolated `p`-th power.
    pub power: f64,
    pub power_stat_error: f64,
    /// Largest fit residual.
    pub power_sys_error: f64,
    /// Extrapolated seminorm, `power^{1/p}`.
    pub value: f64,
    pub value_stat_error: f64,
    pub value_sys_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub estimates: Vec<SeminormEstimate>,
    /// `None` when the sweep is flagged divergent.
    pub limit: Option<Limit>,
    pub divergent: bool,
    pub divergence_reason: Option<String>,
    /// Consecutive estimates never rise by more than three combined standard errors.
    pub non_increasing: bool,
    /// Consecutive estimates never fall by more than three combined standard errors.
    pub non_decreasing: bool,
}

/// Least-squares fit of `y = a + b x(θ)`; the intercept's statistical error
/// assumes fully correlated inputs, which bounds common-random-number runs.
pub fn fit_limit(
    thetas: &[f64],
    powers: &[f64],
    errors: &[f64],
    p: f64,
    model: Extrapolation,
) -> Result<Limit> {
    if model == Extrapolation::Auto {
        let a = fit_limit(thetas, powers, errors, p, Extrapolation::SqrtLinear)?;
        let b = fit_limit(thetas, powers, errors, p, Extrapolation::Linear)?;
        return Ok(if a.power_sys_error < b.power_sys_error {
            a
        } else {
            b
        });
    }
    let m = thetas.len();
    if m < 2 || powers.len() != m || errors.len() != m {
        return Err(Error::arg(
            "fit needs at least two (theta, value, error) triples",
        ));
    }
    let xs: Vec<f64> = thetas.iter().map(|&t| model.abscissa(t)).collect();
    let mx = xs.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::arg("fit needs distinct thetas"));
    }
    let coef: Vec<f64> = xs
        .iter()
        .map(|x| 1.0 / m as f64 - mx * (x - mx) / sxx)
        .collect();
    let a: f64 = coef.iter().zip(powers).map(|(c, y)| c * y).sum();
    let b: f64 = xs
        .iter()
        .zip(powers)
        .map(|(x, y)| (x - mx) * y)
        .sum::<f64>()
        / sxx;
    let stat: f64 = coef.iter().zip(errors).map(|(c, e)| c.abs() * e).sum();
    let sys = xs
        .iter()
        .zip(powers)
        .map(|(x, y)| (y - a - b * x).abs())
        .fold(0.0, f64::max);
    let value = a.max(0.0).powf(1.0 / p);
    let root_err = |e: f64| {
        if value > 0.0 {
            e / (p * value.powf(p - 1.0))
        } else {
            e.powf(1.0 / p)
        }
    };
    Ok(Limit {
        model,
        power: a,
        power_stat_error: stat,
        power_sys_error: sys,
        value,
        value_stat_error: root_err(stat),
        value_sys_error: root_err(sys),
    })
}

/// Estimate at each theta with one shared seed, then extrapolate or flag.
pub fn theta_sweep(
    f: &Multifunction,
    domain: &Domain,
    base: &SeminormConfig,
    thetas: &[f64],
    model: Extrapolation,
) -> Result<SweepResult> {
    if thetas.len() < FIT_POINTS {
        return Err(Error::arg(format!(
            "a sweep needs at least {FIT_POINTS} thetas, got {}",
            thetas.len()
        )));
    }
    if thetas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::arg("thetas must be strictly increasing"));
    }
    let estimates = thetas
        .iter()
        .map(|&theta| fixed_theta_seminorm(f, domain, &base.with_theta(theta)))
        .collect::<Result<Vec<_>>>()?;
    assemble(estimates, model)
}

pub(crate) fn assemble(
    estimates: Vec<SeminormEstimate>,
    model: Extrapolation,
) -> Result<SweepResult> {
    let ys: Vec<f64> = estimates.iter().map(|e| e.power).collect();
    let es: Vec<f64> = estimates.iter().map(|e| e.power_error).collect();
    let ts: Vec<f64> = estimates.iter().map(|e| e.config.theta).collect();
    let pairs = || ys.windows(2).zip(es.windows(2));
    // Differences below NEGLIGIBLE_POWER are rounding residue and count as ties.
    let slack = |e: &[f64]| 3.0 * (e[0] + e[1]) + NEGLIGIBLE_POWER;
    let non_increasing = pairs().all(|(y, e)| y[1] <= y[0] + slack(e));
    let non_decreasing = pairs().all(|(y, e)| y[1] >= y[0] - slack(e));

    let m = ys.len();
    let tail = &estimates[m - FIT_POINTS..];
    let mut reason = None;
    // Superlinear growth in 1/(1-θ) with separated error bars.
    let u: Vec<f64> = tail
        .iter()
        .map(|e| 1.0 / complement(e.config.theta))
        .collect();
    let y = &ys[m - FIT_POINTS..];
    let s = &es[m - FIT_POINTS..];
    let rising = (0..FIT_POINTS - 1).all(|i| y[i + 1] - 2.0 * s[i + 1] > y[i] + 2.0 * s[i]);
    let slope1 = (y[1] - y[0]) / (u[1] - u[0]);
    let slope2 = (y[2] - y[1]) / (u[2] - u[1]);
    if rising && slope2 > slope1 {
        reason = Some(format!(
            "estimates grow superlinearly in 1/(1-theta): slopes {slope1:.4e} then {slope2:.4e}"
        ));
    }
    let last = &estimates[m - 1];
    if reason.is_none() && last.power > NEGLIGIBLE_POWER && last.tail_fraction() > TAIL_THRESHOLD {
        reason = Some(format!(
            "one sample carries {:.1}% of the estimate at theta = {}",
            100.0 * last.tail_fraction(),
            last.config.theta
        ));
    }
    let divergent = reason.is_some();
    let limit = if divergent {
        None
    } else {
        let p = last.config.p;
        Some(fit_limit(&ts[m - FIT_POINTS..], y, s, p, model)?)
    };
    Ok(SweepResult {
        estimates,
        limit,
        divergent,
        divergence_reason: reason,
        non_increasing,
        non_decreasing,
    })
}
