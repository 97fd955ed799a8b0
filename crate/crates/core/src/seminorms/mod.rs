//! Importance-sampled estimators for fixed-θ seminorms of multifunctions.
//!
//! For `F` of degree `k` the estimated quantity is the `p`-th root of
//!
//! ```text
//! ∫_{E} (1-θ)^k |F(x_0, …, x_k)|^p / Π_i |x_i - x_0|^{n+θp} dx_0 … dx_k
//! ```
//!
//! over the tuple set `E ⊂ Ω^{k+1}` of the chosen [`Variant`]. Each sample
//! draws `x_0` uniformly in `Ω` and `x_i = x_0 + r_i v_i` with `v_i` uniform
//! on the sphere and `r_i = R U^{1/(p(1-θ))}` on `(0, R)`, `R = diam Ω`. The
//! radial density cancels the kernel exactly and leaves the weight
//!
//! ```text
//! |Ω| (|S^{n-1}| R^{p(1-θ)} / p)^k |F|^p / Π_i r_i^p.
//! ```
//!
//! All variants share this proposal, so for one seed they see the same
//! samples and differ only by indicators.

mod sweep;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::alexander_spanier::{EvalContext, Multifunction, MAX_ARITY};
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::forms::{lp_norm, FormField, LpConfig};
use crate::montecarlo::{self, open_unit, unit_vector, RunningStats};
use crate::numerics::{complement, factorial, sphere_area};

pub use sweep::{fit_limit, theta_sweep, Extrapolation, Limit, SweepResult, DEFAULT_THETAS};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_SAMPLES: u64 = 1 << 18;
/// Radii below `resolution * R` are evaluated at that radius.
pub const DEFAULT_RESOLUTION: f64 = 1e-7;
/// Minimum fraction of samples that must pass the variant's indicators.
pub const MIN_ACCEPTANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Variant {
    Full,
    /// Every `|x_i - x_0| < r`.
    Ball {
        r: f64,
    },
    /// Every `|x_i - x_0| < c dist(x_0, ∂Ω)`.
    Cone {
        c: f64,
    },
    BallCone {
        r: f64,
        c: f64,
    },
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Ball { .. } => "ball",
            Variant::Cone { .. } => "cone",
            Variant::BallCone { .. } => "ball-cone",
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            Variant::Ball { r } | Variant::BallCone { r, .. } => Some(r),
            _ => None,
        }
    }

    pub fn cone(&self) -> Option<f64> {
        match *self {
            Variant::Cone { c } | Variant::BallCone { c, .. } => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormConfig {
    pub p: f64,
    /// Degree of the multifunction (arity minus one).
    pub k: usize,
    pub variant: Variant,
    pub theta: f64,
    pub samples: u64,
    pub seed: u64,
    pub shards: u32,
    pub resolution: f64,
}

impl SeminormConfig {
    pub fn new(p: f64, k: usize, theta: f64) -> Self {
        SeminormConfig {
            p,
            k,
            variant: Variant::Full,
            theta,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            shards: montecarlo::DEFAULT_SHARDS,
            resolution: DEFAULT_RESOLUTION,
        }
    }

    pub fn with_variant(self, variant: Variant) -> Self {
        SeminormConfig { variant, ..self }
    }

    pub fn with_samples(self, samples: u64) -> Self {
        SeminormConfig { samples, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SeminormConfig { seed, ..self }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        SeminormConfig { theta, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::config(format!("p must be >= 1, got {}", self.p)));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::config(format!(
                "theta must lie in (0, 1), got {}",
                self.theta
            )));
        }
        if self.samples == 0 {
            return Err(Error::config("samples must be >= 1"));
        }
        if self.shards == 0 {
            return Err(Error::config("shards must be >= 1"));
        }
        if !(self.resolution > 0.0 && self.resolution < 1.0) {
            return Err(Error::config(format!(
                "resolution must lie in (0, 1), got {}",
                self.resolution
            )));
        }
        if let Some(r) = self.variant.radius() {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::config(format!("ball radius must be > 0, got {r}")));
            }
        }
        if let Some(c) = self.variant.cone() {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::config(format!(
                    "cone parameter must be > 0, got {c}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormEstimate {
    /// The seminorm, i.e. `power^{1/p}`.
    pub value: f64,
    pub std_error: f64,
    /// The estimated integral.
    pub power: f64,
    pub power_error: f64,
    pub samples: u64,
    /// Samples whose tuple passed every indicator.
    pub accepted: u64,
    pub acceptance_ratio: f64,
    /// Largest single weighted contribution.
    pub max_contribution: f64,
    /// Radius of the radial proposal (the domain diameter).
    pub proposal_radius: f64,
    pub config: SeminormConfig,
}

impl SeminormEstimate {
    /// Share of the total carried by the largest contribution.
    pub fn tail_fraction(&self) -> f64 {
        let total = self.power * self.samples as f64;
        if total > 0.0 {
            self.max_contribution / total
        } else {
            0.0
        }
    }

    fn from_stats(
        stats: &RunningStats,
        accepted: u64,
        proposal_radius: f64,
        cfg: &SeminormConfig,
    ) -> Self {
        let est = montecarlo::Estimate {
            value: stats.mean,
            error: stats.std_error(),
            evaluations: stats.count,
        }
        .pth_root(cfg.p);
        SeminormEstimate {
            value: est.value,
            std_error: est.error,
            power: stats.mean,
            power_error: stats.std_error(),
            samples: stats.count,
            accepted,
            acceptance_ratio: accepted as f64 / stats.count.max(1) as f64,
            max_contribution: stats.max,
            proposal_radius,
            config: *cfg,
        }
    }
}

/// Per-shard accumulators.
#[derive(Clone, Copy, Default)]
struct Tally {
    total: RunningStats,
    near: RunningStats,
    far: RunningStats,
    accepted: u64,
}

fn check_inputs(f: &Multifunction, domain: &Domain, cfg: &SeminormConfig) -> Result<()> {
    cfg.validate()?;
    if f.arity() != cfg.k + 1 {
        return Err(Error::arg(format!(
            "config degree {} does not match a multifunction of arity {}",
            cfg.k,
            f.arity()
        )));
    }
    if f.dim() != domain.dim() {
        return Err(Error::arg("multifunction and domain dimensions differ"));
    }
    Ok(())
}

fn run(
    f: &Multifunction,
    domain: &Domain,
    cfg: &SeminormConfig,
    split: Option<f64>,
) -> Result<(Tally, f64)> {
    check_inputs(f, domain, cfg)?;
    let n = domain.dim();
    let k = cfg.k;
    let p = cfg.p;
    let a = p * complement(cfg.theta);
    let big_r = domain.diameter();
    let floor = cfg.resolution * big_r;
    let factor = domain.volume() * (sphere_area(n) * big_r.powf(a) / p).powi(k as i32);
    let ball = cfg.variant.radius();
    let cone = cfg.variant.cone();
    let split = split.unwrap_or(f64::INFINITY);

    let shards = montecarlo::run_sharded(cfg.seed, cfg.samples, cfg.shards, |_, rng, count| {
        let mut ctx = EvalContext::new();
        let mut tally = Tally::default();
        let mut pts = vec![0.0; (k + 1) * n];
        let mut v = vec![0.0; n];
        let mut radii = vec![0.0; k];
        for _ in 0..count {
            let (x0, rest) = pts.split_at_mut(n);
            domain.sample_into(rng, x0)?;
            for i in 0..k {
                unit_vector(rng, &mut v);
                radii[i] = big_r * open_unit(rng).powf(1.0 / a);
                let r_eval = radii[i].max(floor);
                let xi = &mut rest[i * n..(i + 1) * n];
                for j in 0..n {
                    xi[j] = x0[j] + r_eval * v[j];
                }
            }
            let x0 = &pts[..n];
            let mut ok = (0..k).all(|i| domain.contains(&pts[(i + 1) * n..(i + 2) * n]));
            if let Some(r) = ball {
                ok &= radii.iter().all(|&ri| ri < r);
            }
            if ok {
                if let Some(c) = cone {
                    let d0 = domain.dist_to_boundary(x0);
                    ok &= radii.iter().all(|&ri| ri < c * d0);
                }
            }
            let mut contribution = 0.0;
            if ok {
                tally.accepted += 1;
                let mut refs: [&[f64]; MAX_ARITY] = [&[]; MAX_ARITY];
                for (slot, chunk) in refs.iter_mut().zip(pts.chunks(n)) {
                    *slot = chunk;
                }
                let value = ctx.eval_unchecked(f, &refs[..k + 1]);
                if !value.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "multifunction returned {value} at {:?}",
                        &refs[..k + 1]
                    )));
                }
                if value != 0.0 {
                    let denom: f64 = radii.iter().map(|&ri| ri.max(floor).powf(p)).product();
                    contribution = factor * value.abs().powf(p) / denom;
                }
            }
            tally.total.push(contribution);
            if radii.iter().all(|&ri| ri < split) {
                tally.near.push(contribution);
                tally.far.push(0.0);
            } else {
                tally.near.push(0.0);
                tally.far.push(contribution);
            }
        }
        Ok(tally)
    });
    let mut all = Tally::default();
    for s in shards {
        let s = s?;
        all.total.merge(&s.total);
        all.near.merge(&s.near);
        all.far.merge(&s.far);
        all.accepted += s.accepted;
    }
    if !all.total.mean.is_finite() {
        return Err(Error::NonFinite("seminorm estimate overflowed".into()));
    }
    let acceptance = all.accepted as f64 / cfg.samples as f64;
    if acceptance < MIN_ACCEPTANCE {
        return Err(Error::Inefficient {
            acceptance,
            draws: cfg.samples,
            detail: format!(
                "{} variant accepted {} of {} tuples",
                cfg.variant.name(),
                all.accepted,
                cfg.samples
            ),
        });
    }
    Ok((all, big_r))
}

/// Estimate the fixed-θ seminorm of `f` over `domain`.
pub fn fixed_theta_seminorm(
    f: &Multifunction,
    domain: &Domain,
    cfg: &SeminormConfig,
) -> Result<SeminormEstimate> {
    let (tally, big_r) = run(f, domain, cfg, None)?;
    Ok(SeminormEstimate::from_stats(
        &tally.total,
        tally.accepted,
        big_r,
        cfg,
    ))
}

/// `ε_θ = exp(-1/sqrt(1-θ))`.
pub fn epsilon_theta(theta: f64) -> f64 {
    (-1.0 / complement(theta).sqrt()).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearFar {
    /// Tuples with every `|x_i - x_0| < R ε_θ`.
    pub near: SeminormEstimate,
    pub far: SeminormEstimate,
    pub total: SeminormEstimate,
    pub split_radius: f64,
}

/// Split the ball-variant integral at `R ε_θ`, where `R` is the ball radius
/// (the diameter for the full variant). Both parts come from one pass, so
/// `near.power + far.power == total.power` up to rounding.
pub fn near_far_split(f: &Multifunction, domain: &Domain, cfg: &SeminormConfig) -> Result<NearFar> {
    let r = match cfg.variant {
        Variant::Full => domain.diameter(),
        Variant::Ball { r } => r,
        _ => {
            return Err(Error::config(
                "near/far split needs the full or ball variant",
            ))
        }
    };
    let split_radius = r * epsilon_theta(cfg.theta);
    let (tally, big_r) = run(f, domain, cfg, Some(split_radius))?;
    Ok(NearFar {
        near: SeminormEstimate::from_stats(&tally.near, tally.accepted, big_r, cfg),
        far: SeminormEstimate::from_stats(&tally.far, tally.accepted, big_r, cfg),
        total: SeminormEstimate::from_stats(&tally.total, tally.accepted, big_r, cfg),
        split_radius,
    })
}

/// `K(p, k) = p^{-k/p} / k!`.
pub fn bbm_constant(p: f64, k: usize) -> f64 {
    p.powf(-(k as f64) / p) / factorial(k)
}

/// The constant `C(n, p, k) = (m_k^p |S^{n-1}|^k / p^k)^{1/p}` in
/// `‖I_ω‖_{Ω|R,θ} <= C R^{k(1-θ)} ‖ω‖_{L^p}`, where `m_k = 1/k!`.
pub fn uniform_bound_constant(n: usize, p: f64, k: usize) -> f64 {
    (sphere_area(n).powi(k as i32) / p.powi(k as i32)).powf(1.0 / p) / factorial(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformBound {
    pub lhs: SeminormEstimate,
    pub lp_norm: montecarlo::Estimate,
    pub constant: f64,
    pub rhs: f64,
    pub rhs_error: f64,
    pub ratio: f64,
    pub ratio_error: f64,
}

/// Estimate both sides of the uniform `L^p` bound for `I_ω` on `Ω|R`.
pub fn uniform_bound_check(
    omega: &FormField,
    domain: &Domain,
    r: f64,
    cfg: &SeminormConfig,
    lp: &LpConfig,
) -> Result<UniformBound> {
    let k = omega.degree();
    let cfg = SeminormConfig {
        k,
        variant: Variant::Ball { r },
        ..*cfg
    };
    let f = Multifunction::integration(omega, None)?;
    let lhs = fixed_theta_seminorm(&f, domain, &cfg)?;
    let norm = lp_norm(omega, domain, cfg.p, lp)?;
    let constant = uniform_bound_constant(domain.dim(), cfg.p, k);
    let scale = constant * r.powf(k as f64 * complement(cfg.theta));
    let rhs = scale * norm.value;
    let rhs_error = scale * norm.error;
    let (ratio, ratio_error) = if rhs > 0.0 {
        let ratio = lhs.value / rhs;
        let rel = lhs.std_error / lhs.value.max(f64::MIN_POSITIVE) + rhs_error / rhs;
        (ratio, ratio * rel)
    } else {
        (0.0, 0.0)
    };
    Ok(UniformBound {
        lhs,
        lp_norm: norm,
        constant,
        rhs,
        rhs_error,
        ratio,
        ratio_error,
    })
}

pub const CSV_HEADER: &str = "variant,p,k,theta,R,c,samples,seed,value,stderr,acceptance_ratio";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SeminormEstimate {
    /// One CSV row matching [`CSV_HEADER`], numbers in round-trip precision.
    pub fn csv_row(&self) -> String {
        let c = &self.config;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            c.variant.name(),
            c.p,
            c.k,
            c.theta,
            opt(c.variant.radius()),
            opt(c.variant.cone()),
            self.samples,
            c.seed,
            self.value,
            self.std_error,
            self.acceptance_ratio
        )
    }
}

/// Header plus one row per estimate, newline-terminated.
pub fn to_csv<'a>(estimates: impl IntoIterator<Item = &'a SeminormEstimate>) -> String {
    let mut out = String::new();
    writeln!(out, "{CSV_HEADER}").unwrap();
    for e in estimates {
        writeln!(out, "{}", e.csv_row()).unwrap();
    }
    out
}
