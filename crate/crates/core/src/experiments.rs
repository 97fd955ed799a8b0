//! Reproducible experiments and verification suites built on the estimators.
//!
//! Every report carries the inputs needed to rerun it bit for bit at the
//! same shard count, renders a short human-readable summary, and where
//! it holds estimates, a CSV table in the seminorm row format.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alexander_spanier::{stokes_residual, Containment, EvalContext, Multifunction};
use crate::domains::{Domain, Shape};
use crate::error::{Error, Result};
use crate::exterior::{Covector, SphereNormConfig};
use crate::forms::{
    lp_sphere_norm, random_polynomial_form, FormDoc, FormField, LpConfig, Mollifier, Polynomial,
};
use crate::montecarlo::{self, shard_rng};
use crate::numerics::combinations;
use crate::seminorms::{
    self, bbm_constant, epsilon_theta, fixed_theta_seminorm, near_far_split, theta_sweep, to_csv,
    uniform_bound_check, Extrapolation, SeminormConfig, SeminormEstimate, SweepResult, Variant,
    DEFAULT_THETAS,
};
use crate::simplex::SimplexRule;

/// Common surface of every report.
pub trait Report {
    fn name(&self) -> &str;
    /// `None` for report-only runs.
    fn passed(&self) -> Option<bool>;
    fn summary(&self) -> String;
    /// CSV table; empty when the report holds no estimates.
    fn csv(&self) -> String {
        String::new()
    }
}

/// Which multifunction of `ω` the sweep measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// `I_ω`, compared against `K(p, k) ‖|ω|_{S,p}‖`.
    Integral,
    /// `dI_ω`, compared against `K(p, k+1) ‖|dω|_{S,p}‖`.
    #[default]
    Differential,
}

/// Whether tolerances apply to the seminorm or its `p`-th power.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compare {
    #[default]
    Power,
    Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    /// The limit must vanish: `limit <= tolerance + 3σ`.
    Zero,
    /// The sweep must be flagged divergent.
    Divergent,
    /// Run and report, assert nothing.
    ReportOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum Expected {
    /// A literal value in the units chosen by `compare`.
    ClosedForm {
        value: f64,
        #[serde(default)]
        expr: String,
    },
    /// A value computed in code. The only id is `bbm-limit`:
    /// `K(p, j)^p ∫_Ω |α_x|_{S,p}^p dx` with `α = ω` or `dω`, `j = deg α`.
    Oracle {
        id: String,
    },
    Qualitative {
        flag: Flag,
    },
}

fn default_thetas() -> Vec<f64> {
    DEFAULT_THETAS.to_vec()
}
fn default_samples() -> u64 {
    seminorms::DEFAULT_SAMPLES
}
fn default_seed() -> u64 {
    seminorms::DEFAULT_SEED
}
fn default_shards() -> u32 {
    montecarlo::DEFAULT_SHARDS
}
fn default_variant() -> Variant {
    Variant::Full
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    BbmConvex,
    BbmNonconvex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub kind: ExperimentKind,
    pub form: FormDoc,
    pub domain: Domain,
    #[serde(default)]
    pub target: Target,
    pub p: f64,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_thetas")]
    pub thetas: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_shards")]
    pub shards: u32,
    #[serde(default)]
    pub extrapolation: Extrapolation,
    pub expected: Expected,
    #[serde(default)]
    pub compare: Compare,
    /// Relative for closed-form and oracle targets, absolute for `zero`.
    pub tolerance: f64,
}

impl ExperimentSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::config(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if self.thetas.is_empty() {
            return Err(Error::config("theta grid is empty"));
        }
        if self.form.n != self.domain.dim() {
            return Err(Error::config("form and domain dimensions differ"));
        }
        self.base_config()?.validate()
    }

    fn base_config(&self) -> Result<SeminormConfig> {
        let k = match self.target {
            Target::Integral => self.form.k,
            Target::Differential => self.form.k + 1,
        };
        Ok(SeminormConfig {
            p: self.p,
            k,
            variant: self.variant,
            theta: self.thetas[0],
            samples: self.samples,
            seed: self.seed,
            shards: self.shards,
            resolution: seminorms::DEFAULT_RESOLUTION,
        })
    }

    pub fn multifunction(&self) -> Result<Multifunction> {
        let omega = self.form.to_field()?;
        let i = Multifunction::integration(&omega, None)?;
        match self.target {
            Target::Integral => Ok(i),
            Target::Differential => i.differential(),
        }
    }
}

/// `K(p, j)^p ∫_Ω |α_x|_{S,p}^p dx` for `α = ω` (integral) or `dω`.
pub fn bbm_target(
    omega: &FormField,
    domain: &Domain,
    p: f64,
    target: Target,
) -> Result<montecarlo::Estimate> {
    let alpha = match target {
        Target::Integral => omega.clone(),
        Target::Differential => omega.exterior_derivative()?,
    };
    let j = alpha.degree();
    let lp = LpConfig {
        samples: 4096,
        ..LpConfig::default()
    };
    let sphere = SphereNormConfig::auto(alpha.dim(), j, p);
    let norm = lp_sphere_norm(&alpha, domain, p, &lp, &sphere)?;
    let kp = bbm_constant(p, j).powf(p);
    let power = norm.value.powf(p);
    let power_err = if norm.value > 0.0 {
        p * norm.value.powf(p - 1.0) * norm.error
    } else {
        norm.error.powf(p)
    };
    Ok(montecarlo::Estimate {
        value: kp * power,
        error: kp * power_err,
        evaluations: norm.evaluations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub sweep: SweepResult,
    /// Target in the units of `spec.compare`, with its own error.
    pub target: Option<(f64, f64)>,
    /// Extrapolated limit in the units of `spec.compare`.
    pub measured: Option<f64>,
    pub measured_stat_error: Option<f64>,
    pub measured_sys_error: Option<f64>,
    pub passed: Option<bool>,
}

impl Report for ExperimentReport {
    fn name(&self) -> &str {
        &self.spec.name
    }

    fn passed(&self) -> Option<bool> {
        self.passed
    }

    fn summary(&self) -> String {
        let mut s = String::new();
        let units = match self.spec.compare {
            Compare::Power => "p-th power",
            Compare::Value => "seminorm",
        };
        writeln!(s, "experiment {} ({:?})", self.spec.name, self.spec.kind).unwrap();
        for e in &self.sweep.estimates {
            writeln!(
                s,
                "  theta {:<6} power {:.6} ± {:.2e}  value {:.6} ± {:.2e}  accepted {:.3}",
                e.config.theta, e.power, e.power_error, e.value, e.std_error, e.acceptance_ratio
            )
            .unwrap();
        }
        if self.sweep.divergent {
            writeln!(
                s,
                "  DIVERGENT: {}",
                self.sweep.divergence_reason.as_deref().unwrap_or("")
            )
            .unwrap();
        }
        if let (Some(m), Some(st), Some(sy)) = (
            self.measured,
            self.measured_stat_error,
            self.measured_sys_error,
        ) {
            let model = self.sweep.limit.map(|l| l.model.name()).unwrap_or("-");
            writeln!(
                s,
                "  limit ({units}, {model} fit): {m:.6} stat {st:.2e} extrapolation {sy:.2e}"
            )
            .unwrap();
        }
        if let Some((t, te)) = self.target {
            writeln!(s, "  target: {t:.6} ± {te:.2e}").unwrap();
            if let Some(m) = self.measured {
                writeln!(s, "  relative deviation: {:+.4}", m / t - 1.0).unwrap();
            }
        }
        let verdict = match self.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "REPORT",
        };
        writeln!(s, "  {verdict} (tolerance {})", self.spec.tolerance).unwrap();
        s
    }

    fn csv(&self) -> String {
        to_csv(&self.sweep.estimates)
    }
}

fn run_bbm(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let f = spec.multifunction()?;
    let base = spec.base_config()?;
    let sweep = theta_sweep(&f, &spec.domain, &base, &spec.thetas, spec.extrapolation)?;
    let p = spec.p;
    let to_units = |power: f64, err: f64| -> (f64, f64) {
        match spec.compare {
            Compare::Power => (power, err),
            Compare::Value => {
                let v = power.max(0.0).powf(1.0 / p);
                let e = if v > 0.0 {
                    err / (p * v.powf(p - 1.0))
                } else {
                    err.powf(1.0 / p)
                };
                (v, e)
            }
        }
    };
    let target = match &spec.expected {
        Expected::ClosedForm { value, .. } => Some((*value, 0.0)),
        Expected::Oracle { id } if id == "bbm-limit" => {
            let t = bbm_target(&spec.form.to_field()?, &spec.domain, p, spec.target)?;
            Some(to_units(t.value, t.error))
        }
        Expected::Oracle { id } => return Err(Error::config(format!("unknown oracle id {id:?}"))),
        Expected::Qualitative { .. } => None,
    };
    let (measured, stat, sys) = match sweep.limit {
        Some(l) => match spec.compare {
            Compare::Power => (
                Some(l.power),
                Some(l.power_stat_error),
                Some(l.power_sys_error),
            ),
            Compare::Value => (
                Some(l.value),
                Some(l.value_stat_error),
                Some(l.value_sys_error),
            ),
        },
        None => (None, None, None),
    };
    let passed = match (&spec.expected, measured, stat) {
        (
            Expected::Qualitative {
                flag: Flag::ReportOnly,
            },
            _,
            _,
        ) => None,
        (
            Expected::Qualitative {
                flag: Flag::Divergent,
            },
            _,
            _,
        ) => Some(sweep.divergent),
        (Expected::Qualitative { flag: Flag::Zero }, Some(m), Some(st)) => {
            Some(m <= spec.tolerance + 3.0 * st)
        }
        (_, Some(m), Some(st)) => {
            let (t, te) = target.expect("numeric target");
            Some((m - t).abs() <= spec.tolerance * t.abs() + 3.0 * (st + te))
        }
        _ => Some(false),
    };
    Ok(ExperimentReport {
        spec: spec.clone(),
        sweep,
        target,
        measured,
        measured_stat_error: stat,
        measured_sys_error: sys,
        passed,
    })
}

/// Limit identity on a convex domain.
pub fn run_bbm_convex(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    if !spec.domain.is_convex() {
        return Err(Error::config(format!(
            "{}: domain is not convex",
            spec.name
        )));
    }
    run_bbm(spec)
}

/// Limit identity for cone variants on a (typically non-convex) domain.
/// Report-only specs may use any variant.
pub fn run_bbm_nonconvex(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let report_only = matches!(
        spec.expected,
        Expected::Qualitative {
            flag: Flag::ReportOnly
        }
    );
    match spec.variant.cone() {
        Some(c) if c > 0.0 && c <= 1.0 => {}
        _ if report_only => {}
        _ => {
            return Err(Error::config(format!(
                "{}: needs a cone variant with c in (0, 1]",
                spec.name
            )))
        }
    }
    run_bbm(spec)
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    match spec.kind {
        ExperimentKind::BbmConvex => run_bbm_convex(spec),
        ExperimentKind::BbmNonconvex => run_bbm_nonconvex(spec),
    }
}

fn x1dx2_doc() -> FormDoc {
    let w = FormField::from_terms(2, 1, vec![(vec![1], Polynomial::variable(2, 0))])
        .expect("valid form");
    FormDoc::from_field(&w).expect("polynomial form")
}

/// `sign(x_1 - 1/2) dx_1 + sign(x_2 - 1/2) dx_2` (closed) or
/// `sign(x_1 - 1/2) dx_2` (not closed).
pub fn rough_doc(closed: bool) -> FormDoc {
    use crate::forms::StepDoc;
    let step = |index: usize, axis: usize| StepDoc {
        index: vec![index],
        axis,
        at: 0.5,
        below: -1.0,
        above: 1.0,
    };
    FormDoc {
        n: 2,
        k: 1,
        terms: Vec::new(),
        steps: if closed {
            vec![step(1, 1), step(2, 2)]
        } else {
            vec![step(2, 1)]
        },
        support: None,
    }
}

/// Named experiments shipped with the library.
pub fn builtin_specs() -> Vec<ExperimentSpec> {
    let square = Domain::unit_box(2);
    let annulus = Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).expect("valid annulus");
    let x1 =
        FormDoc::from_field(&FormField::scalar(Polynomial::variable(2, 0))).expect("polynomial");
    let base = |name: &str, form: FormDoc, domain: Domain| ExperimentSpec {
        name: name.into(),
        kind: ExperimentKind::BbmConvex,
        form,
        domain,
        target: Target::Differential,
        p: 2.0,
        variant: Variant::Full,
        thetas: DEFAULT_THETAS.to_vec(),
        samples: 1 << 20,
        seed: seminorms::DEFAULT_SEED,
        shards: montecarlo::DEFAULT_SHARDS,
        extrapolation: Extrapolation::Auto,
        expected: Expected::Oracle {
            id: "bbm-limit".into(),
        },
        compare: Compare::Power,
        tolerance: 0.1,
    };
    vec![
        ExperimentSpec {
            expected: Expected::ClosedForm {
                value: std::f64::consts::FRAC_PI_2,
                expr: "pi/2".into(),
            },
            ..base("scalar-square", x1, square.clone())
        },
        base("form-square", x1dx2_doc(), square.clone()),
        ExperimentSpec {
            kind: ExperimentKind::BbmNonconvex,
            variant: Variant::Cone { c: 0.5 },
            tolerance: 0.15,
            ..base("annulus-cone", x1dx2_doc(), annulus.clone())
        },
        ExperimentSpec {
            kind: ExperimentKind::BbmNonconvex,
            expected: Expected::Qualitative {
                flag: Flag::ReportOnly,
            },
            ..base("annulus-full", x1dx2_doc(), annulus)
        },
        ExperimentSpec {
            expected: Expected::Qualitative { flag: Flag::Zero },
            compare: Compare::Value,
            tolerance: 0.05,
            ..base("closed-rough", rough_doc(true), square.clone())
        },
        ExperimentSpec {
            expected: Expected::Qualitative {
                flag: Flag::Divergent,
            },
            samples: 1 << 18,
            ..base("open-rough", rough_doc(false), square)
        },
    ]
}

pub fn builtin_spec(name: &str) -> Option<ExperimentSpec> {
    builtin_specs().into_iter().find(|s| s.name == name)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StokesCase {
    pub dim: usize,
    pub degree: usize,
    pub residual: f64,
    pub tuple: Vec<Vec<f64>>,
    pub form_json: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StokesReport {
    pub count: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub worst: Option<StokesCase>,
    /// Residuals of forms truncated by a support the simplex leaves;
    /// reported, not asserted.
    pub truncated: Vec<f64>,
    pub threshold: f64,
}

impl Report for StokesReport {
    fn name(&self) -> &str {
        "stokes"
    }

    fn passed(&self) -> Option<bool> {
        Some(self.max_residual < self.threshold)
    }

    fn summary(&self) -> String {
        let mut s = format!(
            "stokes: {} random polynomial forms (seed {}), max |dI_w - I_dw| = {:.3e} (threshold {:.0e})\n",
            self.count, self.seed, self.max_residual, self.threshold
        );
        for r in &self.truncated {
            writeln!(s, "  truncated support (excluded): residual {r:.3e}").unwrap();
        }
        if self.passed() == Some(false) {
            if let Some(w) = &self.worst {
                writeln!(
                    s,
                    "  worst case: n={} k={} tuple {:?}\n{}",
                    w.dim, w.degree, w.tuple, w.form_json
                )
                .unwrap();
            }
        }
        s
    }
}

/// Degree/dimension pairs cycled through by the Stokes suite.
const STOKES_SHAPES: [(usize, usize); 5] = [(2, 0), (2, 1), (3, 0), (3, 1), (3, 2)];

/// Stokes identity on `count` random polynomial forms of total degree `<= 3`,
/// simplices with corners uniform in the unit ball.
pub fn run_stokes_suite(count: usize, seed: u64) -> Result<StokesReport> {
    let mut rng = shard_rng(seed, 0);
    let mut max_residual: f64 = 0.0;
    let mut worst = None;
    for i in 0..count {
        let (n, k) = STOKES_SHAPES[i % STOKES_SHAPES.len()];
        let ball = Domain::ball(vec![0.0; n], 1.0)?;
        let omega = random_polynomial_form(n, k, 3, &mut rng);
        let tuple = ball.sample_uniform(k + 2, rng.random())?;
        let refs: Vec<&[f64]> = tuple.iter().map(|p| p.as_slice()).collect();
        let r = stokes_residual(&omega, &refs, None)?;
        if !(r.residual <= max_residual) {
            max_residual = r.residual;
            worst = Some(StokesCase {
                dim: n,
                degree: k,
                residual: r.residual,
                tuple: tuple.clone(),
                form_json: omega.to_json()?,
            });
        }
    }
    // A form cut off by its support: the identity is not expected to hold.
    let truncated_form = FormField::from_terms(2, 1, vec![(vec![1], Polynomial::variable(2, 0))])?
        .with_support(Domain::unit_box(2))?;
    let tuple: [&[f64]; 3] = [&[0.5, 0.5], &[1.5, 0.5], &[0.5, 1.5]];
    let r = stokes_residual(&truncated_form, &tuple, None)?;
    debug_assert_eq!(r.containment, Containment::NotContained);
    Ok(StokesReport {
        count,
        seed,
        max_residual,
        worst,
        truncated: vec![r.residual],
        threshold: 1e-8,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DdReport {
    pub count: usize,
    pub seed: u64,
    /// Largest `|ddF| / Σ|F(face)|` over codimension-two faces.
    pub max_relative: f64,
    pub threshold: f64,
}

impl Report for DdReport {
    fn name(&self) -> &str {
        "dd-zero"
    }

    fn passed(&self) -> Option<bool> {
        Some(self.max_relative <= self.threshold)
    }

    fn summary(&self) -> String {
        format!(
            "dd-zero: {} random multifunctions (seed {}), max relative |ddF| = {:.3e} (threshold {:.0e})\n",
            self.count, self.seed, self.max_relative, self.threshold
        )
    }
}

/// A random smooth multifunction of the given arity on `R^n`.
fn random_multifunction<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    arity: usize,
) -> Result<Multifunction> {
    if rng.random_bool(0.5) {
        let freq: Vec<f64> = (0..arity * n)
            .map(|_| rng.random_range(-3.0..3.0))
            .collect();
        let phase: f64 = rng.random_range(0.0..6.0);
        let amp: f64 = rng.random_range(0.1..10.0);
        Multifunction::user(
            n,
            arity,
            Arc::new(move |pts: &[&[f64]]| {
                let mut s = phase;
                let mut prod = 1.0;
                for (i, p) in pts.iter().enumerate() {
                    for (j, x) in p.iter().enumerate() {
                        s += freq[i * n + j] * x;
                        prod *= 1.0 + 0.1 * x * (i + 1) as f64;
                    }
                }
                amp * s.sin() + prod
            }),
        )
    } else {
        let k = (arity - 1).min(n);
        let omega = random_polynomial_form(n, k, 2, rng);
        let mut f = Multifunction::integration(&omega, None)?;
        for _ in k + 1..arity {
            f = f.differential()?;
        }
        Ok(f)
    }
}

/// `d(dF) = 0` at random tuples, relative to the face values it cancels.
pub fn run_dd_suite(count: usize, seed: u64) -> Result<DdReport> {
    let mut rng = shard_rng(seed, 0);
    let mut ctx = EvalContext::new();
    let mut max_relative: f64 = 0.0;
    for i in 0..count {
        let n = 2 + i % 2;
        let arity = 1 + i % 3;
        let f = random_multifunction(&mut rng, n, arity)?;
        let dd = f.differential()?.differential()?;
        let pts: Vec<Vec<f64>> = (0..arity + 2)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let v = ctx.evaluate(&dd, &refs)?;
        let mut scale = 0.0;
        for keep in combinations(arity + 2, arity) {
            let face: Vec<&[f64]> = keep.iter().map(|&j| refs[j]).collect();
            scale += ctx.evaluate(&f, &face)?.abs();
        }
        let rel = if scale > 0.0 {
            v.abs() / scale
        } else {
            v.abs()
        };
        max_relative = max_relative.max(rel);
    }
    Ok(DdReport {
        count,
        seed,
        max_relative,
        threshold: 1e-12,
    })
}

/// Inputs for the mollifier monotonicity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub form: FormDoc,
    pub domain: Domain,
    pub eps: f64,
    /// Gauss-Legendre nodes per axis for the convolution.
    pub nodes: usize,
    pub p: f64,
    /// Ball radius `R` of both seminorms.
    pub radius: f64,
    pub thetas: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub shards: u32,
}

impl Default for MollifierSpec {
    fn default() -> Self {
        MollifierSpec {
            form: x1dx2_doc(),
            domain: Domain::unit_box(2),
            eps: 0.05,
            nodes: 6,
            p: 2.0,
            radius: 0.5,
            thetas: DEFAULT_THETAS.to_vec(),
            samples: 1 << 16,
            seed: seminorms::DEFAULT_SEED,
            shards: montecarlo::DEFAULT_SHARDS,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MollifierReport {
    pub spec: MollifierSpec,
    /// `(lhs over Ω_ε with η*ω, rhs over Ω with ω)` per theta.
    pub pairs: Vec<(SeminormEstimate, SeminormEstimate)>,
}

impl Report for MollifierReport {
    fn name(&self) -> &str {
        "mollifier"
    }

    fn passed(&self) -> Option<bool> {
        Some(
            self.pairs
                .iter()
                .all(|(l, r)| l.value <= r.value + 3.0 * (l.std_error + r.std_error)),
        )
    }

    fn summary(&self) -> String {
        let mut s = format!(
            "mollifier: eps {}, R {}, p {}, seed {}\n",
            self.spec.eps, self.spec.radius, self.spec.p, self.spec.seed
        );
        for (l, r) in &self.pairs {
            let ok = l.value <= r.value + 3.0 * (l.std_error + r.std_error);
            writeln!(
                s,
                "  theta {:<6} |dI(eta*w)| on shrunk {:.6} ± {:.2e} <= |dI(w)| {:.6} ± {:.2e}: {}",
                l.config.theta,
                l.value,
                l.std_error,
                r.value,
                r.std_error,
                if ok { "ok" } else { "VIOLATED" }
            )
            .unwrap();
        }
        s
    }

    fn csv(&self) -> String {
        to_csv(self.pairs.iter().flat_map(|(l, r)| [l, r]))
    }
}

/// `‖dI_{η*ω}‖` over `Ω_ε` against `‖dI_ω‖` over `Ω`, ball variant.
pub fn run_mollifier_suite(spec: &MollifierSpec) -> Result<MollifierReport> {
    let omega = spec.form.to_field()?;
    let eta = Mollifier::new(omega.dim(), spec.eps)?;
    let smooth = omega.mollify(&eta, spec.nodes)?;
    let inner = spec.domain.shrink(spec.eps)?;
    let lhs_f = Multifunction::integration(&smooth, Some(SimplexRule::default_for(&omega)?))?
        .differential()?;
    let rhs_f = Multifunction::integration(&omega, None)?.differential()?;
    let base = SeminormConfig {
        p: spec.p,
        k: omega.degree() + 1,
        variant: Variant::Ball { r: spec.radius },
        theta: spec.thetas.first().copied().unwrap_or(0.9),
        samples: spec.samples,
        seed: spec.seed,
        shards: spec.shards,
        resolution: seminorms::DEFAULT_RESOLUTION,
    };
    let pairs = spec
        .thetas
        .iter()
        .map(|&t| {
            let cfg = base.with_theta(t);
            Ok((
                fixed_theta_seminorm(&lhs_f, &inner, &cfg)?,
                fixed_theta_seminorm(&rhs_f, &spec.domain, &cfg)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MollifierReport {
        spec: spec.clone(),
        pairs,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderingReport {
    pub seed: u64,
    /// Rows of `(cone|R, ball(R), full, ball(diam))` per theta.
    pub rows: Vec<[SeminormEstimate; 4]>,
}

impl OrderingReport {
    fn row_ok(row: &[SeminormEstimate; 4]) -> (bool, bool) {
        let [cone, ball, full, diam] = row;
        let le = |a: &SeminormEstimate, b: &SeminormEstimate| {
            a.value <= b.value + 3.0 * (a.std_error + b.std_error)
        };
        (le(cone, ball) && le(ball, full), full.value == diam.value)
    }
}

impl Report for OrderingReport {
    fn name(&self) -> &str {
        "variant-ordering"
    }

    fn passed(&self) -> Option<bool> {
        Some(self.rows.iter().all(|r| {
            let (a, b) = OrderingReport::row_ok(r);
            a && b
        }))
    }

    fn summary(&self) -> String {
        let mut s = format!("variant-ordering (seed {})\n", self.seed);
        for r in &self.rows {
            let (chain, diam) = OrderingReport::row_ok(r);
            writeln!(
                s,
                "  theta {:<5} cone|R {:.6} <= ball(R) {:.6} <= full {:.6} [{}]; full == ball(diam): {}",
                r[0].config.theta,
                r[0].value,
                r[1].value,
                r[2].value,
                if chain { "ok" } else { "VIOLATED" },
                diam
            )
            .unwrap();
        }
        s
    }

    fn csv(&self) -> String {
        to_csv(self.rows.iter().flatten())
    }
}

/// Ordering chain and diameter identity for `dI_ω`, `ω = x_1 dx_2` on the
/// unit square, over a 3 x 3 grid of thetas and variants.
pub fn run_variant_ordering(samples: u64, seed: u64) -> Result<OrderingReport> {
    let d = Domain::unit_box(2);
    let f = Multifunction::integration(&x1dx2_doc().to_field()?, None)?.differential()?;
    let (r, c) = (0.5, 0.5);
    let rows = [0.9, 0.95, 0.99]
        .iter()
        .map(|&t| {
            let cfg = SeminormConfig::new(2.0, 2, t)
                .with_samples(samples)
                .with_seed(seed);
            let run = |v| fixed_theta_seminorm(&f, &d, &cfg.with_variant(v));
            Ok([
                run(Variant::BallCone { r, c })?,
                run(Variant::Ball { r })?,
                run(Variant::Full)?,
                run(Variant::Ball { r: d.diameter() })?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrderingReport { seed, rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformBoundReport {
    pub seed: u64,
    pub theta: f64,
    /// `(n, k, ratio, ratio_error)` per random form.
    pub cases: Vec<(usize, usize, f64, f64)>,
}

impl Report for UniformBoundReport {
    fn name(&self) -> &str {
        "uniform-bound"
    }

    fn passed(&self) -> Option<bool> {
        Some(self.cases.iter().all(|&(_, _, r, e)| r <= 1.0 + 3.0 * e))
    }

    fn summary(&self) -> String {
        let worst = self.cases.iter().map(|c| c.2).fold(0.0, f64::max);
        let mut s = format!(
            "uniform-bound: {} random forms at theta {} (seed {}), largest lhs/rhs = {:.4}\n",
            self.cases.len(),
            self.theta,
            self.seed,
            worst
        );
        for (n, k, r, e) in &self.cases {
            writeln!(s, "  n={n} k={k} ratio {r:.4} ± {e:.1e}").unwrap();
        }
        s
    }
}

/// `‖I_ω‖_{Ω|R,θ} <= C R^{k(1-θ)} ‖ω‖_{L^p}` on random polynomial forms of
/// degree 1 or 2 on unit cubes of dimension 2 or 3, `R = diam`.
pub fn run_uniform_bound_suite(
    count: usize,
    seed: u64,
    samples: u64,
) -> Result<UniformBoundReport> {
    let mut rng = shard_rng(seed, 1);
    let theta = 0.9;
    let mut cases = Vec::with_capacity(count);
    for i in 0..count {
        let n = 2 + i % 2;
        let k = 1 + (i / 2) % 2;
        let omega = random_polynomial_form(n, k, 2, &mut rng);
        let d = Domain::unit_box(n);
        let cfg = SeminormConfig::new(2.0, k, theta)
            .with_samples(samples)
            .with_seed(rng.random());
        let lp = LpConfig {
            samples,
            seed: rng.random(),
            shards: montecarlo::DEFAULT_SHARDS,
        };
        let b = uniform_bound_check(&omega, &d, d.diameter(), &cfg, &lp)?;
        cases.push((n, k, b.ratio, b.ratio_error));
    }
    Ok(UniformBoundReport { seed, theta, cases })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NearFarReport {
    pub seed: u64,
    pub splits: Vec<seminorms::NearFar>,
    /// `ε_{0.99}` as computed, next to `e^{-10}`.
    pub eps_099: (f64, f64),
}

impl NearFarReport {
    pub fn far_decreasing(&self) -> bool {
        self.splits.windows(2).all(|w| {
            let (a, b) = (&w[0].far, &w[1].far);
            b.power <= a.power + 3.0 * (a.power_error + b.power_error)
        })
    }

    pub fn eps_exact(&self) -> bool {
        self.eps_099.0 == self.eps_099.1
    }
}

impl Report for NearFarReport {
    fn name(&self) -> &str {
        "near-far"
    }

    fn passed(&self) -> Option<bool> {
        Some(self.far_decreasing() && self.eps_exact())
    }

    fn summary(&self) -> String {
        let mut s = format!(
            "near-far (seed {}): eps(0.99) = {:e} vs e^-10 = {:e}\n",
            self.seed, self.eps_099.0, self.eps_099.1
        );
        for nf in &self.splits {
            writeln!(
                s,
                "  theta {:<6} split {:.3e} near {:.6} far {:.6} ± {:.2e}",
                nf.total.config.theta,
                nf.split_radius,
                nf.near.power,
                nf.far.power,
                nf.far.power_error
            )
            .unwrap();
        }
        writeln!(s, "  far part non-increasing: {}", self.far_decreasing()).unwrap();
        s
    }

    fn csv(&self) -> String {
        to_csv(self.splits.iter().flat_map(|s| [&s.near, &s.far]))
    }
}

/// Near/far split of `I_ω`, `ω = dx_1` on the unit square, along the default grid.
pub fn run_near_far_suite(samples: u64, seed: u64) -> Result<NearFarReport> {
    let d = Domain::unit_box(2);
    let omega = FormField::constant(&Covector::basis(2, &[0])?);
    let f = Multifunction::integration(&omega, None)?;
    let splits = DEFAULT_THETAS
        .iter()
        .map(|&t| {
            near_far_split(
                &f,
                &d,
                &SeminormConfig::new(2.0, 1, t)
                    .with_samples(samples)
                    .with_seed(seed),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NearFarReport {
        seed,
        splits,
        eps_099: (epsilon_theta(0.99), (-10.0f64).exp()),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalReport {
    pub sweep: SweepResult,
    pub gap: f64,
}

impl Report for DiagonalReport {
    fn name(&self) -> &str {
        "diagonal"
    }

    fn passed(&self) -> Option<bool> {
        let first = &self.sweep.estimates[0];
        let last = self.sweep.estimates.last().expect("non-empty sweep");
        let limit_ok = self
            .sweep
            .limit
            .map(|l| l.power <= 3.0 * l.power_stat_error + l.power_sys_error + 1e-3 * first.power)
            .unwrap_or(false);
        Some(self.sweep.non_increasing && last.power < first.power && limit_ok)
    }

    fn summary(&self) -> String {
        let mut s = format!(
            "diagonal: F = 1[|x1 - x0| >= {}] on the unit square, vanishing near the diagonal\n",
            self.gap
        );
        for e in &self.sweep.estimates {
            writeln!(
                s,
                "  theta {:<6} power {:.6} ± {:.2e}",
                e.config.theta, e.power, e.power_error
            )
            .unwrap();
        }
        if let Some(l) = self.sweep.limit {
            writeln!(
                s,
                "  limit {:.3e} stat {:.1e} extrapolation {:.1e}",
                l.power, l.power_stat_error, l.power_sys_error
            )
            .unwrap();
        }
        s
    }

    fn csv(&self) -> String {
        to_csv(&self.sweep.estimates)
    }
}

/// A multifunction vanishing on `{|x_1 - x_0| < gap}` has a seminorm that
/// tends to zero as `θ → 1⁻`.
pub fn run_diagonal_suite(gap: f64, samples: u64, seed: u64) -> Result<DiagonalReport> {
    let d = Domain::unit_box(2);
    let f = Multifunction::user(
        2,
        2,
        Arc::new(move |p: &[&[f64]]| {
            let r = crate::numerics::distance(p[0], p[1]);
            if r >= gap {
                1.0
            } else {
                0.0
            }
        }),
    )?;
    let cfg = SeminormConfig::new(2.0, 1, 0.9)
        .with_samples(samples)
        .with_seed(seed);
    let sweep = theta_sweep(&f, &d, &cfg, &DEFAULT_THETAS, Extrapolation::Auto)?;
    Ok(DiagonalReport { sweep, gap })
}

/// Convenience: shape of a domain for summaries.
pub fn describe_domain(d: &Domain) -> String {
    match d.shape() {
        Shape::Ball { center, radius } => format!("ball(center {center:?}, r {radius})"),
        Shape::AxisBox { lo, hi } => format!("box({lo:?}, {hi:?})"),
        Shape::Annulus {
            center,
            r_in,
            r_out,
        } => format!("annulus({center:?}, {r_in}, {r_out})"),
        other => format!("{other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_round_trip_and_defaults() {
        let spec = builtin_spec("form-square").unwrap();
        let back = ExperimentSpec::from_json(&spec.to_json().unwrap()).unwrap();
        assert_eq!(back, spec);
        let minimal = r#"{
            "name": "m", "kind": "bbm-convex", "p": 2, "tolerance": 0.1,
            "form": {"n": 2, "k": 0, "terms": [{"index": [], "monomials": [{"powers": [1, 0], "coeff": 1}]}]},
            "domain": {"shape": "axis-box", "params": {"lo": [0, 0], "hi": [1, 1]}},
            "expected": {"source": "closed-form", "value": 1.5707963267948966}
        }"#;
        let m = ExperimentSpec::from_json(minimal).unwrap();
        assert_eq!(m.thetas, DEFAULT_THETAS.to_vec());
        assert_eq!(m.target, Target::Differential);
        assert_eq!(m.variant, Variant::Full);
        let bad = minimal.replace("0.1,", "0,");
        assert!(matches!(
            ExperimentSpec::from_json(&bad),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn oracle_target_for_the_area_form() {
        let t = bbm_target(
            &x1dx2_doc().to_field().unwrap(),
            &Domain::unit_box(2),
            2.0,
            Target::Differential,
        )
        .unwrap();
        let pi = std::f64::consts::PI;
        assert!((t.value - pi * pi / 8.0).abs() < 1e-10, "{t:?}");
    }

    #[test]
    fn convexity_is_required() {
        let mut spec = builtin_spec("form-square").unwrap();
        spec.domain = Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap();
        assert!(matches!(run_bbm_convex(&spec), Err(Error::Config(_))));
        let spec = ExperimentSpec {
            variant: Variant::Full,
            expected: Expected::Oracle {
                id: "bbm-limit".into(),
            },
            ..builtin_spec("annulus-cone").unwrap()
        };
        assert!(matches!(run_bbm_nonconvex(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn small_suites_pass() {
        assert_eq!(run_stokes_suite(50, 3).unwrap().passed(), Some(true));
        assert_eq!(run_dd_suite(60, 3).unwrap().passed(), Some(true));
    }

    #[test]
    fn truncated_stokes_case_is_reported() {
        let r = run_stokes_suite(5, 1).unwrap();
        assert_eq!(r.truncated.len(), 1);
        assert!(r.truncated[0] > 1e-3);
    }
}
