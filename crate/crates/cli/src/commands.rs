use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use formflux::experiments::{
    builtin_spec, builtin_specs, run_dd_suite, run_diagonal_suite, run_experiment,
    run_mollifier_suite, run_near_far_suite, run_stokes_suite, run_uniform_bound_suite,
    run_variant_ordering, ExperimentReport, ExperimentSpec, MollifierSpec, Report,
};
use formflux::forms::FormDoc;
use formflux::seminorms::{to_csv, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_THETAS};
use formflux::{
    fixed_theta_seminorm, theta_sweep, Domain, Error, Extrapolation, Multifunction, SeminormConfig,
    SweepResult, Variant,
};

use crate::svg::{Chart, Series};

#[derive(Parser, Debug)]
#[command(
    name = "formflux",
    version,
    about = "Singular-kernel seminorms of differential forms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate the seminorm at fixed thetas; one CSV row per (variant, theta).
    Seminorm(EstimatorArgs),
    /// Sweep theta towards 1 and extrapolate the limit.
    Sweep(EstimatorArgs),
    /// Run a verification suite; exit 1 if any assertion fails.
    Verify(VerifyArgs),
    /// Run a named experiment or an experiment spec file.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantName {
    Full,
    Ball,
    Cone,
    BallCone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Auto,
    SqrtLinear,
    Linear,
}

impl From<ModelName> for Extrapolation {
    fn from(m: ModelName) -> Self {
        match m {
            ModelName::Auto => Extrapolation::Auto,
            ModelName::SqrtLinear => Extrapolation::SqrtLinear,
            ModelName::Linear => Extrapolation::Linear,
        }
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Monte Carlo samples per estimate.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Number of independent RNG streams; results depend on it.
    #[arg(long, default_value_t = 8)]
    pub shards: u32,
    /// Defaults to FORMFLUX_SEED, then to a fixed built-in seed.
    #[arg(long, env = "FORMFLUX_SEED")]
    pub seed: Option<u64>,
    /// Directory for CSV, SVG and summary files. Without it, CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub no_plot: bool,
}

#[derive(Args, Debug)]
pub struct EstimatorArgs {
    /// Form JSON file.
    #[arg(long)]
    pub form: PathBuf,
    /// Domain JSON file.
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Seminorm degree: the form's degree measures I_w, one more measures dI_w.
    #[arg(long)]
    pub k: Option<usize>,
    /// Repeatable. Sweeps default to 0.9, 0.95, 0.975, 0.99, 0.995.
    #[arg(long = "theta")]
    pub thetas: Vec<f64>,
    /// Repeatable; defaults to full.
    #[arg(long = "variant", value_enum)]
    pub variants: Vec<VariantName>,
    /// Ball radius for ball variants.
    #[arg(long = "R")]
    pub radius: Option<f64>,
    /// Cone aperture for cone variants.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub extrapolation: ModelName,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Stokes,
    DdZero,
    Mollifier,
    VariantOrdering,
    UniformBound,
    NearFar,
    Diagonal,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Number of random cases (stokes, dd-zero, uniform-bound).
    #[arg(long)]
    pub count: Option<usize>,
    /// Mollifier spec JSON (mollifier suite only).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// Built-in experiment name; see --list.
    pub name: Option<String>,
    /// Experiment spec JSON file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug)]
pub enum Failure {
    Assertion(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Inefficient { .. } => 3,
        Error::NonFinite(_) => 1,
        _ => 2,
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Seminorm(a) => seminorm(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Verify(a) => verify(&a),
        Command::Experiment(a) => experiment(&a),
    }
}

fn io_error(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| io_error(e, path))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Writes `name` under `--out`, or prints CSV to stdout when no directory is given.
struct Sink<'a> {
    out: Option<&'a Path>,
}

impl Sink<'_> {
    fn prepare(&self) -> Result<(), Error> {
        if let Some(dir) = self.out {
            fs::create_dir_all(dir).map_err(|e| io_error(e, dir))?;
        }
        Ok(())
    }

    fn file(&self, name: &str, contents: &str) -> Result<(), Error> {
        if let Some(dir) = self.out {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| io_error(e, &path))?;
        }
        Ok(())
    }

    fn csv(&self, name: &str, csv: &str) -> Result<(), Error> {
        match self.out {
            Some(_) => self.file(name, csv),
            None => {
                print!("{csv}");
                std::io::stdout().flush().ok();
                Ok(())
            }
        }
    }

    /// With `--out`, the summary is the only stdout; otherwise stderr keeps stdout pure CSV.
    fn summary(&self, name: &str, text: &str) -> Result<(), Error> {
        match self.out {
            Some(_) => {
                print!("{text}");
                self.file(name, text)
            }
            None => {
                eprint!("{text}");
                Ok(())
            }
        }
    }
}

fn variants(a: &EstimatorArgs) -> Result<Vec<Variant>, Error> {
    let names = if a.variants.is_empty() {
        vec![VariantName::Full]
    } else {
        a.variants.clone()
    };
    let need = |v: Option<f64>, flag: &str, name: &str| {
        v.ok_or_else(|| Error::Config(format!("variant {name} needs --{flag}")))
    };
    names
        .iter()
        .map(|n| {
            Ok(match n {
                VariantName::Full => Variant::Full,
                VariantName::Ball => Variant::Ball {
                    r: need(a.radius, "R", "ball")?,
                },
                VariantName::Cone => Variant::Cone {
                    c: need(a.c, "c", "cone")?,
                },
                VariantName::BallCone => Variant::BallCone {
                    r: need(a.radius, "R", "ball-cone")?,
                    c: need(a.c, "c", "ball-cone")?,
                },
            })
        })
        .collect()
}

struct Problem {
    f: Multifunction,
    domain: Domain,
    base: SeminormConfig,
    variants: Vec<Variant>,
    thetas: Vec<f64>,
}

fn problem(a: &EstimatorArgs, default_thetas: &[f64]) -> Result<Problem, Error> {
    let doc: FormDoc = load_json(&a.form)?;
    let omega = doc.to_field()?;
    let domain: Domain = load_json(&a.domain)?;
    let j = omega.degree();
    let k = a.k.unwrap_or(j + 1);
    let i = Multifunction::integration(&omega, None)?;
    let f = if k == j {
        i
    } else if k == j + 1 {
        i.differential()?
    } else {
        return Err(Error::Config(format!(
            "--k {k} does not fit a degree-{j} form (use {j} or {})",
            j + 1
        )));
    };
    let thetas = if a.thetas.is_empty() {
        default_thetas.to_vec()
    } else {
        a.thetas.clone()
    };
    if thetas.is_empty() {
        return Err(Error::Config("at least one --theta is required".into()));
    }
    let base = SeminormConfig {
        p: a.p,
        k,
        variant: Variant::Full,
        theta: thetas[0],
        samples: a.run.samples.unwrap_or(DEFAULT_SAMPLES),
        seed: a.run.seed.unwrap_or(DEFAULT_SEED),
        shards: a.run.shards,
        resolution: formflux::seminorms::DEFAULT_RESOLUTION,
    };
    for &t in &thetas {
        base.with_theta(t).validate()?;
    }
    Ok(Problem {
        f,
        domain,
        base,
        variants: variants(a)?,
        thetas,
    })
}

fn seminorm(a: &EstimatorArgs) -> Result<(), Failure> {
    let pr = problem(a, &[])?;
    let mut rows = Vec::new();
    for v in &pr.variants {
        for &t in &pr.thetas {
            rows.push(fixed_theta_seminorm(
                &pr.f,
                &pr.domain,
                &pr.base.with_variant(*v).with_theta(t),
            )?);
        }
    }
    let sink = Sink {
        out: a.run.out.as_deref(),
    };
    sink.prepare()?;
    sink.csv("seminorm.csv", &to_csv(&rows))?;
    Ok(())
}

fn sweep_summary(v: &Variant, s: &SweepResult) -> String {
    let mut out = format!("variant {}\n", v.name());
    for e in &s.estimates {
        out += &format!(
            "  theta {:<6} power {:.6} ± {:.2e}  accepted {:.3}\n",
            e.config.theta, e.power, e.power_error, e.acceptance_ratio
        );
    }
    match (&s.limit, s.divergent) {
        (_, true) => {
            out += &format!(
                "  DIVERGENT: {}\n",
                s.divergence_reason
                    .as_deref()
                    .unwrap_or("estimates grow without bound")
            );
        }
        (Some(l), false) => {
            out += &format!(
                "  limit ({} fit): power {:.6} stat {:.2e} extrapolation {:.2e}; seminorm {:.6}\n",
                l.model.name(),
                l.power,
                l.power_stat_error,
                l.power_sys_error,
                l.value
            );
        }
        (None, false) => out += "  no limit\n",
    }
    out
}

fn sweep_chart(title: &str, runs: &[(Variant, SweepResult)]) -> Chart {
    Chart {
        title: title.to_string(),
        x_label: "theta".into(),
        y_label: "seminorm^p".into(),
        series: runs
            .iter()
            .map(|(v, s)| Series {
                label: v.name().to_string(),
                x: s.estimates.iter().map(|e| e.config.theta).collect(),
                y: s.estimates.iter().map(|e| e.power).collect(),
                err: s.estimates.iter().map(|e| e.power_error).collect(),
            })
            .collect(),
        hlines: runs
            .iter()
            .filter_map(|(v, s)| {
                s.limit
                    .map(|l| (l.power, format!("{} limit {:.4}", v.name(), l.power)))
            })
            .collect(),
    }
}

fn sweep(a: &EstimatorArgs) -> Result<(), Failure> {
    let pr = problem(a, &DEFAULT_THETAS)?;
    let mut runs = Vec::new();
    for v in &pr.variants {
        let s = theta_sweep(
            &pr.f,
            &pr.domain,
            &pr.base.with_variant(*v),
            &pr.thetas,
            a.extrapolation.into(),
        )?;
        runs.push((*v, s));
    }
    let sink = Sink {
        out: a.run.out.as_deref(),
    };
    sink.prepare()?;
    sink.csv(
        "sweep.csv",
        &to_csv(runs.iter().flat_map(|(_, s)| &s.estimates)),
    )?;
    let summary: String = runs.iter().map(|(v, s)| sweep_summary(v, s)).collect();
    sink.summary("summary.txt", &summary)?;
    if !a.run.no_plot {
        sink.file(
            "sweep.svg",
            &sweep_chart(&a.form.display().to_string(), &runs).render(),
        )?;
    }
    Ok(())
}

fn finish(sink: &Sink, report: &dyn Report) -> Result<(), Failure> {
    let name = report.name().to_string();
    let csv = report.csv();
    if !csv.is_empty() {
        sink.csv(&format!("{name}.csv"), &csv)?;
    }
    let summary = report.summary();
    match report.passed() {
        Some(false) => {
            sink.file(&format!("{name}.txt"), &summary)?;
            Err(Failure::Assertion(format!("FAIL\n{summary}")))
        }
        _ => sink
            .summary(&format!("{name}.txt"), &summary)
            .map_err(Failure::from),
    }
}

fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let sink = Sink {
        out: a.run.out.as_deref(),
    };
    sink.prepare()?;
    let seed = a.run.seed.unwrap_or(DEFAULT_SEED);
    let suites = match a.suite {
        Suite::All => vec![
            Suite::Stokes,
            Suite::DdZero,
            Suite::Mollifier,
            Suite::VariantOrdering,
            Suite::UniformBound,
            Suite::NearFar,
            Suite::Diagonal,
        ],
        s => vec![s],
    };
    let mut failures = Vec::new();
    for suite in suites {
        let report: Box<dyn Report> = match suite {
            Suite::Stokes => Box::new(run_stokes_suite(a.count.unwrap_or(1000), seed)?),
            Suite::DdZero => Box::new(run_dd_suite(a.count.unwrap_or(1000), seed)?),
            Suite::Mollifier => {
                let mut spec = match &a.spec {
                    Some(path) => load_json::<MollifierSpec>(path)?,
                    None => MollifierSpec::default(),
                };
                spec.seed = seed;
                spec.shards = a.run.shards;
                if let Some(n) = a.run.samples {
                    spec.samples = n;
                }
                Box::new(run_mollifier_suite(&spec)?)
            }
            Suite::VariantOrdering => Box::new(run_variant_ordering(
                a.run.samples.unwrap_or(1 << 17),
                seed,
            )?),
            Suite::UniformBound => Box::new(run_uniform_bound_suite(
                a.count.unwrap_or(20),
                seed,
                a.run.samples.unwrap_or(1 << 15),
            )?),
            Suite::NearFar => Box::new(run_near_far_suite(a.run.samples.unwrap_or(1 << 18), seed)?),
            Suite::Diagonal => Box::new(run_diagonal_suite(
                0.2,
                a.run.samples.unwrap_or(1 << 18),
                seed,
            )?),
            Suite::All => unreachable!(),
        };
        if let Err(f) = finish(&sink, report.as_ref()) {
            match f {
                Failure::Assertion(msg) => failures.push(msg),
                other => return Err(other),
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Assertion(failures.join("\n")))
    }
}

fn experiment(a: &ExperimentArgs) -> Result<(), Failure> {
    if a.list {
        for s in builtin_specs() {
            println!("{:<16} {:?}", s.name, s.kind);
        }
        return Ok(());
    }
    let mut spec = match (&a.name, &a.spec) {
        (Some(name), None) => builtin_spec(name)
            .ok_or_else(|| Error::Config(format!("unknown experiment {name:?}; see --list")))?,
        (None, Some(path)) => ExperimentSpec::from_json(&read(path)?)?,
        _ => return Err(Error::Config("give either an experiment name or --spec".into()).into()),
    };
    if let Some(n) = a.run.samples {
        spec.samples = n;
    }
    if let Some(seed) = a.run.seed {
        spec.seed = seed;
    }
    spec.shards = a.run.shards;
    spec.validate()?;
    let report: ExperimentReport = run_experiment(&spec)?;
    let sink = Sink {
        out: a.run.out.as_deref(),
    };
    sink.prepare()?;
    sink.file("spec.json", &spec.to_json()?)?;
    if !a.run.no_plot {
        let chart = sweep_chart(&spec.name, &[(spec.variant, report.sweep.clone())]);
        sink.file(&format!("{}.svg", spec.name), &chart.render())?;
    }
    finish(&sink, &report)
}
