//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use formflux::experiments::{
    builtin_spec, run_dd_suite, run_experiment, run_mollifier_suite, run_near_far_suite,
    run_stokes_suite, run_uniform_bound_suite, run_variant_ordering, Compare, Expected,
    ExperimentKind, ExperimentSpec, Flag, MollifierSpec, Report, Target,
};
use formflux::forms::FormDoc;
use formflux::{Covector, Domain, Extrapolation, FormField, Variant};

const SAMPLES: u64 = 1 << 20;

type Check = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn relative(measured: f64, target: f64) -> f64 {
    measured / target - 1.0
}

fn limit_check(name: &str, target: f64, tol: f64) -> Outcome {
    let r = run_experiment(&builtin_spec(name).unwrap()).unwrap();
    let Some(l) = r.sweep.limit else {
        return Outcome {
            pass: false,
            detail: "no limit".into(),
        };
    };
    let dev = relative(l.power, target);
    Outcome {
        pass: dev.abs() <= tol,
        detail: format!(
            "limit {:.5} ({} fit), target {:.5}, deviation {:+.2}%, stat {:.1e}, extrapolation {:.1e}",
            l.power,
            l.model.name(),
            target,
            100.0 * dev,
            l.power_stat_error,
            l.power_sys_error
        ),
    }
}

fn c1() -> Outcome {
    limit_check("scalar-square", FRAC_PI_2, 0.10)
}

// K(2,2)^2 * |dx1^dx2|_{S,2}^2 * |square| = (1/16) * 2 pi^2.
fn c2() -> Outcome {
    limit_check("form-square", PI * PI / 8.0, 0.10)
}

fn c3() -> Outcome {
    // Targets: K(2,1) sqrt(pi) |a| for a 1-form a, K(2,2) pi sqrt(2) for the area form.
    let cases: [(&str, Covector, f64); 3] = [
        ("dx1", Covector::basis(2, &[0]).unwrap(), (PI / 2.0).sqrt()),
        (
            "dx1^dx2",
            Covector::basis(2, &[0, 1]).unwrap(),
            PI * 2f64.sqrt() / 4.0,
        ),
        (
            "3dx1+4dx2",
            Covector::from_coeffs(2, 1, vec![3.0, 4.0]).unwrap(),
            5.0 * (PI / 2.0).sqrt(),
        ),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (label, alpha, target) in cases {
        let spec = ExperimentSpec {
            name: label.into(),
            kind: ExperimentKind::BbmConvex,
            form: FormDoc::from_field(&FormField::constant(&alpha)).unwrap(),
            domain: Domain::unit_box(2),
            target: Target::Integral,
            p: 2.0,
            variant: Variant::Full,
            thetas: formflux::seminorms::DEFAULT_THETAS.to_vec(),
            samples: SAMPLES,
            seed: formflux::seminorms::DEFAULT_SEED,
            shards: 8,
            extrapolation: Extrapolation::Auto,
            expected: Expected::Qualitative {
                flag: Flag::ReportOnly,
            },
            compare: Compare::Value,
            tolerance: 0.05,
        };
        let r = run_experiment(&spec).unwrap();
        let v = r.sweep.limit.map(|l| l.value).unwrap_or(f64::NAN);
        let dev = relative(v, target);
        pass &= dev.abs() <= 0.05;
        detail.push(format!(
            "{label}: {v:.5} vs {target:.5} ({:+.2}%)",
            100.0 * dev
        ));
    }
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

// (pi^2/8) per unit area of dx1^dx2 times the annulus area 3pi/4.
fn c4() -> Outcome {
    limit_check("annulus-cone", PI * PI / 8.0 * 0.75 * PI, 0.15)
}

fn c5() -> Outcome {
    let r = run_stokes_suite(1000, 5).unwrap();
    Outcome {
        pass: r.max_residual < 1e-8,
        detail: format!("max residual {:.2e} over {} cases", r.max_residual, r.count),
    }
}

fn c6() -> Outcome {
    let r = run_dd_suite(1000, 6).unwrap();
    Outcome {
        pass: r.max_relative <= 1e-12,
        detail: format!("max relative {:.2e} over {} cases", r.max_relative, r.count),
    }
}

fn c7() -> Outcome {
    let r = run_experiment(&builtin_spec("closed-rough").unwrap()).unwrap();
    let limit = r.sweep.limit.map(|l| l.value);
    Outcome {
        pass: r.sweep.non_increasing && limit.is_some_and(|v| v < 0.05),
        detail: format!(
            "non-increasing {}, limit {:?}",
            r.sweep.non_increasing, limit
        ),
    }
}

fn from_report(r: &dyn Report) -> Outcome {
    Outcome {
        pass: r.passed() == Some(true),
        detail: r.summary().lines().next().unwrap_or("").to_string(),
    }
}

fn c8() -> Outcome {
    from_report(&run_variant_ordering(1 << 17, 8).unwrap())
}

fn c9() -> Outcome {
    from_report(&run_uniform_bound_suite(20, 9, 1 << 15).unwrap())
}

fn c10() -> Outcome {
    let r = run_near_far_suite(1 << 18, 10).unwrap();
    Outcome {
        pass: r.far_decreasing() && r.eps_099.0 == (-10.0f64).exp(),
        detail: format!(
            "far part non-increasing {}, eps(0.99) = {:e}",
            r.far_decreasing(),
            r.eps_099.0
        ),
    }
}

fn c11() -> Outcome {
    from_report(&run_mollifier_suite(&MollifierSpec::default()).unwrap())
}

fn c12() -> Outcome {
    let data = |f: &str| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("data")
            .join(f)
    };
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_formflux"))
            .args(["sweep", "--form"])
            .arg(data("x1dx2.json"))
            .arg("--domain")
            .arg(data("unit-square.json"))
            .args([
                "--variant",
                "full",
                "--variant",
                "ball",
                "--R",
                "0.5",
                "--samples",
                "50000",
                "--out",
            ])
            .arg(&out)
            .env_remove("FORMFLUX_SEED")
            .output()
            .unwrap();
        (
            status.status.code(),
            std::fs::read(out.join("sweep.csv")).unwrap_or_default(),
        )
    };
    let (a, b) = (run("a"), run("b"));
    Outcome {
        pass: a.0 == Some(0) && !a.1.is_empty() && a == b,
        detail: format!("{} bytes each, identical {}", a.1.len(), a.1 == b.1),
    }
}

fn main() {
    let criteria: [Check; 12] = [
        ("scalar limit on the unit square", c1),
        ("form limit on the unit square", c2),
        ("norm equivalence for constant forms", c3),
        ("cone variant on the annulus", c4),
        ("Stokes identity on random simplices", c5),
        ("d of d vanishes", c6),
        ("closed rough form gives zero", c7),
        ("variant ordering and diameter identity", c8),
        ("uniform bound on random forms", c9),
        ("near/far diagnostic", c10),
        ("mollifier monotonicity", c11),
        ("deterministic CLI output", c12),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            name,
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
