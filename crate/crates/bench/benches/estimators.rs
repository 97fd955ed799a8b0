use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use formflux::forms::random_polynomial_form;
use formflux::{
    fixed_theta_seminorm, integrate_form, Covector, Domain, EvalContext, FormField, Multifunction,
    Polynomial, SeminormConfig, SimplexRule, SimplexTuple, SphereNormConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn x1dx2() -> FormField {
    FormField::from_terms(2, 1, vec![(vec![1], Polynomial::variable(2, 0))]).unwrap()
}

fn covectors(c: &mut Criterion) {
    let a = Covector::from_coeffs(3, 2, vec![1.0, -2.0, 0.5]).unwrap();
    let (u, v) = ([0.3, -1.0, 2.0], [1.0, 0.5, -0.2]);
    c.bench_function("covector eval 2-form in R3", |b| {
        b.iter(|| black_box(&a).eval(&[&u, &v]).unwrap())
    });
    let cfg = SphereNormConfig::auto(3, 2, 2.0);
    c.bench_function("sphere norm 2-form in R3", |b| {
        b.iter(|| black_box(&a).sphere_norm(&cfg).unwrap())
    });
}

fn quadrature(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = random_polynomial_form(3, 2, 3, &mut rng);
    let rule = SimplexRule::default_for(&w).unwrap();
    let tri = SimplexTuple::new(vec![
        vec![0.0, 0.1, 0.2],
        vec![1.0, 0.0, 0.3],
        vec![0.2, 0.8, -0.5],
    ])
    .unwrap();
    c.bench_function("integrate cubic 2-form on triangle", |b| {
        b.iter(|| integrate_form(black_box(&w), &tri, &rule).unwrap())
    });
    let f = Multifunction::integration(&x1dx2(), None)
        .unwrap()
        .differential()
        .unwrap();
    let pts: [&[f64]; 3] = [&[0.1, 0.2], &[0.7, 0.3], &[0.4, 0.9]];
    let mut ctx = EvalContext::new();
    c.bench_function("dI of x1 dx2 at a triangle", |b| {
        b.iter(|| ctx.evaluate(&f, black_box(&pts)).unwrap())
    });
}

fn seminorms(c: &mut Criterion) {
    let mut g = c.benchmark_group("seminorm");
    g.sample_size(10);
    let square = Domain::unit_box(2);
    let f = Multifunction::integration(&x1dx2(), None)
        .unwrap()
        .differential()
        .unwrap();
    let cfg = SeminormConfig::new(2.0, 2, 0.99).with_samples(1 << 14);
    g.bench_function("dI x1dx2 unit square 16k samples", |b| {
        b.iter(|| fixed_theta_seminorm(&f, &square, &cfg).unwrap())
    });
    let annulus = Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap();
    let cone = cfg.with_variant(formflux::Variant::Cone { c: 0.5 });
    g.bench_function("dI x1dx2 annulus cone 16k samples", |b| {
        b.iter(|| fixed_theta_seminorm(&f, &annulus, &cone).unwrap())
    });
    g.finish();
}

criterion_group!(benches, covectors, quadrature, seminorms);
criterion_main!(benches);
