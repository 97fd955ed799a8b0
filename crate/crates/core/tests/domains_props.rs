use formflux::{Domain, Error, Halfspace};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn convex_domains() -> Vec<Domain> {
    vec![
        Domain::unit_box(2),
        Domain::axis_box(vec![-1.0, 0.0, 0.0], vec![1.0, 0.5, 2.0]).unwrap(),
        Domain::ball(vec![0.2, -0.1], 0.8).unwrap(),
        Domain::polytope(vec![
            Halfspace {
                normal: vec![-1.0, 0.0],
                offset: 0.0,
            },
            Halfspace {
                normal: vec![0.0, -1.0],
                offset: 0.0,
            },
            Halfspace {
                normal: vec![1.0, 1.0],
                offset: 1.0,
            },
        ])
        .unwrap(),
    ]
}

fn all_domains() -> Vec<Domain> {
    let mut v = convex_domains();
    v.push(Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap());
    v
}

proptest! {
    #[test]
    fn shrunk_domain_stays_eps_inside(which in 0usize..4, eps in 0.01..0.2f64, seed in any::<u64>()) {
        let d = &convex_domains()[which];
        let inner = d.shrink(eps).unwrap();
        for x in inner.sample_uniform(32, seed).unwrap() {
            prop_assert!(d.contains(&x));
            prop_assert!(d.dist_to_boundary(&x) >= eps - 1e-12);
        }
    }

    #[test]
    fn boundary_distance_is_one_lipschitz(which in 0usize..5, seed in any::<u64>()) {
        let d = &all_domains()[which];
        let (lo, hi) = d.bounding_box();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = || -> Vec<f64> { lo.iter().zip(hi).map(|(a, b)| rng.random_range(a - 0.3..b + 0.3)).collect() };
        for _ in 0..16 {
            let (x, y) = (pick(), pick());
            let gap: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            prop_assert!((d.dist_to_boundary(&x) - d.dist_to_boundary(&y)).abs() <= gap + 1e-12);
        }
    }

    #[test]
    fn samples_are_inside(which in 0usize..5, seed in any::<u64>()) {
        let d = &all_domains()[which];
        for x in d.sample_uniform(64, seed).unwrap() {
            prop_assert!(d.contains(&x));
        }
    }
}

#[test]
fn shrinking_too_far_is_an_error() {
    assert!(matches!(
        Domain::unit_box(2).shrink(0.6),
        Err(Error::EmptyDomain(_))
    ));
    assert!(Domain::annulus(vec![0.0, 0.0], 0.5, 1.0)
        .unwrap()
        .shrink(0.1)
        .is_err());
}

#[test]
fn volumes_of_simple_shapes() {
    let pi = std::f64::consts::PI;
    assert!(
        (Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap().volume() - 0.75 * pi).abs() < 1e-14
    );
    assert!((convex_domains()[3].volume() - 0.5).abs() < 1e-14);
    assert!((convex_domains()[1].volume() - 2.0).abs() < 1e-14);
}
