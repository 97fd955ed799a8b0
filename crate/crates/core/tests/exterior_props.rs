use formflux::exterior::basis_indices;
use formflux::numerics::sphere_area;
use formflux::{Covector, SphereMethod, SphereNormConfig};
use proptest::prelude::*;

fn covector(n: usize, k: usize) -> impl Strategy<Value = Covector> {
    let m = basis_indices(n, k).len();
    prop::collection::vec(-3.0..3.0f64, m)
        .prop_map(move |c| Covector::from_coeffs(n, k, c).unwrap())
}

fn vectors(n: usize, count: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-2.0..2.0f64, n), count)
}

fn eval(a: &Covector, v: &[Vec<f64>]) -> f64 {
    let refs: Vec<&[f64]> = v.iter().map(|x| x.as_slice()).collect();
    a.eval(&refs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn swapping_arguments_flips_sign(
        (a, v, i, j) in (2usize..=4).prop_flat_map(|n| (1..=n).prop_flat_map(move |k| {
            (covector(n, k), vectors(n, k), 0..k, 0..k)
        }))
    ) {
        prop_assume!(i != j);
        let mut w = v.clone();
        w.swap(i, j);
        let (x, y) = (eval(&a, &v), eval(&a, &w));
        prop_assert!((x + y).abs() <= 1e-12 * (1.0 + x.abs()));
    }

    #[test]
    fn repeated_argument_gives_zero(
        (a, v) in (2usize..=4).prop_flat_map(|n| (2..=n).prop_flat_map(move |k| (covector(n, k), vectors(n, k))))
    ) {
        let mut w = v.clone();
        w[1] = w[0].clone();
        prop_assert!(eval(&a, &w).abs() < 1e-12);
    }

    #[test]
    fn linear_in_each_slot(
        (a, v, u, s, slot) in (2usize..=4).prop_flat_map(|n| (1..=n).prop_flat_map(move |k| {
            (covector(n, k), vectors(n, k), prop::collection::vec(-2.0..2.0f64, n), -3.0..3.0f64, 0..k)
        }))
    ) {
        let mut w = v.clone();
        for (x, y) in w[slot].iter_mut().zip(&u) {
            *x = s * *x + y;
        }
        let mut only_u = v.clone();
        only_u[slot] = u.clone();
        let lhs = eval(&a, &w);
        let rhs = s * eval(&a, &v) + eval(&a, &only_u);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
    }

    #[test]
    fn wedge_is_graded_commutative(
        (a, b) in (2usize..=4).prop_flat_map(|n| (0..=n, 0..=n).prop_flat_map(move |(k, l)| (covector(n, k), covector(n, l))))
    ) {
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let sign = if a.degree() * b.degree() % 2 == 0 { 1.0 } else { -1.0 };
        for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
            prop_assert!((x - sign * y).abs() < 1e-12);
        }
    }

    // For a 1-form, |α|_{S,2}² = ‖α‖² ∫_S v_1² = ‖α‖² |S^{n-1}| / n.
    #[test]
    fn sphere_norm_of_one_forms_scales_with_euclidean_norm(
        (a, n) in (2usize..=3).prop_flat_map(|n| (covector(n, 1), Just(n)))
    ) {
        prop_assume!(a.euclidean_norm() > 1e-3);
        let cfg = SphereNormConfig::auto(n, 1, 2.0);
        let s = a.sphere_norm(&cfg).unwrap();
        let expected = a.euclidean_norm() * (sphere_area(n) / n as f64).sqrt();
        prop_assert!((s.value - expected).abs() < 1e-9 * expected, "{} vs {}", s.value, expected);
    }
}

#[test]
fn monte_carlo_sphere_norm_agrees_with_quadrature() {
    let a = Covector::from_coeffs(3, 2, vec![1.0, -0.5, 2.0]).unwrap();
    let quad = a.sphere_norm(&SphereNormConfig::auto(3, 2, 2.0)).unwrap();
    let mc = a
        .sphere_norm(&SphereNormConfig {
            p: 2.0,
            method: SphereMethod::MonteCarlo,
            nodes_or_samples: 1 << 18,
            seed: 9,
        })
        .unwrap();
    assert!(
        (quad.value - mc.value).abs() < 4.0 * mc.error + 1e-9,
        "{quad:?} {mc:?}"
    );
}
