use formflux::forms::random_polynomial_form;
use formflux::{
    integrate_form, Domain, FormField, Mollifier, Polynomial, SimplexRule, SimplexTuple,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn d_by_finite_differences(f: &FormField, x: &[f64]) -> Vec<f64> {
    // Only for 0-forms on R².
    let h = 1e-5;
    (0..2)
        .map(|i| {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[i] += h;
            b[i] -= h;
            (f.evaluate(&a).unwrap().coeffs()[0] - f.evaluate(&b).unwrap().coeffs()[0]) / (2.0 * h)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mollification_commutes_with_d(seed in any::<u64>(), x in prop::collection::vec(-1.0..1.0f64, 2)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_polynomial_form(2, 0, 3, &mut rng);
        let eta = Mollifier::new(2, 0.1).unwrap();
        let smooth = f.mollify(&eta, 8).unwrap();
        let direct = f.exterior_derivative().unwrap().mollify(&eta, 8).unwrap().evaluate(&x).unwrap();
        let fd = d_by_finite_differences(&smooth, &x);
        for (a, b) in direct.coeffs().iter().zip(&fd) {
            prop_assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..n.saturating_sub(1) {
            let w = random_polynomial_form(n, k, 4, &mut rng);
            let dd = w.exterior_derivative().unwrap().exterior_derivative().unwrap();
            let v = dd.evaluate(&vec![0.3; n]).unwrap();
            prop_assert!(v.coeffs().iter().all(|c| c.abs() < 1e-12));
        }
    }

    #[test]
    fn support_extends_by_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_polynomial_form(2, 1, 2, &mut rng).with_support(Domain::unit_box(2)).unwrap();
        prop_assert!(w.evaluate(&[1.5, 0.5]).unwrap().is_zero());
        prop_assert!(w.exterior_derivative().unwrap().evaluate(&[-0.2, 0.5]).unwrap().is_zero());
        let outside = SimplexTuple::new(vec![vec![2.0, 2.0], vec![3.0, 2.5]]).unwrap();
        let rule = SimplexRule::default_for(&w).unwrap();
        prop_assert_eq!(integrate_form(&w, &outside, &rule).unwrap(), 0.0);
    }

    #[test]
    fn json_round_trip_preserves_values(seed in any::<u64>(), x in prop::collection::vec(-1.0..1.0f64, 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_polynomial_form(3, 2, 3, &mut rng);
        let back = FormField::from_json(&w.to_json().unwrap()).unwrap();
        prop_assert_eq!(w.evaluate(&x).unwrap(), back.evaluate(&x).unwrap());
    }
}

#[test]
fn mollifying_a_linear_function_changes_nothing() {
    let f = FormField::scalar(Polynomial::variable(2, 0));
    let eta = Mollifier::new(2, 0.2).unwrap();
    let v = f.mollify(&eta, 6).unwrap().evaluate(&[0.37, -0.1]).unwrap();
    assert!((v.coeffs()[0] - 0.37).abs() < 1e-14);
}
