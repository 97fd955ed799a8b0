//! The standard bump kernel and coefficient-wise convolution.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, gauss_legendre_on, sphere_area};

use super::{CoeffFn, FormField};

fn bump(t2: f64) -> f64 {
    if t2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t2)).exp()
    }
}

/// `η(y) = c ε^{-n} exp(-1 / (1 - |y/ε|²))` on `|y| < ε`, with `c` chosen so
/// that `∫ η = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    dim: usize,
    eps: f64,
    scale: f64,
}

impl Mollifier {
    pub fn new(dim: usize, eps: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("mollifier needs dimension >= 1"));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::arg(format!(
                "mollifier radius must be > 0, got {eps}"
            )));
        }
        let radial = |t: f64| bump(t * t) * t.powi(dim as i32 - 1);
        let (x, w) = gauss_legendre_on(64, 0.0, 1.0);
        let mass: f64 =
            x.iter().zip(&w).map(|(t, wi)| wi * radial(*t)).sum::<f64>() * sphere_area(dim);
        let scale = 1.0 / (mass * eps.powi(dim as i32));

        // Independent check with composite Simpson.
        let m = 4000;
        let h = 1.0 / m as f64;
        let mut simpson = radial(0.0) + radial(1.0);
        for i in 1..m {
            simpson += if i % 2 == 1 { 4.0 } else { 2.0 } * radial(i as f64 * h);
        }
        let check = simpson * h / 3.0 * sphere_area(dim) / mass;
        if (check - 1.0).abs() > 1e-6 {
            return Err(Error::NonFinite(format!(
                "mollifier normalization check failed: mass {check}"
            )));
        }
        Ok(Mollifier { dim, eps, scale })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn profile(&self, y: &[f64]) -> f64 {
        let t2 = y.iter().map(|v| v * v).sum::<f64>() / (self.eps * self.eps);
        self.scale * bump(t2)
    }
}

pub(super) fn mollify(omega: &FormField, eta: &Mollifier, nodes: usize) -> Result<FormField> {
    if eta.dim != omega.dim {
        return Err(Error::arg("mollifier and form dimensions differ"));
    }
    if nodes == 0 {
        return Err(Error::arg("mollification needs at least one node per axis"));
    }
    let n = omega.dim;
    let (g, gw) = gauss_legendre(nodes);
    let mut offsets: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut pick = vec![0usize; n];
    let mut y = vec![0.0; n];
    'outer: loop {
        let mut w = 1.0;
        for (j, &i) in pick.iter().enumerate() {
            y[j] = eta.eps * g[i];
            w *= eta.eps * gw[i];
        }
        let v = eta.profile(&y) * w;
        if v > 0.0 {
            offsets.extend_from_slice(&y);
            weights.push(v);
        }
        for slot in pick.iter_mut() {
            *slot += 1;
            if *slot < nodes {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::arg(
            "mollification rule has no nodes inside the kernel support",
        ));
    }
    weights.iter_mut().for_each(|w| *w /= total);

    let inner = omega.clone();
    let offsets = Arc::new(offsets);
    let weights = Arc::new(weights);
    let m = omega.num_coeffs();
    let coeffs: CoeffFn = Arc::new(move |x: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut z = vec![0.0; n];
        let mut c = vec![0.0; m];
        for (q, w) in weights.iter().enumerate() {
            let yq = &offsets[q * n..(q + 1) * n];
            for j in 0..n {
                z[j] = x[j] - yq[j];
            }
            inner.coeffs_into(&z, &mut c);
            for (o, v) in out.iter_mut().zip(&c) {
                *o += w * v;
            }
        }
    });
    // Convolution commutes with d only when ω is not truncated by a support.
    let derivative = if omega.support.is_none() && omega.has_exact_derivative() && omega.degree < n
    {
        Some(mollify(&omega.exterior_derivative()?, eta, nodes)?)
    } else {
        None
    };
    FormField::analytic(n, omega.degree, coeffs, derivative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::Domain;
    use crate::exterior::Covector;
    use crate::forms::Polynomial;

    #[test]
    fn unit_mass_and_support() {
        for n in 1..=3 {
            let eta = Mollifier::new(n, 0.3).unwrap();
            assert_eq!(eta.profile(&vec![0.3; n]), 0.0);
            assert!(eta.profile(&vec![0.0; n]) > 0.0);
        }
        assert!(Mollifier::new(2, 0.0).is_err());
    }

    #[test]
    fn constant_and_linear_forms_are_reproduced() {
        let eta = Mollifier::new(2, 0.1).unwrap();
        let c = FormField::constant(&Covector::basis(2, &[0]).unwrap());
        let m = c.mollify(&eta, 8).unwrap();
        let v = m.evaluate(&[0.3, 0.4]).unwrap();
        assert!((v.coeffs()[0] - 1.0).abs() < 1e-14 && v.coeffs()[1].abs() < 1e-14);

        let w = FormField::from_terms(2, 1, vec![(vec![1], Polynomial::variable(2, 0))]).unwrap();
        let m = w.mollify(&eta, 8).unwrap();
        let v = m.evaluate(&[0.37, 0.4]).unwrap();
        assert!((v.coeffs()[1] - 0.37).abs() < 1e-14);
        let d = m
            .exterior_derivative()
            .unwrap()
            .evaluate(&[0.2, 0.2])
            .unwrap();
        assert!((d.coeffs()[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn support_grows_by_eps() {
        let eta = Mollifier::new(2, 0.1).unwrap();
        let w = FormField::constant(&Covector::basis(2, &[0]).unwrap())
            .with_support(Domain::unit_box(2))
            .unwrap();
        let m = w.mollify(&eta, 8).unwrap();
        assert!(m.evaluate(&[1.11, 0.5]).unwrap().is_zero());
        assert!(m.evaluate(&[-0.2, -0.2]).unwrap().is_zero());
        assert!(!m.evaluate(&[1.05, 0.5]).unwrap().is_zero());
        assert!(!m.has_exact_derivative());
    }
}
