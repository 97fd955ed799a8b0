//! Sparse multivariate polynomials with `f64` coefficients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub powers: Vec<u32>,
    pub coeff: f64,
}

/// A polynomial in `dim` variables. Terms are kept sorted by exponent
/// vector with like terms combined and zero coefficients dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Polynomial::from_terms(
            dim,
            vec![Monomial {
                powers: vec![0; dim],
                coeff: c,
            }],
        )
    }

    /// The coordinate function `x_axis` (zero-based).
    pub fn variable(dim: usize, axis: usize) -> Self {
        let mut powers = vec![0; dim];
        powers[axis] = 1;
        Polynomial::from_terms(dim, vec![Monomial { powers, coeff: 1.0 }])
    }

    /// Panics if a monomial has the wrong number of exponents.
    pub fn from_terms(dim: usize, terms: Vec<Monomial>) -> Self {
        let mut acc: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for t in terms {
            assert_eq!(t.powers.len(), dim, "monomial exponent count");
            *acc.entry(t.powers).or_insert(0.0) += t.coeff;
        }
        Polynomial {
            dim,
            terms: acc
                .into_iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|(powers, coeff)| Monomial { powers, coeff })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.powers.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for t in &self.terms {
            let mut v = t.coeff;
            for (xi, &e) in x.iter().zip(&t.powers) {
                if e != 0 {
                    v *= xi.powi(e as i32);
                }
            }
            total += v;
        }
        total
    }

    pub fn derivative(&self, axis: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.powers[axis] > 0)
            .map(|t| {
                let mut powers = t.powers.clone();
                let e = powers[axis];
                powers[axis] -= 1;
                Monomial {
                    powers,
                    coeff: t.coeff * e as f64,
                }
            })
            .collect();
        Polynomial::from_terms(self.dim, terms)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Polynomial::from_terms(self.dim, terms)
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|t| Monomial {
                powers: t.powers.clone(),
                coeff: t.coeff * c,
            })
            .collect();
        Polynomial::from_terms(self.dim, terms)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Monomial {
                    powers: a.powers.iter().zip(&b.powers).map(|(x, y)| x + y).collect(),
                    coeff: a.coeff * b.coeff,
                });
            }
        }
        Polynomial::from_terms(self.dim, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_evaluation() {
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let p = x
            .mul(&x)
            .add(&y.scale(3.0))
            .add(&Polynomial::constant(2, -1.0));
        assert_eq!(p.eval(&[2.0, 5.0]), 4.0 + 15.0 - 1.0);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.derivative(0), x.scale(2.0));
        assert_eq!(p.derivative(1), Polynomial::constant(2, 3.0));
        assert!(x.add(&x.scale(-1.0)).is_zero());
    }
}
