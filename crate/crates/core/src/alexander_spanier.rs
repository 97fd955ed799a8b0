//! Multifunctions `F : Ω^{k+1} → R` and the Alexander-Spanier differential.
//!
//! A [`Multifunction`] is a small expression tree whose leaves are user
//! closures or simplicial integrals `I_ω`, combined by linear combination
//! and by `(dF)(x_0, …, x_{k+1}) = Σ_i (-1)^i F(…, x̂_i, …)`.
//!
//! Evaluation goes through an [`EvalContext`] that memoizes values per
//! `(node, face)` within one top-level call, so `d(dF)` reuses each
//! codimension-two face and cancels exactly.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::FormField;
use crate::simplex::{self, Scratch, SimplexRule};

/// Maximum tuple length; faces are tracked as bitmasks.
pub const MAX_ARITY: usize = 16;

pub type Evaluator = Arc<dyn Fn(&[&[f64]]) -> f64 + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    IntegrationOfForm,
    DifferentialOf,
    LinearCombination,
    User,
}

enum Node {
    User(Evaluator),
    Integration { omega: FormField, rule: SimplexRule },
    Differential(Multifunction),
    Linear(Vec<(f64, Multifunction)>),
}

#[derive(Clone)]
pub struct Multifunction {
    dim: usize,
    arity: usize,
    id: u64,
    node: Arc<Node>,
}

impl std::fmt::Debug for Multifunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Multifunction")
            .field("dim", &self.dim)
            .field("arity", &self.arity)
            .field("provenance", &self.provenance())
            .finish()
    }
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn check_arity(arity: usize) -> Result<()> {
    if arity == 0 || arity > MAX_ARITY {
        return Err(Error::arg(format!(
            "arity must be in 1..={MAX_ARITY}, got {arity}"
        )));
    }
    Ok(())
}

impl Multifunction {
    fn build(dim: usize, arity: usize, node: Node) -> Result<Self> {
        check_arity(arity)?;
        Ok(Multifunction {
            dim,
            arity,
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            node: Arc::new(node),
        })
    }

    /// Wrap a pure closure of `arity` points in `R^dim`.
    pub fn user(dim: usize, arity: usize, f: Evaluator) -> Result<Self> {
        Multifunction::build(dim, arity, Node::User(f))
    }

    /// `I_ω(x_0, …, x_k) = ∫_{Δ(x_0, …, x_k)} ω`. Uses
    /// [`SimplexRule::default_for`] when `rule` is `None`.
    pub fn integration(omega: &FormField, rule: Option<SimplexRule>) -> Result<Self> {
        let rule = match rule {
            Some(r) => r,
            None => SimplexRule::default_for(omega)?,
        };
        if rule.k() != omega.degree() {
            return Err(Error::arg(
                "simplex rule dimension differs from the form degree",
            ));
        }
        Multifunction::build(
            omega.dim(),
            omega.degree() + 1,
            Node::Integration {
                omega: omega.clone(),
                rule,
            },
        )
    }

    /// The Alexander-Spanier differential, of arity one more.
    pub fn differential(&self) -> Result<Self> {
        Multifunction::build(self.dim, self.arity + 1, Node::Differential(self.clone()))
    }

    /// `Σ c_j F_j`; all terms must share dimension and arity.
    pub fn linear_combination(terms: &[(f64, &Multifunction)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::arg("empty linear combination"));
        };
        if terms
            .iter()
            .any(|(_, f)| f.dim != first.dim || f.arity != first.arity)
        {
            return Err(Error::arg(
                "linear combination of mismatched multifunctions",
            ));
        }
        let parts = terms.iter().map(|(c, f)| (*c, (*f).clone())).collect();
        Multifunction::build(first.dim, first.arity, Node::Linear(parts))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `k` for a map on `Ω^{k+1}`.
    pub fn degree(&self) -> usize {
        self.arity - 1
    }

    pub fn provenance(&self) -> Provenance {
        match &*self.node {
            Node::User(_) => Provenance::User,
            Node::Integration { .. } => Provenance::IntegrationOfForm,
            Node::Differential(_) => Provenance::DifferentialOf,
            Node::Linear(_) => Provenance::LinearCombination,
        }
    }

    /// The form behind an integration multifunction.
    pub fn form(&self) -> Option<&FormField> {
        match &*self.node {
            Node::Integration { omega, .. } => Some(omega),
            _ => None,
        }
    }

    pub fn evaluate(&self, points: &[&[f64]]) -> Result<f64> {
        EvalContext::new().evaluate(self, points)
    }
}

/// `dF`.
pub fn as_differential(f: &Multifunction) -> Result<Multifunction> {
    f.differential()
}

/// `I_ω` with the default rule for `ω`.
pub fn integration_multifunction(omega: &FormField) -> Result<Multifunction> {
    Multifunction::integration(omega, None)
}

/// Per-thread evaluation state: face memo and quadrature buffers.
#[derive(Default)]
pub struct EvalContext {
    memo: Vec<(u64, u32, f64)>,
    scratch: Scratch,
}

impl EvalContext {
    pub fn new() -> Self {
        EvalContext::default()
    }

    pub fn evaluate(&mut self, f: &Multifunction, points: &[&[f64]]) -> Result<f64> {
        if points.len() != f.arity {
            return Err(Error::arg(format!(
                "multifunction of arity {} evaluated on {} points",
                f.arity,
                points.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| p.len() != f.dim) {
            return Err(Error::arg(format!(
                "point of length {} in R^{}",
                p.len(),
                f.dim
            )));
        }
        let v = self.eval_unchecked(f, points);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("{f:?} evaluated to {v}")))
        }
    }

    /// Evaluate without shape checks; non-finite values are returned as-is.
    pub(crate) fn eval_unchecked(&mut self, f: &Multifunction, points: &[&[f64]]) -> f64 {
        self.memo.clear();
        let mask = (1u32 << points.len()) - 1;
        self.eval_mask(f, points, mask)
    }

    fn eval_mask(&mut self, f: &Multifunction, top: &[&[f64]], mask: u32) -> f64 {
        if let Some(&(_, _, v)) = self
            .memo
            .iter()
            .find(|(id, m, _)| *id == f.id && *m == mask)
        {
            return v;
        }
        let v = match &*f.node {
            Node::User(eval) => {
                let (buf, len) = gather(top, mask);
                eval(&buf[..len])
            }
            Node::Integration { omega, rule } => {
                let (buf, len) = gather(top, mask);
                simplex::integrate_form_unchecked(omega, &buf[..len], rule, &mut self.scratch)
            }
            Node::Differential(inner) => {
                let mut total = 0.0;
                let mut sign = 1.0;
                let mut rest = mask;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    rest &= rest - 1;
                    total += sign * self.eval_mask(inner, top, mask & !bit);
                    sign = -sign;
                }
                total
            }
            Node::Linear(parts) => parts
                .iter()
                .map(|(c, g)| c * self.eval_mask(g, top, mask))
                .sum(),
        };
        self.memo.push((f.id, mask, v));
        v
    }
}

fn gather<'a>(top: &[&'a [f64]], mask: u32) -> ([&'a [f64]; MAX_ARITY], usize) {
    let mut buf: [&[f64]; MAX_ARITY] = [&[]; MAX_ARITY];
    let mut len = 0;
    for (i, p) in top.iter().enumerate() {
        if mask & (1 << i) != 0 {
            buf[len] = p;
            len += 1;
        }
    }
    (buf, len)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Contained,
    NotContained,
    /// The support is not convex, so hull containment was not decided.
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StokesResidual {
    /// `|dI_ω - I_{dω}|`.
    pub residual: f64,
    pub d_of_integral: f64,
    pub integral_of_d: f64,
    pub containment: Containment,
}

/// Compare `dI_ω` with `I_{dω}` on a tuple of `k + 2` points.
pub fn stokes_residual(
    omega: &FormField,
    tuple: &[&[f64]],
    rule: Option<SimplexRule>,
) -> Result<StokesResidual> {
    let d_omega = omega.exterior_derivative()?;
    let lhs = Multifunction::integration(omega, rule)?
        .differential()?
        .evaluate(tuple)?;
    let rhs = integration_multifunction(&d_omega)?.evaluate(tuple)?;
    let containment = match omega.support() {
        None => Containment::Contained,
        Some(d) => match d.contains_hull(tuple) {
            Some(true) => Containment::Contained,
            Some(false) => Containment::NotContained,
            None => Containment::Unknown,
        },
    };
    Ok(StokesResidual {
        residual: (lhs - rhs).abs(),
        d_of_integral: lhs,
        integral_of_d: rhs,
        containment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::Domain;
    use crate::exterior::Covector;
    use crate::forms::{Monomial, Polynomial};

    fn x1dx2() -> FormField {
        FormField::from_terms(2, 1, vec![(vec![1], Polynomial::variable(2, 0))]).unwrap()
    }

    #[test]
    fn integration_examples() {
        let dx1 = FormField::constant(&Covector::basis(2, &[0]).unwrap());
        let i = integration_multifunction(&dx1).unwrap();
        assert_eq!(i.provenance(), Provenance::IntegrationOfForm);
        assert!((i.evaluate(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap() - 1.0).abs() < 1e-15);

        let f = Polynomial::from_terms(
            2,
            vec![Monomial {
                powers: vec![2, 1],
                coeff: 3.0,
            }],
        );
        let i_f = integration_multifunction(&FormField::scalar(f.clone())).unwrap();
        assert_eq!(i_f.evaluate(&[&[0.5, 2.0]]).unwrap(), f.eval(&[0.5, 2.0]));

        let i = integration_multifunction(&x1dx2()).unwrap();
        assert_eq!(i.evaluate(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap(), 0.0);
    }

    #[test]
    fn differential_examples() {
        let f = Polynomial::from_terms(
            2,
            vec![Monomial {
                powers: vec![1, 2],
                coeff: 1.5,
            }],
        );
        let d = integration_multifunction(&FormField::scalar(f.clone()))
            .unwrap()
            .differential()
            .unwrap();
        let (x, y) = ([0.2, 0.7], [0.9, -0.4]);
        assert_eq!(d.evaluate(&[&x, &y]).unwrap(), f.eval(&y) - f.eval(&x));

        let d = integration_multifunction(&x1dx2())
            .unwrap()
            .differential()
            .unwrap();
        let v = d
            .evaluate(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]])
            .unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dd_vanishes_to_rounding() {
        let g = Multifunction::user(
            2,
            2,
            Arc::new(|p: &[&[f64]]| (p[0][0] * p[1][1]).sin() + p[1][0]),
        )
        .unwrap();
        let dd = g.differential().unwrap().differential().unwrap();
        let pts: [&[f64]; 4] = [&[0.1, 0.2], &[0.3, -0.5], &[0.9, 0.4], &[-0.2, 0.8]];
        assert!(dd.evaluate(&pts).unwrap().abs() < 1e-15);
    }

    #[test]
    fn linear_combination_distributes() {
        let a = Multifunction::user(1, 1, Arc::new(|p: &[&[f64]]| p[0][0] * p[0][0])).unwrap();
        let b = Multifunction::user(1, 1, Arc::new(|p: &[&[f64]]| p[0][0].exp())).unwrap();
        let c = Multifunction::linear_combination(&[(2.0, &a), (-3.0, &b)]).unwrap();
        let (x, y): (&[f64], &[f64]) = (&[0.3], &[1.1]);
        let lhs = c.differential().unwrap().evaluate(&[x, y]).unwrap();
        let rhs = 2.0 * a.differential().unwrap().evaluate(&[x, y]).unwrap()
            - 3.0 * b.differential().unwrap().evaluate(&[x, y]).unwrap();
        assert!((lhs - rhs).abs() < 1e-14);
        assert!(Multifunction::linear_combination(&[]).is_err());
    }

    #[test]
    fn stokes_examples() {
        let r = stokes_residual(&x1dx2(), &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]], None).unwrap();
        assert!(r.residual < 1e-12);
        assert_eq!(r.containment, Containment::Contained);

        let truncated = x1dx2().with_support(Domain::unit_box(2)).unwrap();
        let r =
            stokes_residual(&truncated, &[&[0.5, 0.5], &[1.5, 0.5], &[0.5, 1.5]], None).unwrap();
        assert_eq!(r.containment, Containment::NotContained);
        assert!(r.residual > 1e-3, "{r:?}");

        let ring = x1dx2()
            .with_support(Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap())
            .unwrap();
        let r = stokes_residual(&ring, &[&[0.6, 0.0], &[0.7, 0.1], &[0.6, 0.2]], None).unwrap();
        assert_eq!(r.containment, Containment::Unknown);
    }

    #[test]
    fn arity_is_checked() {
        let i = integration_multifunction(&x1dx2()).unwrap();
        assert!(matches!(
            i.evaluate(&[&[0.0, 0.0]]),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            i.evaluate(&[&[0.0], &[1.0]]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn non_finite_values_are_errors() {
        let g = Multifunction::user(1, 1, Arc::new(|_: &[&[f64]]| f64::NAN)).unwrap();
        assert!(matches!(g.evaluate(&[&[0.0]]), Err(Error::NonFinite(_))));
    }
}
