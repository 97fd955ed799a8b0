//! Differential forms on `R^n` as coefficient fields.
//!
//! A [`FormField`] of degree `k` assigns to each point the covector
//! `Σ_I ω_I(x) dx_I`. Three backends exist:
//!
//! * polynomial coefficients, with an exact symbolic exterior derivative;
//! * analytic coefficients given by a closure, optionally paired with a
//!   known derivative form;
//! * rough coefficients (closures with no derivative), optionally carrying
//!   the hyperplanes `x_axis = at` across which they jump.
//!
//! Closures must be pure: forms are evaluated concurrently from many threads.

mod mollifier;
mod polynomial;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::exterior::{
    basis_indices, merge_indices, minors, Covector, MultiIndex, SphereNormConfig,
};
use crate::montecarlo::{self, Estimate, RunningStats};
use crate::numerics::binomial;

pub use mollifier::Mollifier;
pub use polynomial::{Monomial, Polynomial};

/// Writes the coefficients at `x` (storage order) into the output slice.
pub type CoeffFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// A hyperplane `x_axis = at` across which rough coefficients may jump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakpoint {
    pub axis: usize,
    pub at: f64,
}

/// A jump term: adds `below` to the coefficient of `index` where
/// `x_axis < at` and `above` elsewhere. Axes are zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub index: Vec<usize>,
    pub axis: usize,
    pub at: f64,
    pub below: f64,
    pub above: f64,
}

#[derive(Clone)]
enum Backend {
    Polynomial(Arc<[Polynomial]>),
    Analytic {
        coeffs: CoeffFn,
        derivative: Option<Arc<FormField>>,
    },
    Rough {
        coeffs: CoeffFn,
        breakpoints: Vec<Breakpoint>,
        /// Present when built from polynomial and step parts; used for JSON.
        parts: Option<Arc<(Vec<Polynomial>, Vec<Step>)>>,
    },
}

#[derive(Clone)]
pub struct FormField {
    dim: usize,
    degree: usize,
    backend: Backend,
    support: Option<Arc<Domain>>,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let backend = match &self.backend {
            Backend::Polynomial(p) => format!("polynomial {p:?}"),
            Backend::Analytic { derivative, .. } => {
                format!("analytic (derivative known: {})", derivative.is_some())
            }
            Backend::Rough { breakpoints, .. } => format!("rough {breakpoints:?}"),
        };
        f.debug_struct("FormField")
            .field("dim", &self.dim)
            .field("degree", &self.degree)
            .field("backend", &backend)
            .field("support", &self.support.as_ref().map(|d| d.shape()))
            .finish()
    }
}

impl FormField {
    /// Coefficients listed in storage order (see [`basis_indices`]).
    pub fn polynomial(dim: usize, degree: usize, coeffs: Vec<Polynomial>) -> Result<Self> {
        if coeffs.len() != binomial(dim, degree) {
            return Err(Error::arg(format!(
                "degree-{degree} form in R^{dim} needs {} coefficients, got {}",
                binomial(dim, degree),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|p| p.dim() != dim) {
            return Err(Error::arg("coefficient polynomial in the wrong dimension"));
        }
        Ok(FormField {
            dim,
            degree,
            backend: Backend::Polynomial(coeffs.into()),
            support: None,
        })
    }

    /// `Σ p_I dx_I` from `(axes, p_I)` pairs; repeated indices are summed.
    pub fn from_terms(
        dim: usize,
        degree: usize,
        terms: Vec<(Vec<usize>, Polynomial)>,
    ) -> Result<Self> {
        let mut coeffs = vec![Polynomial::zero(dim); binomial(dim, degree)];
        for (axes, p) in terms {
            if axes.len() != degree {
                return Err(Error::arg(format!(
                    "term {axes:?} in a degree-{degree} form"
                )));
            }
            let idx = MultiIndex::new(axes, dim)?;
            let r = idx.rank(dim);
            coeffs[r] = coeffs[r].add(&p);
        }
        FormField::polynomial(dim, degree, coeffs)
    }

    /// A 0-form.
    pub fn scalar(p: Polynomial) -> Self {
        let dim = p.dim();
        FormField::polynomial(dim, 0, vec![p]).expect("one coefficient")
    }

    pub fn constant(alpha: &Covector) -> Self {
        let n = alpha.dim();
        let coeffs = alpha
            .coeffs()
            .iter()
            .map(|&c| Polynomial::constant(n, c))
            .collect();
        FormField::polynomial(n, alpha.degree(), coeffs).expect("matching coefficient count")
    }

    pub fn analytic(
        dim: usize,
        degree: usize,
        coeffs: CoeffFn,
        derivative: Option<FormField>,
    ) -> Result<Self> {
        if let Some(d) = &derivative {
            if d.dim != dim || d.degree != degree + 1 {
                return Err(Error::arg(
                    "derivative form has the wrong dimension or degree",
                ));
            }
        }
        Ok(FormField {
            dim,
            degree,
            backend: Backend::Analytic {
                coeffs,
                derivative: derivative.map(Arc::new),
            },
            support: None,
        })
    }

    pub fn rough(
        dim: usize,
        degree: usize,
        coeffs: CoeffFn,
        breakpoints: Vec<Breakpoint>,
    ) -> Result<Self> {
        if breakpoints.iter().any(|b| b.axis >= dim) {
            return Err(Error::arg("breakpoint axis out of range"));
        }
        Ok(FormField {
            dim,
            degree,
            backend: Backend::Rough {
                coeffs,
                breakpoints,
                parts: None,
            },
            support: None,
        })
    }

    /// Polynomial coefficients plus axis-aligned jump terms.
    pub fn piecewise(
        dim: usize,
        degree: usize,
        poly: Vec<Polynomial>,
        steps: Vec<Step>,
    ) -> Result<Self> {
        if steps.is_empty() {
            return FormField::polynomial(dim, degree, poly);
        }
        FormField::polynomial(dim, degree, poly.clone())?;
        let mut ranked = Vec::with_capacity(steps.len());
        for s in &steps {
            if s.index.len() != degree || s.axis >= dim {
                return Err(Error::arg(format!("invalid step term {s:?}")));
            }
            let r = MultiIndex::new(s.index.clone(), dim)?.rank(dim);
            ranked.push((r, s.axis, s.at, s.below, s.above));
        }
        let mut breakpoints: Vec<Breakpoint> = Vec::new();
        for s in &steps {
            let b = Breakpoint {
                axis: s.axis,
                at: s.at,
            };
            if !breakpoints.contains(&b) {
                breakpoints.push(b);
            }
        }
        let poly_arc: Arc<[Polynomial]> = poly.clone().into();
        let coeffs: CoeffFn = Arc::new(move |x: &[f64], out: &mut [f64]| {
            for (o, p) in out.iter_mut().zip(poly_arc.iter()) {
                *o = p.eval(x);
            }
            for &(r, axis, at, below, above) in &ranked {
                out[r] += if x[axis] < at { below } else { above };
            }
        });
        Ok(FormField {
            dim,
            degree,
            backend: Backend::Rough {
                coeffs,
                breakpoints,
                parts: Some(Arc::new((poly, steps))),
            },
            support: None,
        })
    }

    /// Zero-extend outside `domain`.
    pub fn with_support(mut self, domain: Domain) -> Result<Self> {
        if domain.dim() != self.dim {
            return Err(Error::arg(
                "support domain dimension differs from the form's",
            ));
        }
        self.support = Some(Arc::new(domain));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn support(&self) -> Option<&Domain> {
        self.support.as_deref()
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.backend, Backend::Polynomial(_))
    }

    pub fn is_rough(&self) -> bool {
        matches!(self.backend, Backend::Rough { .. })
    }

    pub fn has_exact_derivative(&self) -> bool {
        match &self.backend {
            Backend::Polynomial(_) => true,
            Backend::Analytic { derivative, .. } => derivative.is_some(),
            Backend::Rough { .. } => false,
        }
    }

    pub fn polynomial_coeffs(&self) -> Option<&[Polynomial]> {
        match &self.backend {
            Backend::Polynomial(p) => Some(p),
            _ => None,
        }
    }

    /// Jump hyperplanes of a rough form; `None` when they are unknown.
    pub fn breakpoints(&self) -> Option<&[Breakpoint]> {
        match &self.backend {
            Backend::Rough { breakpoints, .. } if !breakpoints.is_empty() => Some(breakpoints),
            _ => None,
        }
    }

    /// Highest total degree of the polynomial part, if there is one.
    pub fn polynomial_degree(&self) -> Option<u32> {
        match &self.backend {
            Backend::Polynomial(p) => Some(p.iter().map(|q| q.degree()).max().unwrap_or(0)),
            Backend::Rough {
                parts: Some(parts), ..
            } => Some(parts.0.iter().map(|q| q.degree()).max().unwrap_or(0)),
            _ => None,
        }
    }

    pub fn num_coeffs(&self) -> usize {
        binomial(self.dim, self.degree)
    }

    /// Coefficients at `x` into `out`; zeros outside the support.
    pub fn coeffs_into(&self, x: &[f64], out: &mut [f64]) {
        if let Some(s) = &self.support {
            if !s.contains(x) {
                out.iter_mut().for_each(|o| *o = 0.0);
                return;
            }
        }
        match &self.backend {
            Backend::Polynomial(p) => {
                for (o, q) in out.iter_mut().zip(p.iter()) {
                    *o = q.eval(x);
                }
            }
            Backend::Analytic { coeffs, .. } | Backend::Rough { coeffs, .. } => coeffs(x, out),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Covector> {
        if x.len() != self.dim {
            return Err(Error::arg(format!(
                "point of length {} for a form on R^{}",
                x.len(),
                self.dim
            )));
        }
        let mut c = vec![0.0; self.num_coeffs()];
        self.coeffs_into(x, &mut c);
        Covector::from_coeffs(self.dim, self.degree, c)
    }

    /// `dω`. Exact for polynomial forms; analytic forms return their
    /// attached derivative; rough forms are rejected.
    pub fn exterior_derivative(&self) -> Result<FormField> {
        let n = self.dim;
        let derived = match &self.backend {
            Backend::Polynomial(coeffs) => {
                let mut out = vec![Polynomial::zero(n); binomial(n, self.degree + 1)];
                for (idx, c) in basis_indices(n, self.degree).iter().zip(coeffs.iter()) {
                    if c.is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        if let Some((sign, merged)) = merge_indices(&[j], idx.axes()) {
                            let r = MultiIndex::new(merged, n)?.rank(n);
                            out[r] = out[r].add(&c.derivative(j).scale(sign));
                        }
                    }
                }
                FormField::polynomial(n, self.degree + 1, out)?
            }
            Backend::Analytic {
                derivative: Some(d),
                ..
            } => (**d).clone(),
            Backend::Analytic {
                derivative: None, ..
            } => {
                return Err(Error::Unsupported(
                    "analytic form has no attached exterior derivative".into(),
                ))
            }
            Backend::Rough { .. } => {
                return Err(Error::Unsupported(
                    "exterior derivative of a rough form is not computed".into(),
                ))
            }
        };
        Ok(FormField {
            support: self.support.clone(),
            ..derived
        })
    }

    /// `s ↦ ω_{φ(s)}(x_1 - x_0, …, x_k - x_0)` on the reference simplex.
    pub fn pullback_affine(&self, base: &[f64], edges: &[Vec<f64>]) -> Result<Pullback<'_>> {
        if edges.len() != self.degree {
            return Err(Error::arg(format!(
                "degree-{} form pulled back along {} edges",
                self.degree,
                edges.len()
            )));
        }
        if base.len() != self.dim || edges.iter().any(|e| e.len() != self.dim) {
            return Err(Error::arg("pullback points have the wrong dimension"));
        }
        let refs: Vec<&[f64]> = edges.iter().map(|e| e.as_slice()).collect();
        let mut m = Vec::new();
        minors(self.dim, self.degree, &refs, &mut m);
        Ok(Pullback {
            form: self,
            base: base.to_vec(),
            edges: edges.to_vec(),
            minors: m,
        })
    }

    /// Convolution with `eta`, coefficient-wise, by a tensor Gauss-Legendre
    /// rule with `nodes` points per axis on the kernel's bounding cube.
    pub fn mollify(&self, eta: &Mollifier, nodes: usize) -> Result<FormField> {
        mollifier::mollify(self, eta, nodes)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&FormDoc::from_field(self)?)?)
    }

    pub fn from_json(s: &str) -> Result<FormField> {
        let doc: FormDoc = serde_json::from_str(s)?;
        doc.to_field()
    }
}

/// See [`FormField::pullback_affine`].
pub struct Pullback<'a> {
    form: &'a FormField,
    base: Vec<f64>,
    edges: Vec<Vec<f64>>,
    minors: Vec<f64>,
}

impl Pullback<'_> {
    pub fn eval(&self, s: &[f64]) -> f64 {
        let mut x = self.base.clone();
        for (si, e) in s.iter().zip(&self.edges) {
            for (xj, ej) in x.iter_mut().zip(e) {
                *xj += si * ej;
            }
        }
        let mut c = vec![0.0; self.form.num_coeffs()];
        self.form.coeffs_into(&x, &mut c);
        c.iter().zip(&self.minors).map(|(a, b)| a * b).sum()
    }
}

/// JSON layout of a polynomial (or piecewise) form. Axes are one-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormDoc {
    pub n: usize,
    pub k: usize,
    pub terms: Vec<TermDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Domain>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub index: Vec<usize>,
    pub monomials: Vec<Monomial>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepDoc {
    pub index: Vec<usize>,
    pub axis: usize,
    pub at: f64,
    pub below: f64,
    pub above: f64,
}

fn zero_based(axes: &[usize]) -> Result<Vec<usize>> {
    axes.iter()
        .map(|&a| {
            a.checked_sub(1)
                .ok_or_else(|| Error::arg("form JSON axes are one-based"))
        })
        .collect()
}

impl FormDoc {
    pub fn to_field(&self) -> Result<FormField> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.monomials.iter().any(|m| m.powers.len() != self.n) {
                return Err(Error::arg(format!(
                    "monomial exponent list must have length {}",
                    self.n
                )));
            }
            terms.push((
                zero_based(&t.index)?,
                Polynomial::from_terms(self.n, t.monomials.clone()),
            ));
        }
        let poly = FormField::from_terms(self.n, self.k, terms)?;
        let steps = self
            .steps
            .iter()
            .map(|s| {
                Ok(Step {
                    index: zero_based(&s.index)?,
                    axis: s
                        .axis
                        .checked_sub(1)
                        .ok_or_else(|| Error::arg("step axis is one-based"))?,
                    at: s.at,
                    below: s.below,
                    above: s.above,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let coeffs = poly.polynomial_coeffs().expect("polynomial").to_vec();
        let field = FormField::piecewise(self.n, self.k, coeffs, steps)?;
        match &self.support {
            Some(d) => field.with_support(d.clone()),
            None => Ok(field),
        }
    }

    pub fn from_field(f: &FormField) -> Result<FormDoc> {
        let (poly, steps): (&[Polynomial], &[Step]) = match &f.backend {
            Backend::Polynomial(p) => (p, &[]),
            Backend::Rough {
                parts: Some(parts), ..
            } => (&parts.0, &parts.1),
            _ => {
                return Err(Error::Unsupported(
                    "only polynomial and piecewise forms serialize to JSON".into(),
                ))
            }
        };
        let terms = basis_indices(f.dim, f.degree)
            .iter()
            .zip(poly)
            .filter(|(_, p)| !p.is_zero())
            .map(|(idx, p)| TermDoc {
                index: idx.axes().iter().map(|a| a + 1).collect(),
                monomials: p.terms().to_vec(),
            })
            .collect();
        let steps = steps
            .iter()
            .map(|s| StepDoc {
                index: s.index.iter().map(|a| a + 1).collect(),
                axis: s.axis + 1,
                at: s.at,
                below: s.below,
                above: s.above,
            })
            .collect();
        Ok(FormDoc {
            n: f.dim,
            k: f.degree,
            terms,
            steps,
            support: f.support.as_deref().cloned(),
        })
    }
}

/// A random polynomial form: every coefficient gets every monomial of total
/// degree `<= max_degree` with a coefficient uniform in `[-1, 1]`.
pub fn random_polynomial_form<R: Rng + ?Sized>(
    dim: usize,
    degree: usize,
    max_degree: u32,
    rng: &mut R,
) -> FormField {
    let exps = exponents_up_to(dim, max_degree);
    let coeffs = (0..binomial(dim, degree))
        .map(|_| {
            let terms = exps
                .iter()
                .map(|e| Monomial {
                    powers: e.clone(),
                    coeff: rng.random_range(-1.0..=1.0),
                })
                .collect();
            Polynomial::from_terms(dim, terms)
        })
        .collect();
    FormField::polynomial(dim, degree, coeffs).expect("coefficient count matches")
}

fn exponents_up_to(dim: usize, max_degree: u32) -> Vec<Vec<u32>> {
    if dim == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for e in 0..=max_degree {
        for mut rest in exponents_up_to(dim - 1, max_degree - e) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

/// Sampling budget for spatial L^p estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpConfig {
    pub samples: u64,
    pub seed: u64,
    pub shards: u32,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            samples: 1 << 16,
            seed: 0x4c50,
            shards: montecarlo::DEFAULT_SHARDS,
        }
    }
}

fn check_lp(omega: &FormField, domain: &Domain, p: f64, cfg: &LpConfig) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::config(format!("L^p norm needs p >= 1, got {p}")));
    }
    if cfg.samples == 0 {
        return Err(Error::config("L^p estimate needs at least one sample"));
    }
    if domain.dim() != omega.dim() {
        return Err(Error::arg("domain and form dimensions differ"));
    }
    Ok(())
}

/// `(∫_Ω |ω_x|^p dx)^{1/p}` with `|·|` the Euclidean coefficient norm.
pub fn lp_norm(omega: &FormField, domain: &Domain, p: f64, cfg: &LpConfig) -> Result<Estimate> {
    check_lp(omega, domain, p, cfg)?;
    let vol = domain.volume();
    let n = omega.dim();
    let shards = montecarlo::run_sharded(cfg.seed, cfg.samples, cfg.shards, |_, rng, count| {
        let mut stats = RunningStats::new();
        let mut x = vec![0.0; n];
        let mut c = vec![0.0; omega.num_coeffs()];
        for _ in 0..count {
            domain.sample_into(rng, &mut x)?;
            omega.coeffs_into(&x, &mut c);
            let e = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            stats.push(vol * e.powf(p));
        }
        Ok::<_, Error>(stats)
    });
    finish_lp(shards, cfg.samples, p, 0.0)
}

/// `(∫_Ω |ω_x|_{S,p}^p dx)^{1/p}`. The error adds the spatial standard
/// error to the worst relative sphere-quadrature error.
pub fn lp_sphere_norm(
    omega: &FormField,
    domain: &Domain,
    p: f64,
    cfg: &LpConfig,
    sphere: &SphereNormConfig,
) -> Result<Estimate> {
    check_lp(omega, domain, p, cfg)?;
    if sphere.p != p {
        return Err(Error::config(
            "sphere-norm exponent differs from the L^p exponent",
        ));
    }
    let vol = domain.volume();
    let n = omega.dim();
    let k = omega.degree();
    let shards = montecarlo::run_sharded(cfg.seed, cfg.samples, cfg.shards, |_, rng, count| {
        let mut stats = RunningStats::new();
        let mut rel: f64 = 0.0;
        let mut x = vec![0.0; n];
        let mut c = vec![0.0; omega.num_coeffs()];
        let mut last: Option<(Vec<f64>, f64)> = None;
        for _ in 0..count {
            domain.sample_into(rng, &mut x)?;
            omega.coeffs_into(&x, &mut c);
            let s = match &last {
                Some((prev, v)) if *prev == c => *v,
                _ => {
                    let est = Covector::from_coeffs(n, k, c.clone())?.sphere_norm(sphere)?;
                    if est.value > 0.0 {
                        rel = rel.max(p * est.error / est.value);
                    }
                    last = Some((c.clone(), est.value));
                    est.value
                }
            };
            stats.push(vol * s.powf(p));
        }
        Ok::<_, Error>((stats, rel))
    });
    let mut rel: f64 = 0.0;
    let mut stats_only = Vec::with_capacity(shards.len());
    for s in shards {
        let (st, r) = s?;
        rel = rel.max(r);
        stats_only.push(Ok(st));
    }
    finish_lp(stats_only, cfg.samples, p, rel)
}

fn finish_lp(
    shards: Vec<Result<RunningStats>>,
    samples: u64,
    p: f64,
    rel_sys: f64,
) -> Result<Estimate> {
    let mut stats = RunningStats::new();
    for s in shards {
        stats.merge(&s?);
    }
    if !stats.mean.is_finite() {
        return Err(Error::NonFinite(
            "L^p integrand produced a non-finite value".into(),
        ));
    }
    Ok(Estimate {
        value: stats.mean,
        error: stats.std_error() + rel_sys * stats.mean.abs(),
        evaluations: samples,
    }
    .pth_root(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn x1dx2() -> FormField {
        FormField::from_terms(2, 1, vec![(vec![1], Polynomial::variable(2, 0))]).unwrap()
    }

    fn dx(n: usize, axes: &[usize]) -> FormField {
        FormField::constant(&Covector::basis(n, axes).unwrap())
    }

    #[test]
    fn evaluate_examples() {
        let w = x1dx2().evaluate(&[2.0, 5.0]).unwrap();
        assert_eq!(w, Covector::basis(2, &[1]).unwrap().scale(2.0));
        let s = x1dx2().with_support(Domain::unit_box(2)).unwrap();
        assert!(s.evaluate(&[3.0, 3.0]).unwrap().is_zero());
        assert_eq!(
            dx(2, &[0]).evaluate(&[-7.0, 0.3]).unwrap(),
            Covector::basis(2, &[0]).unwrap()
        );
        assert!(x1dx2().evaluate(&[1.0]).is_err());
    }

    #[test]
    fn exterior_derivative_examples() {
        let d = x1dx2().exterior_derivative().unwrap();
        assert_eq!(
            d.evaluate(&[0.3, 0.9]).unwrap(),
            Covector::basis(2, &[0, 1]).unwrap()
        );
        // f(x1) dx1 + g(x2) dx2 is closed.
        let f = Polynomial::from_terms(
            2,
            vec![Monomial {
                powers: vec![3, 0],
                coeff: 2.0,
            }],
        );
        let g = Polynomial::from_terms(
            2,
            vec![Monomial {
                powers: vec![0, 2],
                coeff: -1.0,
            }],
        );
        let w = FormField::from_terms(2, 1, vec![(vec![0], f), (vec![1], g)]).unwrap();
        let dw = w.exterior_derivative().unwrap();
        assert!(dw.polynomial_coeffs().unwrap().iter().all(|p| p.is_zero()));
    }

    #[test]
    fn derivative_signs_in_three_dimensions() {
        // d(x1 dx2∧dx3) = dx1∧dx2∧dx3, d(x2 dx1∧dx3) = -dx1∧dx2∧dx3.
        let a =
            FormField::from_terms(3, 2, vec![(vec![1, 2], Polynomial::variable(3, 0))]).unwrap();
        let b =
            FormField::from_terms(3, 2, vec![(vec![0, 2], Polynomial::variable(3, 1))]).unwrap();
        let x = [0.1, 0.2, 0.3];
        assert_eq!(
            a.exterior_derivative()
                .unwrap()
                .evaluate(&x)
                .unwrap()
                .coeffs(),
            &[1.0]
        );
        assert_eq!(
            b.exterior_derivative()
                .unwrap()
                .evaluate(&x)
                .unwrap()
                .coeffs(),
            &[-1.0]
        );
    }

    #[test]
    fn rough_forms_have_no_derivative() {
        let w = FormField::piecewise(
            2,
            1,
            vec![Polynomial::zero(2), Polynomial::zero(2)],
            vec![Step {
                index: vec![0],
                axis: 0,
                at: 0.5,
                below: -1.0,
                above: 1.0,
            }],
        )
        .unwrap();
        assert!(matches!(
            w.exterior_derivative(),
            Err(Error::Unsupported(_))
        ));
        assert_eq!(w.evaluate(&[0.2, 0.0]).unwrap().coeffs(), &[-1.0, 0.0]);
        assert_eq!(w.evaluate(&[0.7, 0.0]).unwrap().coeffs(), &[1.0, 0.0]);
        assert_eq!(w.breakpoints().unwrap(), &[Breakpoint { axis: 0, at: 0.5 }]);
    }

    #[test]
    fn pullback_examples() {
        let line = dx(2, &[0]);
        let pb = line
            .pullback_affine(&[0.0, 0.0], &[vec![1.0, 0.0]])
            .unwrap();
        assert_eq!(pb.eval(&[0.3]), 1.0);
        let area = dx(2, &[0, 1]);
        let pb = area
            .pullback_affine(&[0.0, 0.0], &[vec![1.0, 0.0], vec![0.0, 1.0]])
            .unwrap();
        assert_eq!(pb.eval(&[0.2, 0.2]), 1.0);
        let w = x1dx2();
        let pb = w.pullback_affine(&[0.0, 0.0], &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(pb.is_err());
        let f =
            FormField::from_terms(2, 2, vec![(vec![0, 1], Polynomial::variable(2, 0))]).unwrap();
        let pb = f
            .pullback_affine(&[0.0, 0.0], &[vec![1.0, 0.0], vec![0.0, 1.0]])
            .unwrap();
        assert_eq!(pb.eval(&[0.25, 0.5]), 0.25);
    }

    #[test]
    fn json_round_trip() {
        let src =
            r#"{"n":2,"k":1,"terms":[{"index":[2],"monomials":[{"powers":[1,0],"coeff":1.0}]}]}"#;
        let w = FormField::from_json(src).unwrap();
        assert_eq!(w.evaluate(&[2.0, 5.0]).unwrap().coeffs(), &[0.0, 2.0]);
        let back = FormField::from_json(&w.to_json().unwrap()).unwrap();
        assert_eq!(back.polynomial_coeffs(), w.polynomial_coeffs());
        let bad = r#"{"n":2,"k":1,"terms":[{"index":[0],"monomials":[]}]}"#;
        assert!(FormField::from_json(bad).is_err());
    }

    #[test]
    fn lp_norm_examples() {
        let sq = Domain::unit_box(2);
        let cfg = LpConfig::default();
        let a = lp_norm(&dx(2, &[0]), &sq, 2.0, &cfg).unwrap();
        assert!((a.value - 1.0).abs() < 1e-12);
        let b = lp_norm(&x1dx2(), &sq, 2.0, &cfg).unwrap();
        assert!(
            (b.value - (1.0f64 / 3.0).sqrt()).abs() < 4.0 * b.error,
            "{b:?}"
        );
        let z = FormField::constant(&Covector::zero(2, 1));
        assert_eq!(lp_norm(&z, &sq, 2.0, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn lp_sphere_norm_examples() {
        let sq = Domain::unit_box(2);
        let cfg = LpConfig {
            samples: 512,
            ..LpConfig::default()
        };
        let a = lp_sphere_norm(
            &dx(2, &[0]),
            &sq,
            2.0,
            &cfg,
            &SphereNormConfig::auto(2, 1, 2.0),
        )
        .unwrap();
        assert!((a.value - PI.sqrt()).abs() < 1e-10);
        let b = lp_sphere_norm(
            &dx(2, &[0, 1]),
            &sq,
            2.0,
            &cfg,
            &SphereNormConfig::auto(2, 2, 2.0),
        )
        .unwrap();
        assert!((b.value - PI * 2f64.sqrt()).abs() < 1e-10);
    }
}
