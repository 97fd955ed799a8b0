//! Integration over affine simplices.
//!
//! The oriented simplex `Δ(x_0, …, x_k)` is parameterized over the reference
//! simplex `Δ_k = {s ≥ 0, Σ s_i ≤ 1}` by `φ(s) = x_0 + Σ s_i (x_i - x_0)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exterior::minors;
use crate::forms::FormField;
use crate::montecarlo::{open_unit, shard_rng};
use crate::numerics::{determinant, factorial};

/// An ordered tuple of `k + 1` points; the order fixes the orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexTuple {
    points: Vec<Vec<f64>>,
}

impl SimplexTuple {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::arg("a simplex needs at least one point"));
        };
        let n = first.len();
        if points.iter().any(|p| p.len() != n) {
            return Err(Error::arg("simplex corners have different dimensions"));
        }
        if points.len() > n + 1 {
            return Err(Error::arg(format!(
                "{} corners do not span a simplex in R^{n}",
                points.len()
            )));
        }
        Ok(SimplexTuple { points })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Simplex dimension `k` (corners minus one).
    pub fn k(&self) -> usize {
        self.points.len() - 1
    }

    fn refs(&self) -> Vec<&[f64]> {
        self.points.iter().map(|p| p.as_slice()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    GrundmannMoller { degree: u32 },
    MonteCarlo { samples: usize, seed: u64 },
}

/// Nodes and weights on `Δ_k`; weights sum to `1/k!`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexRule {
    kind: RuleKind,
    k: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// All `β ∈ N^parts` with `|β| = total`.
fn compositions(parts: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(parts - 1, total - first, prefix, out);
        prefix.pop();
    }
}

impl SimplexRule {
    /// Grundmann-Möller rule exact for polynomials of total degree
    /// `<= degree` (even degrees are rounded up to the next odd one).
    pub fn grundmann_moller(k: usize, degree: u32) -> Result<Self> {
        let s = (degree / 2) as usize;
        let d = 2 * s + 1;
        if k == 0 {
            return Ok(SimplexRule::point(RuleKind::GrundmannMoller {
                degree: d as u32,
            }));
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for i in 0..=s {
            let denom = (d + k - 2 * i) as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * 2f64.powi(-2 * s as i32) * denom.powi(d as i32)
                / (factorial(i) * factorial(d + k - i));
            let mut betas = Vec::new();
            compositions(k + 1, s - i, &mut Vec::new(), &mut betas);
            for beta in betas {
                // Barycentric coordinates; drop the one attached to x_0.
                for b in &beta[1..] {
                    nodes.push((2 * b + 1) as f64 / denom);
                }
                weights.push(w);
            }
        }
        Ok(SimplexRule {
            kind: RuleKind::GrundmannMoller { degree: d as u32 },
            k,
            nodes,
            weights,
        })
    }

    /// Equal-weight rule on `samples` fixed uniform points of `Δ_k`, drawn
    /// as sorted-uniform spacings.
    pub fn monte_carlo(k: usize, samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::arg("Monte Carlo simplex rule needs samples >= 1"));
        }
        let kind = RuleKind::MonteCarlo { samples, seed };
        if k == 0 {
            return Ok(SimplexRule::point(kind));
        }
        let mut rng = shard_rng(seed, 0);
        let mut nodes = Vec::with_capacity(samples * k);
        let mut u = vec![0.0; k];
        for _ in 0..samples {
            sample_reference(&mut rng, &mut u);
            nodes.extend_from_slice(&u);
        }
        let w = 1.0 / (samples as f64 * factorial(k));
        Ok(SimplexRule {
            kind,
            k,
            nodes,
            weights: vec![w; samples],
        })
    }

    /// Grundmann-Möller of degree `max(7, polynomial degree)` for smooth and
    /// piecewise forms; Monte Carlo with 1024 points for rough forms whose
    /// jumps cannot be split out.
    pub fn default_for(omega: &FormField) -> Result<Self> {
        let k = omega.degree();
        if omega.is_rough() && (omega.breakpoints().is_none() || k >= 2) {
            return SimplexRule::monte_carlo(k, 1024, 0x5349_4d50);
        }
        let degree = omega.polynomial_degree().unwrap_or(7).max(7);
        SimplexRule::grundmann_moller(k, degree)
    }

    fn point(kind: RuleKind) -> Self {
        SimplexRule {
            kind,
            k: 0,
            nodes: Vec::new(),
            weights: vec![1.0],
        }
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.k..(i + 1) * self.k]
    }

    /// `∫_{Δ_k} f`.
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        (0..self.len())
            .map(|i| self.weights[i] * f(self.node(i)))
            .sum()
    }
}

/// Uniform point of `Δ_k` from `k` sorted uniforms.
pub fn sample_reference<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for o in out.iter_mut() {
        *o = open_unit(rng);
    }
    out.sort_unstable_by(f64::total_cmp);
    let mut prev = 0.0;
    for o in out.iter_mut() {
        let v = *o;
        *o = v - prev;
        prev = v;
    }
}

/// `sqrt(det G)` with `G_ij = <x_i - x_0, x_j - x_0>`.
pub fn gram_jacobian(simplex: &SimplexTuple) -> f64 {
    gram_jacobian_of(&simplex.refs())
}

fn gram_jacobian_of(points: &[&[f64]]) -> f64 {
    let k = points.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let x0 = points[0];
    let edges: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(x0).map(|(a, b)| a - b).collect())
        .collect();
    let mut g = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            g[i * k + j] = edges[i].iter().zip(&edges[j]).map(|(a, b)| a * b).sum();
        }
    }
    determinant(&mut g, k).max(0.0).sqrt()
}

/// Reusable buffers for repeated simplex integrals.
#[derive(Default)]
pub(crate) struct Scratch {
    x: Vec<f64>,
    c: Vec<f64>,
    minors: Vec<f64>,
    edges: Vec<f64>,
    cuts: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

/// `∫_{Δ(points)} ω = ∫_{Δ_k} φ*ω`.
pub fn integrate_form(
    omega: &FormField,
    simplex: &SimplexTuple,
    rule: &SimplexRule,
) -> Result<f64> {
    check_form(omega, simplex.dim(), simplex.k(), rule)?;
    Ok(integrate_form_unchecked(
        omega,
        &simplex.refs(),
        rule,
        &mut Scratch::default(),
    ))
}

pub(crate) fn check_form(
    omega: &FormField,
    dim: usize,
    k: usize,
    rule: &SimplexRule,
) -> Result<()> {
    if omega.dim() != dim {
        return Err(Error::arg(format!(
            "form on R^{} integrated over a simplex in R^{dim}",
            omega.dim()
        )));
    }
    if omega.degree() != k || rule.k != k {
        return Err(Error::arg(format!(
            "degree-{} form, {k}-simplex, rule for Δ_{}",
            omega.degree(),
            rule.k
        )));
    }
    Ok(())
}

pub(crate) fn integrate_form_unchecked(
    omega: &FormField,
    points: &[&[f64]],
    rule: &SimplexRule,
    sc: &mut Scratch,
) -> f64 {
    let k = points.len() - 1;
    sc.c.resize(omega.num_coeffs(), 0.0);
    if k == 0 {
        omega.coeffs_into(points[0], &mut sc.c);
        return sc.c[0];
    }
    if k == 1 {
        if let Some(bps) = omega.breakpoints() {
            return integrate_segment_split(omega, points[0], points[1], bps, rule, sc);
        }
    }
    integrate_plain(omega, points, rule, sc)
}

fn integrate_plain(
    omega: &FormField,
    points: &[&[f64]],
    rule: &SimplexRule,
    sc: &mut Scratch,
) -> f64 {
    let n = omega.dim();
    let k = points.len() - 1;
    let x0 = points[0];
    sc.edges.clear();
    for p in &points[1..] {
        sc.edges.extend(p.iter().zip(x0).map(|(a, b)| a - b));
    }
    {
        let edge_refs: Vec<&[f64]> = sc.edges.chunks(n).collect();
        minors(n, k, &edge_refs, &mut sc.minors);
    }
    if sc.minors.iter().all(|&m| m == 0.0) {
        return 0.0;
    }
    sc.x.resize(n, 0.0);
    let mut total = 0.0;
    for q in 0..rule.len() {
        let s = rule.node(q);
        sc.x.copy_from_slice(x0);
        for (i, si) in s.iter().enumerate() {
            let e = &sc.edges[i * n..(i + 1) * n];
            for (xj, ej) in sc.x.iter_mut().zip(e) {
                *xj += si * ej;
            }
        }
        omega.coeffs_into(&sc.x, &mut sc.c);
        let v: f64 = sc.c.iter().zip(&sc.minors).map(|(a, b)| a * b).sum();
        total += rule.weights[q] * v;
    }
    total
}

/// Split a segment where it crosses jump hyperplanes so every piece sees
/// smooth coefficients.
fn integrate_segment_split(
    omega: &FormField,
    a: &[f64],
    b: &[f64],
    bps: &[crate::forms::Breakpoint],
    rule: &SimplexRule,
    sc: &mut Scratch,
) -> f64 {
    sc.cuts.clear();
    sc.cuts.push(0.0);
    for bp in bps {
        let (u, v) = (a[bp.axis], b[bp.axis]);
        if u != v {
            let t = (bp.at - u) / (v - u);
            if t > 0.0 && t < 1.0 {
                sc.cuts.push(t);
            }
        }
    }
    sc.cuts.push(1.0);
    sc.cuts.sort_unstable_by(f64::total_cmp);
    let cuts = std::mem::take(&mut sc.cuts);
    let mut pa = std::mem::take(&mut sc.a);
    let mut pb = std::mem::take(&mut sc.b);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        pa.clear();
        pb.clear();
        pa.extend(a.iter().zip(b).map(|(x, y)| x + w[0] * (y - x)));
        pb.extend(a.iter().zip(b).map(|(x, y)| x + w[1] * (y - x)));
        total += integrate_plain(omega, &[&pa, &pb], rule, sc);
    }
    sc.cuts = cuts;
    sc.a = pa;
    sc.b = pb;
    total
}

/// `∫_Δ ρ dH^k = ∫_{Δ_k} ρ(φ(s)) J dm_k`, unsigned.
pub fn integrate_scalar(
    rho: impl Fn(&[f64]) -> f64,
    simplex: &SimplexTuple,
    rule: &SimplexRule,
) -> Result<f64> {
    if rule.k != simplex.k() {
        return Err(Error::arg("rule and simplex dimensions differ"));
    }
    let jac = gram_jacobian(simplex);
    let pts = simplex.points();
    let n = simplex.dim();
    let mut x = vec![0.0; n];
    let v = rule.integrate(|s| {
        x.copy_from_slice(&pts[0]);
        for (i, si) in s.iter().enumerate() {
            for j in 0..n {
                x[j] += si * (pts[i + 1][j] - pts[0][j]);
            }
        }
        rho(&x)
    });
    Ok(v * jac)
}
