//! Alternating k-covectors on `R^n`.
//!
//! A [`Covector`] stores one coefficient per basis element
//! `dx_{i_1} ∧ … ∧ dx_{i_k}` with `i_1 < … < i_k`, in lexicographic order of
//! the index sets. Axes are zero-based in the Rust API: `dx1` is axis `0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{self, Estimate, RunningStats};
use crate::numerics::{binomial, combinations, determinant, gauss_legendre, sphere_area};

/// A strictly increasing list of zero-based axes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(axes: Vec<usize>, dim: usize) -> Result<Self> {
        if axes.len() > dim {
            return Err(Error::arg(format!(
                "multi-index {axes:?} longer than dimension {dim}"
            )));
        }
        if axes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg(format!(
                "multi-index {axes:?} is not strictly increasing"
            )));
        }
        if axes.iter().any(|&a| a >= dim) {
            return Err(Error::arg(format!(
                "multi-index {axes:?} out of range for dimension {dim}"
            )));
        }
        Ok(MultiIndex(axes))
    }

    pub fn axes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Position of this index among all `k`-subsets of `0..n` in lexicographic order.
    pub fn rank(&self, dim: usize) -> usize {
        let k = self.0.len();
        let mut rank = 0;
        let mut prev: usize = 0;
        for (i, &c) in self.0.iter().enumerate() {
            for j in prev..c {
                rank += binomial(dim - 1 - j, k - 1 - i);
            }
            prev = c + 1;
        }
        rank
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|a| format!("dx{}", a + 1)).collect();
        write!(f, "{}", parts.join("∧"))
    }
}

/// All basis multi-indices of degree `k` in `R^n`, in storage order.
pub fn basis_indices(dim: usize, degree: usize) -> Vec<MultiIndex> {
    combinations(dim, degree)
        .into_iter()
        .map(MultiIndex)
        .collect()
}

/// An alternating `degree`-linear functional on `R^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl Covector {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Covector {
            dim,
            degree,
            coeffs: vec![0.0; binomial(dim, degree)],
        }
    }

    /// A degree-0 covector, i.e. a scalar.
    pub fn scalar(dim: usize, value: f64) -> Self {
        Covector {
            dim,
            degree: 0,
            coeffs: vec![value],
        }
    }

    /// Build from coefficients listed in storage order (see [`basis_indices`]).
    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expect = binomial(dim, degree);
        if coeffs.len() != expect {
            return Err(Error::arg(format!(
                "expected {expect} coefficients for degree {degree} in R^{dim}, got {}",
                coeffs.len()
            )));
        }
        Ok(Covector {
            dim,
            degree,
            coeffs,
        })
    }

    /// The basis covector `dx_{axes[0]} ∧ …` (zero-based axes, strictly increasing).
    pub fn basis(dim: usize, axes: &[usize]) -> Result<Self> {
        let idx = MultiIndex::new(axes.to_vec(), dim)?;
        let mut c = Covector::zero(dim, axes.len());
        c.coeffs[idx.rank(dim)] = 1.0;
        Ok(c)
    }

    /// The 1-covector `Σ a_i dx_i`.
    pub fn from_linear(a: &[f64]) -> Self {
        Covector {
            dim: a.len(),
            degree: 1,
            coeffs: a.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: &MultiIndex) -> f64 {
        if idx.len() != self.degree {
            return 0.0;
        }
        self.coeffs[idx.rank(self.dim)]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Covector {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Covector) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Covector {
            dim: self.dim,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    fn check_same_space(&self, other: &Covector) -> Result<()> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::arg(format!(
                "covector spaces differ: (n={}, k={}) vs (n={}, k={})",
                self.dim, self.degree, other.dim, other.degree
            )));
        }
        Ok(())
    }

    /// `α(v_1, …, v_k) = Σ_I α_I det[v_j(I_l)]`.
    pub fn eval(&self, vectors: &[&[f64]]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::arg(format!(
                "degree-{} covector evaluated on {} vectors",
                self.degree,
                vectors.len()
            )));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.dim) {
            return Err(Error::arg(format!(
                "vector of length {} in R^{}",
                v.len(),
                self.dim
            )));
        }
        Ok(self.eval_unchecked(vectors))
    }

    pub(crate) fn eval_unchecked(&self, vectors: &[&[f64]]) -> f64 {
        eval_coeffs(self.dim, self.degree, &self.coeffs, vectors)
    }

    pub fn wedge(&self, other: &Covector) -> Result<Covector> {
        if self.dim != other.dim {
            return Err(Error::arg(format!(
                "wedge of covectors in R^{} and R^{}",
                self.dim, other.dim
            )));
        }
        let n = self.dim;
        let degree = self.degree + other.degree;
        let mut out = Covector::zero(n, degree);
        if degree > n {
            return Ok(out);
        }
        let left = basis_indices(n, self.degree);
        let right = basis_indices(n, other.degree);
        for (i, a) in left.iter().enumerate() {
            let ca = self.coeffs[i];
            if ca == 0.0 {
                continue;
            }
            for (j, b) in right.iter().enumerate() {
                let cb = other.coeffs[j];
                if cb == 0.0 {
                    continue;
                }
                if let Some((sign, merged)) = merge_indices(a.axes(), b.axes()) {
                    let idx = MultiIndex(merged);
                    out.coeffs[idx.rank(n)] += sign * ca * cb;
                }
            }
        }
        Ok(out)
    }

    /// `sqrt(Σ_I α_I²)`.
    pub fn euclidean_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// The sphere norm `(∫_{(S^{n-1})^k} |α(v_1,…,v_k)|^p)^{1/p}` with an error bar.
    pub fn sphere_norm(&self, cfg: &SphereNormConfig) -> Result<Estimate> {
        sphere_norm(self, cfg)
    }
}

/// Sign and sorted union of two disjoint index sets; `None` if they overlap.
pub(crate) fn merge_indices(a: &[usize], b: &[usize]) -> Option<(f64, Vec<usize>)> {
    let mut inversions = 0usize;
    for &x in a {
        for &y in b {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
    merged.sort_unstable();
    let sign = if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Some((sign, merged))
}

/// Minors `det[v_j(I_l)]` of the `k x n` matrix with rows `vectors`, one per basis index.
pub(crate) fn minors(dim: usize, degree: usize, vectors: &[&[f64]], out: &mut Vec<f64>) {
    out.clear();
    if degree == 0 {
        out.push(1.0);
        return;
    }
    let mut scratch = vec![0.0; degree * degree];
    for idx in combinations(dim, degree) {
        for (r, v) in vectors.iter().enumerate() {
            for (c, &axis) in idx.iter().enumerate() {
                scratch[r * degree + c] = v[axis];
            }
        }
        out.push(determinant(&mut scratch, degree));
    }
}

pub(crate) fn eval_coeffs(dim: usize, degree: usize, coeffs: &[f64], vectors: &[&[f64]]) -> f64 {
    match degree {
        0 => coeffs[0],
        1 => coeffs.iter().zip(vectors[0]).map(|(c, v)| c * v).sum(),
        _ => {
            let mut m = Vec::with_capacity(coeffs.len());
            minors(dim, degree, vectors, &mut m);
            coeffs.iter().zip(&m).map(|(c, d)| c * d).sum()
        }
    }
}

/// How the sphere integral is approximated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SphereMethod {
    /// Product rules per sphere factor: trapezoidal on the circle (`n = 2`),
    /// Gauss-Legendre in `cos(polar)` times trapezoidal in azimuth (`n = 3`).
    ProductQuadrature,
    /// Gaussian-normalized uniform directions.
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereNormConfig {
    pub p: f64,
    pub method: SphereMethod,
    /// Nodes per angular direction (quadrature) or total samples (Monte Carlo).
    pub nodes_or_samples: usize,
    pub seed: u64,
}

impl SphereNormConfig {
    /// Quadrature for `n <= 3`, Monte Carlo with `2^18` samples above.
    pub fn auto(dim: usize, degree: usize, p: f64) -> Self {
        match dim {
            0..=2 => SphereNormConfig {
                p,
                method: SphereMethod::ProductQuadrature,
                nodes_or_samples: if degree <= 1 { 256 } else { 96 },
                seed: 0,
            },
            3 => SphereNormConfig {
                p,
                method: SphereMethod::ProductQuadrature,
                nodes_or_samples: match degree {
                    0 | 1 => 64,
                    2 => 24,
                    _ => 12,
                },
                seed: 0,
            },
            _ => SphereNormConfig {
                p,
                method: SphereMethod::MonteCarlo,
                nodes_or_samples: 1 << 18,
                seed: 0x5EED,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::config(format!(
                "sphere norm needs p >= 1, got {}",
                self.p
            )));
        }
        if self.nodes_or_samples == 0 {
            return Err(Error::config(
                "sphere norm needs at least one node or sample",
            ));
        }
        Ok(())
    }
}

fn is_even_integer(p: f64) -> bool {
    p.fract() == 0.0 && (p as i64) % 2 == 0
}

/// Nodes and weights of a product rule on `S^{n-1}`, `m` nodes per angle.
fn sphere_rule(dim: usize, m: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    use std::f64::consts::PI;
    match dim {
        1 => Ok(vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)]),
        2 => Ok((0..m)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / m as f64;
                (vec![phi.cos(), phi.sin()], 2.0 * PI / m as f64)
            })
            .collect()),
        3 => {
            let mz = m.div_ceil(2).max(1);
            let (z, wz) = gauss_legendre(mz);
            let mut out = Vec::with_capacity(mz * m);
            for (zi, wi) in z.iter().zip(&wz) {
                let s = (1.0 - zi * zi).max(0.0).sqrt();
                for j in 0..m {
                    let phi = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    out.push((
                        vec![s * phi.cos(), s * phi.sin(), *zi],
                        wi * 2.0 * PI / m as f64,
                    ));
                }
            }
            Ok(out)
        }
        _ => Err(Error::config(format!(
            "no product quadrature on S^{} (use monte-carlo for n >= 4)",
            dim - 1
        ))),
    }
}

/// `∫_{(S^{n-1})^k} |α|^p` by a product rule over the `k` sphere factors.
fn product_integral(alpha: &Covector, p: f64, rule: &[(Vec<f64>, f64)]) -> f64 {
    let k = alpha.degree;
    let mut picks: Vec<usize> = vec![0; k];
    let mut total = 0.0;
    let m = rule.len();
    let mut vecs: Vec<&[f64]> = Vec::with_capacity(k);
    loop {
        vecs.clear();
        let mut w = 1.0;
        for &i in &picks {
            vecs.push(&rule[i].0);
            w *= rule[i].1;
        }
        let v = alpha.eval_unchecked(&vecs).abs();
        total += w * v.powf(p);
        let mut pos = 0;
        loop {
            if pos == k {
                return total;
            }
            picks[pos] += 1;
            if picks[pos] < m {
                break;
            }
            picks[pos] = 0;
            pos += 1;
        }
    }
}

pub fn sphere_norm(alpha: &Covector, cfg: &SphereNormConfig) -> Result<Estimate> {
    cfg.validate()?;
    let n = alpha.dim;
    let k = alpha.degree;
    if k == 0 {
        return Ok(Estimate::exact(alpha.coeffs[0].abs()));
    }
    if k > n || alpha.is_zero() {
        return Ok(Estimate::exact(0.0));
    }
    if k == n && n > 1 {
        // Top degree: one coefficient times the norm of the unit volume form.
        let c = alpha.coeffs[0].abs();
        let unit = Covector::basis(n, &(0..n).collect::<Vec<_>>())?;
        let est = sphere_norm_general(&unit, cfg)?;
        return Ok(Estimate {
            value: c * est.value,
            error: c * est.error,
            evaluations: est.evaluations,
        });
    }
    sphere_norm_general(alpha, cfg)
}

fn sphere_norm_general(alpha: &Covector, cfg: &SphereNormConfig) -> Result<Estimate> {
    let n = alpha.dim;
    let k = alpha.degree;
    let p = cfg.p;
    match cfg.method {
        SphereMethod::ProductQuadrature => {
            if n == 1 {
                let rule = sphere_rule(1, 2)?;
                let j = product_integral(alpha, p, &rule);
                return Ok(Estimate::exact(j.powf(1.0 / p)));
            }
            let m = cfg.nodes_or_samples.max(2);
            let fine = sphere_rule(n, m)?;
            let coarse = sphere_rule(n, (m / 2).max(1))?;
            let j_fine = product_integral(alpha, p, &fine);
            let j_coarse = product_integral(alpha, p, &coarse);
            let mut err = (j_fine - j_coarse).abs();
            if !is_even_integer(p) {
                err *= 10.0;
            }
            err = err.max(1e-14 * j_fine.abs());
            let evals = (fine.len() as u64).pow(k as u32);
            Ok(Estimate {
                value: j_fine,
                error: err,
                evaluations: evals,
            }
            .pth_root(p))
        }
        SphereMethod::MonteCarlo => {
            let total = cfg.nodes_or_samples as u64;
            let area = sphere_area(n).powi(k as i32);
            let shards = montecarlo::run_sharded(
                cfg.seed,
                total,
                montecarlo::DEFAULT_SHARDS,
                |_, rng, count| {
                    let mut stats = RunningStats::new();
                    let mut dirs = vec![vec![0.0; n]; k];
                    for _ in 0..count {
                        for d in dirs.iter_mut() {
                            montecarlo::unit_vector(rng, d);
                        }
                        let refs: Vec<&[f64]> = dirs.iter().map(|d| d.as_slice()).collect();
                        stats.push(area * alpha.eval_unchecked(&refs).abs().powf(p));
                    }
                    stats
                },
            );
            let mut stats = RunningStats::new();
            shards.iter().for_each(|s| stats.merge(s));
            Ok(Estimate {
                value: stats.mean,
                error: stats.std_error(),
                evaluations: total,
            }
            .pth_root(p))
        }
    }
}
