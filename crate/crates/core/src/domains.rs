//! Bounded open regions of `R^n`.
//!
//! Every domain is an open set: boundary points are not members. A
//! [`Domain`] caches its bounding box, diameter and volume at construction.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{open_unit, shard_rng};
use crate::numerics::{ball_volume, combinations, distance, dot, norm, solve};

/// `normal · x < offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", content = "params", rename_all = "kebab-case")]
pub enum Shape {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    AxisBox {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    ConvexPolytope {
        halfspaces: Vec<Halfspace>,
    },
    Annulus {
        center: Vec<f64>,
        r_in: f64,
        r_out: f64,
    },
    /// The box minus the closed `delta`-neighbourhood of an axis-aligned
    /// segment. With `delta = 0` only the segment itself is removed.
    SlitBox {
        lo: Vec<f64>,
        hi: Vec<f64>,
        slit_from: Vec<f64>,
        slit_to: Vec<f64>,
        #[serde(default)]
        delta: f64,
    },
    /// `outer` minus the closure of `inner`; both must be convex shapes.
    SetDifference {
        outer: Box<Shape>,
        inner: Box<Shape>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Shape", into = "Shape")]
pub struct Domain {
    shape: Shape,
    dim: usize,
    bbox_lo: Vec<f64>,
    bbox_hi: Vec<f64>,
    diameter: f64,
    volume: f64,
    /// Polytope vertices (empty for other shapes).
    vertices: Vec<Vec<f64>>,
}

impl TryFrom<Shape> for Domain {
    type Error = Error;

    fn try_from(shape: Shape) -> Result<Self> {
        Domain::new(shape)
    }
}

impl From<Domain> for Shape {
    fn from(d: Domain) -> Shape {
        d.shape
    }
}

const VOLUME_SAMPLES: u64 = 1 << 20;
const VOLUME_SEED: u64 = 0x766f_6c75_6d65;
const MAX_REJECTIONS: u64 = 100_000;

impl Domain {
    pub fn new(shape: Shape) -> Result<Self> {
        let dim = validate(&shape)?;
        let vertices = match &shape {
            Shape::ConvexPolytope { halfspaces } => polytope_vertices(halfspaces, dim),
            _ => Vec::new(),
        };
        let (bbox_lo, bbox_hi) = bounding_box(&shape, &vertices, dim)?;
        let diameter = match &shape {
            Shape::ConvexPolytope { .. } => max_pair_distance(&vertices),
            Shape::SetDifference { outer, .. } => Domain::new((**outer).clone())?.diameter,
            _ => distance(&bbox_lo, &bbox_hi).min(match &shape {
                Shape::Ball { radius, .. } => 2.0 * radius,
                Shape::Annulus { r_out, .. } => 2.0 * r_out,
                _ => f64::INFINITY,
            }),
        };
        let mut domain = Domain {
            shape,
            dim,
            bbox_lo,
            bbox_hi,
            diameter,
            volume: 0.0,
            vertices,
        };
        domain.volume = domain.compute_volume();
        if !(domain.volume > 0.0) {
            return Err(Error::EmptyDomain(format!(
                "{:?} has no interior",
                domain.shape
            )));
        }
        Ok(domain)
    }

    pub fn unit_box(dim: usize) -> Self {
        Domain::new(Shape::AxisBox {
            lo: vec![0.0; dim],
            hi: vec![1.0; dim],
        })
        .expect("unit box is valid")
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Domain::new(Shape::Ball { center, radius })
    }

    pub fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Domain::new(Shape::AxisBox { lo, hi })
    }

    pub fn annulus(center: Vec<f64>, r_in: f64, r_out: f64) -> Result<Self> {
        Domain::new(Shape::Annulus {
            center,
            r_in,
            r_out,
        })
    }

    pub fn polytope(halfspaces: Vec<Halfspace>) -> Result<Self> {
        Domain::new(Shape::ConvexPolytope { halfspaces })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.bbox_lo, &self.bbox_hi)
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Lebesgue measure. Closed form where one exists, otherwise a fixed-seed
    /// Monte Carlo estimate with relative error around `1e-3`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn is_convex(&self) -> bool {
        matches!(
            self.shape,
            Shape::Ball { .. } | Shape::AxisBox { .. } | Shape::ConvexPolytope { .. }
        )
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && shape_contains(&self.shape, x)
    }

    /// Euclidean distance from `x` to the boundary; `0` for points outside.
    pub fn dist_to_boundary(&self, x: &[f64]) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        interior_distance(&self.shape, x)
    }

    /// Whether the convex hull of `points` lies in the domain. Exact for
    /// convex shapes (all corners inside); `None` otherwise.
    pub fn contains_hull(&self, points: &[&[f64]]) -> Option<bool> {
        if self.is_convex() {
            Some(points.iter().all(|p| self.contains(p)))
        } else {
            None
        }
    }

    /// The inset `{x : dist(x, ∂Ω) > eps}` of a ball, box or convex polytope.
    pub fn shrink(&self, eps: f64) -> Result<Domain> {
        if !(eps >= 0.0) {
            return Err(Error::arg(format!(
                "shrink distance must be >= 0, got {eps}"
            )));
        }
        let empty = || Error::EmptyDomain(format!("shrinking by {eps} leaves nothing"));
        match &self.shape {
            Shape::Ball { center, radius } => {
                if eps >= *radius {
                    return Err(empty());
                }
                Domain::ball(center.clone(), radius - eps)
            }
            Shape::AxisBox { lo, hi } => {
                if lo.iter().zip(hi).any(|(l, h)| 2.0 * eps >= h - l) {
                    return Err(empty());
                }
                Domain::axis_box(
                    lo.iter().map(|l| l + eps).collect(),
                    hi.iter().map(|h| h - eps).collect(),
                )
            }
            Shape::ConvexPolytope { halfspaces } => {
                let inset: Vec<Halfspace> = halfspaces
                    .iter()
                    .map(|h| Halfspace {
                        normal: h.normal.clone(),
                        offset: h.offset - eps * norm(&h.normal),
                    })
                    .collect();
                let verts = polytope_vertices(&inset, self.dim);
                if verts.is_empty() {
                    return Err(empty());
                }
                let centroid = centroid(&verts);
                if !inset
                    .iter()
                    .all(|h| dot(&h.normal, &centroid) < h.offset - 1e-12)
                {
                    return Err(empty());
                }
                Domain::polytope(inset)
            }
            other => Err(Error::Unsupported(format!(
                "shrink is only defined for balls, boxes and convex polytopes, not {}",
                shape_name(other)
            ))),
        }
    }

    /// Draw one point uniformly by rejection from the bounding box.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> Result<u64> {
        for trial in 1..=MAX_REJECTIONS {
            for (j, o) in out.iter_mut().enumerate() {
                let u = open_unit(rng);
                *o = self.bbox_lo[j] + u * (self.bbox_hi[j] - self.bbox_lo[j]);
            }
            if shape_contains(&self.shape, out) {
                return Ok(trial);
            }
        }
        Err(Error::Inefficient {
            acceptance: 0.0,
            draws: MAX_REJECTIONS,
            detail: "no point accepted from the bounding box".into(),
        })
    }

    /// `count` i.i.d. uniform points, deterministic in `seed`.
    pub fn sample_uniform(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = shard_rng(seed, 0);
        let mut draws = 0u64;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut x = vec![0.0; self.dim];
            draws += self.sample_into(&mut rng, &mut x)?;
            out.push(x);
        }
        if count > 0 {
            let acceptance = count as f64 / draws as f64;
            if acceptance < 1e-3 {
                return Err(Error::Inefficient {
                    acceptance,
                    draws,
                    detail: format!("rejection sampling of {}", shape_name(&self.shape)),
                });
            }
        }
        Ok(out)
    }

    fn compute_volume(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => ball_volume(self.dim) * radius.powi(self.dim as i32),
            Shape::AxisBox { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).product(),
            Shape::Annulus { r_in, r_out, .. } => {
                let n = self.dim as i32;
                ball_volume(self.dim) * (r_out.powi(n) - r_in.powi(n))
            }
            Shape::SlitBox { lo, hi, delta, .. } if *delta == 0.0 => {
                lo.iter().zip(hi).map(|(l, h)| h - l).product()
            }
            Shape::ConvexPolytope { .. } if self.dim == 2 => polygon_area(&self.vertices),
            _ => {
                let mut rng = shard_rng(VOLUME_SEED, 0);
                let mut hits = 0u64;
                let mut x = vec![0.0; self.dim];
                for _ in 0..VOLUME_SAMPLES {
                    for (j, o) in x.iter_mut().enumerate() {
                        *o = self.bbox_lo[j]
                            + open_unit(&mut rng) * (self.bbox_hi[j] - self.bbox_lo[j]);
                    }
                    if shape_contains(&self.shape, &x) {
                        hits += 1;
                    }
                }
                let bbox: f64 = self
                    .bbox_lo
                    .iter()
                    .zip(&self.bbox_hi)
                    .map(|(l, h)| h - l)
                    .product();
                bbox * hits as f64 / VOLUME_SAMPLES as f64
            }
        }
    }
}

fn shape_name(shape: &Shape) -> &'static str {
    match shape {
        Shape::Ball { .. } => "ball",
        Shape::AxisBox { .. } => "axis-box",
        Shape::ConvexPolytope { .. } => "convex-polytope",
        Shape::Annulus { .. } => "annulus",
        Shape::SlitBox { .. } => "slit-box",
        Shape::SetDifference { .. } => "set-difference",
    }
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn validate(shape: &Shape) -> Result<usize> {
    let bad = |msg: String| Err(Error::config(msg));
    match shape {
        Shape::Ball { center, radius } => {
            if center.is_empty() || !finite(center) || !(*radius > 0.0) || !radius.is_finite() {
                return bad(format!("invalid ball: center {center:?}, radius {radius}"));
            }
            Ok(center.len())
        }
        Shape::AxisBox { lo, hi } => {
            if lo.is_empty() || lo.len() != hi.len() || !finite(lo) || !finite(hi) {
                return bad(format!("invalid box corners {lo:?}, {hi:?}"));
            }
            if lo.iter().zip(hi).any(|(l, h)| l >= h) {
                return bad(format!("box needs lo < hi on every axis: {lo:?}, {hi:?}"));
            }
            Ok(lo.len())
        }
        Shape::ConvexPolytope { halfspaces } => {
            let dim = halfspaces.first().map(|h| h.normal.len()).unwrap_or(0);
            if dim == 0 {
                return bad("polytope needs at least one halfspace".into());
            }
            for h in halfspaces {
                if h.normal.len() != dim || !finite(&h.normal) || !h.offset.is_finite() {
                    return bad(format!("invalid halfspace {h:?}"));
                }
                if norm(&h.normal) == 0.0 {
                    return bad("halfspace with zero normal".into());
                }
            }
            if !polytope_bounded(halfspaces, dim) {
                return bad("polytope is unbounded".into());
            }
            Ok(dim)
        }
        Shape::Annulus {
            center,
            r_in,
            r_out,
        } => {
            if center.is_empty()
                || !finite(center)
                || !(*r_in >= 0.0)
                || !(r_out > r_in)
                || !r_out.is_finite()
            {
                return bad(format!("invalid annulus: radii {r_in}, {r_out}"));
            }
            Ok(center.len())
        }
        Shape::SlitBox {
            lo,
            hi,
            slit_from,
            slit_to,
            delta,
        } => {
            let dim = validate(&Shape::AxisBox {
                lo: lo.clone(),
                hi: hi.clone(),
            })?;
            if slit_from.len() != dim
                || slit_to.len() != dim
                || !finite(slit_from)
                || !finite(slit_to)
            {
                return bad("slit endpoints must match the box dimension".into());
            }
            let moving = slit_from
                .iter()
                .zip(slit_to)
                .filter(|(a, b)| a != b)
                .count();
            if moving > 1 {
                return bad("slit must be axis-aligned".into());
            }
            if !(*delta >= 0.0) || !delta.is_finite() {
                return bad(format!("slit thickness must be >= 0, got {delta}"));
            }
            Ok(dim)
        }
        Shape::SetDifference { outer, inner } => {
            for s in [outer, inner] {
                if !matches!(
                    **s,
                    Shape::Ball { .. } | Shape::AxisBox { .. } | Shape::ConvexPolytope { .. }
                ) {
                    return bad(format!(
                        "set-difference operands must be convex, got {}",
                        shape_name(s)
                    ));
                }
            }
            let d1 = validate(outer)?;
            let d2 = validate(inner)?;
            if d1 != d2 {
                return bad(format!("set-difference of dimensions {d1} and {d2}"));
            }
            Ok(d1)
        }
    }
}

fn shape_contains(shape: &Shape, x: &[f64]) -> bool {
    match shape {
        Shape::Ball { center, radius } => distance(x, center) < *radius,
        Shape::AxisBox { lo, hi } => x
            .iter()
            .zip(lo.iter().zip(hi))
            .all(|(v, (l, h))| l < v && v < h),
        Shape::ConvexPolytope { halfspaces } => {
            halfspaces.iter().all(|h| dot(&h.normal, x) < h.offset)
        }
        Shape::Annulus {
            center,
            r_in,
            r_out,
        } => {
            let r = distance(x, center);
            *r_in < r && r < *r_out
        }
        Shape::SlitBox {
            lo,
            hi,
            slit_from,
            slit_to,
            delta,
        } => {
            x.iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| l < v && v < h)
                && segment_distance(x, slit_from, slit_to) > *delta
        }
        Shape::SetDifference { outer, inner } => {
            shape_contains(outer, x) && exterior_distance(inner, x) > 0.0
        }
    }
}

/// Distance to the boundary for a point known to be inside.
fn interior_distance(shape: &Shape, x: &[f64]) -> f64 {
    match shape {
        Shape::Ball { center, radius } => radius - distance(x, center),
        Shape::AxisBox { lo, hi } => x
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(v, (l, h))| (v - l).min(h - v))
            .fold(f64::INFINITY, f64::min),
        Shape::ConvexPolytope { halfspaces } => halfspaces
            .iter()
            .map(|h| (h.offset - dot(&h.normal, x)) / norm(&h.normal))
            .fold(f64::INFINITY, f64::min),
        Shape::Annulus {
            center,
            r_in,
            r_out,
        } => {
            let r = distance(x, center);
            (r_out - r).min(r - r_in)
        }
        Shape::SlitBox {
            lo,
            hi,
            slit_from,
            slit_to,
            delta,
        } => {
            let boxd = interior_distance(
                &Shape::AxisBox {
                    lo: lo.clone(),
                    hi: hi.clone(),
                },
                x,
            );
            boxd.min(segment_distance(x, slit_from, slit_to) - delta)
        }
        Shape::SetDifference { outer, inner } => {
            interior_distance(outer, x).min(exterior_distance(inner, x))
        }
    }
}

/// Distance from `x` to a convex shape (`0` inside).
fn exterior_distance(shape: &Shape, x: &[f64]) -> f64 {
    match shape {
        Shape::Ball { center, radius } => (distance(x, center) - radius).max(0.0),
        Shape::AxisBox { lo, hi } => x
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(v, (l, h))| {
                let d = (l - v).max(v - h).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt(),
        Shape::ConvexPolytope { halfspaces } => polytope_exterior_distance(halfspaces, x),
        _ => unreachable!("exterior distance is only used for convex operands"),
    }
}

fn segment_distance(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(p, q)| q - p).collect();
    let len2 = dot(&ab, &ab);
    let t = if len2 == 0.0 {
        0.0
    } else {
        let ax: Vec<f64> = a.iter().zip(x).map(|(p, q)| q - p).collect();
        (dot(&ax, &ab) / len2).clamp(0.0, 1.0)
    };
    let proj: Vec<f64> = a.iter().zip(&ab).map(|(p, d)| p + t * d).collect();
    distance(x, &proj)
}

fn feasible(halfspaces: &[Halfspace], y: &[f64]) -> bool {
    halfspaces.iter().all(|h| {
        let scale = norm(&h.normal) * (1.0 + norm(y)) + h.offset.abs();
        dot(&h.normal, y) <= h.offset + 1e-10 * scale
    })
}

/// Closest point of `{a_i · y = b_i, i ∈ active}` to `x`.
fn project_affine(halfspaces: &[Halfspace], active: &[usize], x: &[f64]) -> Option<Vec<f64>> {
    let m = active.len();
    let mut gram = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            gram[r * m + c] = dot(&halfspaces[i].normal, &halfspaces[j].normal);
        }
        rhs[r] = dot(&halfspaces[i].normal, x) - halfspaces[i].offset;
    }
    let lambda = solve(&gram, &rhs, m)?;
    let mut y = x.to_vec();
    for (r, &i) in active.iter().enumerate() {
        for (yj, aj) in y.iter_mut().zip(&halfspaces[i].normal) {
            *yj -= lambda[r] * aj;
        }
    }
    Some(y)
}

/// Exact distance to a polytope by enumerating active constraint sets.
fn polytope_exterior_distance(halfspaces: &[Halfspace], x: &[f64]) -> f64 {
    if feasible(halfspaces, x) && halfspaces.iter().all(|h| dot(&h.normal, x) <= h.offset) {
        return 0.0;
    }
    let n = x.len();
    let mut best = f64::INFINITY;
    for size in 1..=n.min(halfspaces.len()) {
        for active in combinations(halfspaces.len(), size) {
            if let Some(y) = project_affine(halfspaces, &active, x) {
                if feasible(halfspaces, &y) {
                    best = best.min(distance(x, &y));
                }
            }
        }
    }
    best
}

fn polytope_vertices(halfspaces: &[Halfspace], dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for active in combinations(halfspaces.len(), dim) {
        let mut a = Vec::with_capacity(dim * dim);
        let mut b = Vec::with_capacity(dim);
        for &i in &active {
            a.extend_from_slice(&halfspaces[i].normal);
            b.push(halfspaces[i].offset);
        }
        if let Some(v) = solve(&a, &b, dim) {
            if feasible(halfspaces, &v) && !out.iter().any(|w| distance(w, &v) < 1e-12) {
                out.push(v);
            }
        }
    }
    out
}

/// Bounded iff the recession cone `{d : a_i · d <= 0}` is trivial.
fn polytope_bounded(halfspaces: &[Halfspace], dim: usize) -> bool {
    for rows in combinations(halfspaces.len(), dim.saturating_sub(1)) {
        // Generalized cross product spans the null space of the chosen rows.
        let mut d = vec![0.0; dim];
        for (j, dj) in d.iter_mut().enumerate() {
            let m = dim - 1;
            let mut minor = Vec::with_capacity(m * m);
            for &r in &rows {
                for (c, v) in halfspaces[r].normal.iter().enumerate() {
                    if c != j {
                        minor.push(*v);
                    }
                }
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *dj = sign * crate::numerics::determinant(&mut minor, m);
        }
        let scale = norm(&d);
        if scale == 0.0 {
            continue;
        }
        for s in [1.0, -1.0] {
            if halfspaces
                .iter()
                .all(|h| s * dot(&h.normal, &d) <= 1e-12 * scale * norm(&h.normal))
            {
                return false;
            }
        }
    }
    // A rank-deficient system contains a line.
    let mut gram = vec![0.0; dim * dim];
    for h in halfspaces {
        for r in 0..dim {
            for c in 0..dim {
                gram[r * dim + c] += h.normal[r] * h.normal[c];
            }
        }
    }
    crate::numerics::determinant(&mut gram, dim).abs() > 1e-12
}

fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points[0].len();
    let mut c = vec![0.0; n];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi;
        }
    }
    c.iter_mut().for_each(|v| *v /= points.len() as f64);
    c
}

fn max_pair_distance(points: &[Vec<f64>]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max(distance(a, b));
        }
    }
    best
}

fn polygon_area(vertices: &[Vec<f64>]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let c = centroid(vertices);
    let mut sorted: Vec<&Vec<f64>> = vertices.iter().collect();
    sorted.sort_by(|a, b| {
        let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
        let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
        ta.total_cmp(&tb)
    });
    let mut area = 0.0;
    for i in 0..sorted.len() {
        let (p, q) = (sorted[i], sorted[(i + 1) % sorted.len()]);
        area += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * area.abs()
}

fn bounding_box(shape: &Shape, vertices: &[Vec<f64>], dim: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok(match shape {
        Shape::Ball { center, radius } => (
            center.iter().map(|c| c - radius).collect(),
            center.iter().map(|c| c + radius).collect(),
        ),
        Shape::Annulus { center, r_out, .. } => (
            center.iter().map(|c| c - r_out).collect(),
            center.iter().map(|c| c + r_out).collect(),
        ),
        Shape::AxisBox { lo, hi } | Shape::SlitBox { lo, hi, .. } => (lo.clone(), hi.clone()),
        Shape::ConvexPolytope { .. } => {
            if vertices.is_empty() {
                return Err(Error::EmptyDomain("polytope has no vertices".into()));
            }
            let mut lo = vec![f64::INFINITY; dim];
            let mut hi = vec![f64::NEG_INFINITY; dim];
            for v in vertices {
                for j in 0..dim {
                    lo[j] = lo[j].min(v[j]);
                    hi[j] = hi[j].max(v[j]);
                }
            }
            (lo, hi)
        }
        Shape::SetDifference { outer, .. } => {
            let d = Domain::new((**outer).clone())?;
            (d.bbox_lo, d.bbox_hi)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Domain {
        Domain::unit_box(2)
    }

    fn triangle() -> Domain {
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
        .unwrap()
    }

    #[test]
    fn membership_examples() {
        let b = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(b.contains(&[0.0, 0.0]));
        assert!(!b.contains(&[1.0, 0.0]));
        let a = Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap();
        assert!(a.contains(&[0.75, 0.0]));
        assert!(!a.contains(&[0.25, 0.0]));
    }

    #[test]
    fn boundary_distance_examples() {
        assert_eq!(square().dist_to_boundary(&[0.5, 0.5]), 0.5);
        let b = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(b.dist_to_boundary(&[0.25, 0.0]), 0.75);
        assert_eq!(square().dist_to_boundary(&[2.0, 0.5]), 0.0);
        let t = triangle();
        let d = t.dist_to_boundary(&[0.25, 0.25]);
        assert!((d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn diameters() {
        assert!((square().diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Domain::ball(vec![0.0; 3], 0.5).unwrap().diameter(), 1.0);
        assert_eq!(
            Domain::annulus(vec![0.0, 0.0], 0.5, 1.0)
                .unwrap()
                .diameter(),
            2.0
        );
        assert!((triangle().diameter() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn volumes() {
        assert!((triangle().volume() - 0.5).abs() < 1e-15);
        let a = Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap();
        assert!((a.volume() - 0.75 * std::f64::consts::PI).abs() < 1e-14);
        let diff = Domain::new(Shape::SetDifference {
            outer: Box::new(Shape::AxisBox {
                lo: vec![0.0, 0.0],
                hi: vec![2.0, 2.0],
            }),
            inner: Box::new(Shape::AxisBox {
                lo: vec![0.5, 0.5],
                hi: vec![1.5, 1.5],
            }),
        })
        .unwrap();
        assert!((diff.volume() - 3.0).abs() < 0.02, "{}", diff.volume());
    }

    #[test]
    fn shrink_examples() {
        let s = square().shrink(0.1).unwrap();
        assert_eq!(s.bounding_box(), (&[0.1, 0.1][..], &[0.9, 0.9][..]));
        let b = Domain::ball(vec![0.0, 0.0], 1.0)
            .unwrap()
            .shrink(0.25)
            .unwrap();
        assert_eq!(
            b.shape(),
            &Shape::Ball {
                center: vec![0.0, 0.0],
                radius: 0.75
            }
        );
        assert!(matches!(square().shrink(0.5), Err(Error::EmptyDomain(_))));
        let a = Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap();
        assert!(matches!(a.shrink(0.1), Err(Error::Unsupported(_))));
        assert!(matches!(triangle().shrink(0.4), Err(Error::EmptyDomain(_))));
        assert!(triangle().shrink(0.1).unwrap().is_convex());
    }

    #[test]
    fn slit_box_removes_segment() {
        let d = Domain::new(Shape::SlitBox {
            lo: vec![-1.0, -1.0],
            hi: vec![1.0, 1.0],
            slit_from: vec![0.0, 0.0],
            slit_to: vec![1.0, 0.0],
            delta: 0.0,
        })
        .unwrap();
        assert!(!d.contains(&[0.5, 0.0]));
        assert!(d.contains(&[-0.5, 0.0]));
        assert!((d.dist_to_boundary(&[0.5, 0.1]) - 0.1).abs() < 1e-15);
        assert!(!d.is_convex());
        assert_eq!(d.volume(), 4.0);
    }

    #[test]
    fn unbounded_polytope_rejected() {
        let r = Domain::polytope(vec![
            Halfspace {
                normal: vec![-1.0, 0.0],
                offset: 0.0,
            },
            Halfspace {
                normal: vec![0.0, -1.0],
                offset: 0.0,
            },
        ]);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn polytope_exterior_distance_hits_vertices_and_faces() {
        let t = triangle();
        let hs = match t.shape() {
            Shape::ConvexPolytope { halfspaces } => halfspaces.clone(),
            _ => unreachable!(),
        };
        assert!((polytope_exterior_distance(&hs, &[-1.0, -1.0]) - 2f64.sqrt()).abs() < 1e-14);
        assert!((polytope_exterior_distance(&hs, &[0.5, -0.5]) - 0.5).abs() < 1e-14);
        assert!((polytope_exterior_distance(&hs, &[1.0, 1.0]) - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn uniform_sampling() {
        let pts = square().sample_uniform(10_000, 5).unwrap();
        for j in 0..2 {
            let mean: f64 = pts.iter().map(|p| p[j]).sum::<f64>() / pts.len() as f64;
            assert!((mean - 0.5).abs() < 0.015);
        }
        assert_eq!(pts, square().sample_uniform(10_000, 5).unwrap());
        let a = Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap();
        for p in a.sample_uniform(2000, 9).unwrap() {
            let r = norm(&p);
            assert!(0.5 < r && r < 1.0);
        }
    }

    #[test]
    fn json_round_trip() {
        let a = Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"shape":"annulus","params":{"center":[0.0,0.0],"r_in":0.5,"r_out":1.0}}"#
        );
        let back: Domain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let bad = serde_json::from_str::<Domain>(
            r#"{"shape":"ball","params":{"center":[0.0],"radius":-1.0}}"#,
        );
        assert!(bad.is_err());
    }
}
