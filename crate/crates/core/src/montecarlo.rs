//! Seeded, shard-deterministic Monte Carlo plumbing.
//!
//! Every estimator splits its sample budget into a fixed number of shards.
//! Shard `i` draws from a ChaCha8 stream selected by `(seed, i)`, so the final
//! value depends only on the seed and the shard count, never on how rayon
//! schedules the shards.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Default shard count used when a config does not specify one.
pub const DEFAULT_SHARDS: u32 = 8;

/// The RNG for shard `shard` of a run seeded with `seed`.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Uniform draw from the open interval `(0, 1)`.
#[inline]
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Uniform direction on `S^{n-1}` by normalizing a standard Gaussian vector.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut s = 0.0;
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
            s += *x * *x;
        }
        if s > 1e-300 {
            let inv = 1.0 / s.sqrt();
            out.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

/// Split `total` samples across `shards`; earlier shards absorb the remainder.
pub fn shard_sizes(total: u64, shards: u32) -> Vec<u64> {
    let shards = shards.max(1) as u64;
    let base = total / shards;
    let rem = total % shards;
    (0..shards).map(|i| base + u64::from(i < rem)).collect()
}

/// Streaming mean/variance (Welford), mergeable across shards (Chan et al.).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunningStats {
    pub count: u64,
    pub mean: f64,
    m2: f64,
    /// Largest single observation seen.
    pub max: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        if self.count == 1 || x > self.max {
            self.max = x;
        }
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n1 = self.count as f64;
        let n2 = other.count as f64;
        let n = n1 + n2;
        let delta = other.mean - self.mean;
        self.mean += delta * n2 / n;
        self.m2 += other.m2 + delta * delta * n1 * n2 / n;
        self.count += other.count;
        self.max = self.max.max(other.max);
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count as f64 - 1.0)).max(0.0)
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    pub fn sum(&self) -> f64 {
        self.mean * self.count as f64
    }
}

/// Run `work(shard_index, shard_rng, shard_size)` over all shards in parallel
/// and return the per-shard results in shard order.
pub fn run_sharded<T, F>(seed: u64, total: u64, shards: u32, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng, u64) -> T + Sync,
{
    let sizes = shard_sizes(total, shards);
    sizes
        .par_iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut rng = shard_rng(seed, i as u64);
            work(i as u64, &mut rng, n)
        })
        .collect()
}

/// A scalar estimate with an error bar: a standard error for Monte Carlo,
/// a conservative truncation bound for deterministic quadrature.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Integrand evaluations (quadrature nodes or Monte Carlo samples).
    pub evaluations: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            error: 0.0,
            evaluations: 0,
        }
    }

    /// Convert an estimate of `J = ∫ g` into one of `J^{1/p}` by the delta method.
    pub fn pth_root(self, p: f64) -> Self {
        let value = self.value.max(0.0).powf(1.0 / p);
        let error = if value > 0.0 {
            self.error / (p * value.powf(p - 1.0))
        } else {
            self.error.max(0.0).powf(1.0 / p)
        };
        Estimate {
            value,
            error,
            evaluations: self.evaluations,
        }
    }
}
