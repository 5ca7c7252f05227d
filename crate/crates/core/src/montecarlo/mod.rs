//! Reproducible, chunked Monte Carlo over random states.
//!
//! Work is split into chunks of `chunk_size` draws. Chunk `k` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `k`, so results depend
//! only on `(seed, samples, chunk_size)`: chunk results are collected in
//! order and merged sequentially whether they ran serially or on rayon.

mod compare;
mod histogram;

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::{DensityMatrix, Dims};
use crate::samplers::{sample_state_with, MeasureSpec, SpectrumSampler};
use crate::simplex::SpectrumPoint;
use crate::stats::student_t_critical;
use crate::{Error, Result};

pub use compare::{compare_to_density, compare_to_density_conditional, BinComparison, DensityComparison, MIN_EXPECTED};
pub use histogram::Histogram;

pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 14;
pub const DEFAULT_BINS: usize = 200;

/// How many draws to make and how to split them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunPlan {
    pub samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
    pub parallel: bool,
}

impl RunPlan {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            chunk_size: DEFAULT_CHUNK_SIZE,
            parallel: true,
        }
    }

    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Precondition("at least one sample is required".into()));
        }
        if self.chunk_size == 0 {
            return Err(Error::Precondition("chunk size must be positive".into()));
        }
        Ok(())
    }

    fn chunks(&self) -> Vec<(u64, u64)> {
        let n = self.samples.div_ceil(self.chunk_size);
        (0..n)
            .map(|k| (k, self.chunk_size.min(self.samples - k * self.chunk_size)))
            .collect()
    }

    /// Runs `work(rng, count)` per chunk and returns the results in chunk order.
    fn map_chunks<T, F>(&self, work: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng, u64) -> Result<T> + Sync,
    {
        self.validate()?;
        let run = |&(k, count): &(u64, u64)| {
            let mut rng = chunk_rng(self.seed, k);
            work(&mut rng, count)
        };
        let chunks = self.chunks();
        if self.parallel {
            chunks.par_iter().map(run).collect()
        } else {
            chunks.iter().map(run).collect()
        }
    }
}

/// Generator for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// A scalar computed from each sampled state.
#[derive(Clone)]
pub enum Statistic {
    ParticipationRatio,
    MaxEigenvalue,
    Custom(Arc<dyn Fn(&DensityMatrix) -> f64 + Send + Sync>),
}

impl Statistic {
    /// Unitarily invariant statistics need only the spectrum.
    fn of_spectrum(&self, p: &SpectrumPoint) -> Option<f64> {
        match self {
            Statistic::ParticipationRatio => Some(p.participation_ratio()),
            Statistic::MaxEigenvalue => Some(p.max_eigenvalue()),
            Statistic::Custom(_) => None,
        }
    }

    /// Full range the statistic can take in dimension `dim`.
    pub fn natural_range(&self, dim: usize) -> Option<(f64, f64)> {
        match self {
            Statistic::ParticipationRatio => Some((1.0, dim as f64)),
            Statistic::MaxEigenvalue => Some((1.0 / dim as f64, 1.0)),
            Statistic::Custom(_) => None,
        }
    }
}

impl fmt::Debug for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::ParticipationRatio => f.write_str("ParticipationRatio"),
            Statistic::MaxEigenvalue => f.write_str("MaxEigenvalue"),
            Statistic::Custom(_) => f.write_str("Custom"),
        }
    }
}

fn prepare(measure: &MeasureSpec, dims: Dims) -> Result<SpectrumSampler> {
    SpectrumSampler::new(measure.clone(), dims.total())
}

/// Histogram of `statistic` over `bins` uniform bins on `[lo, hi]`.
pub fn run_histogram(
    measure: &MeasureSpec,
    dims: Dims,
    statistic: &Statistic,
    range: (f64, f64),
    bins: usize,
    plan: &RunPlan,
) -> Result<Histogram> {
    let sampler = prepare(measure, dims)?;
    let template = Histogram::uniform(range.0, range.1, bins)?;
    let parts = plan.map_chunks(|rng, count| {
        let mut h = template.empty_like();
        for _ in 0..count {
            let p = sampler.sample(rng)?;
            let x = match statistic.of_spectrum(&p) {
                Some(x) => x,
                None => {
                    let Statistic::Custom(f) = statistic else { unreachable!() };
                    let u = crate::linalg::haar_unitary(dims.total(), rng)?;
                    f(&crate::linalg::compose_state(&u, &p.lambdas, dims)?)
                }
            };
            h.add(x);
        }
        Ok(h)
    })?;
    let mut out = template.empty_like();
    for h in &parts {
        out.merge(h)?;
    }
    Ok(out)
}

/// Mean with a two-sided Student-t confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub mean: f64,
    /// Population standard deviation `σ_x` of the draws.
    pub std_dev: f64,
    pub samples: u64,
    pub confidence: f64,
    /// `t_{M−1, α/2} σ_x / √(M−1)`.
    pub half_width: f64,
}

impl EstimateWithCI {
    pub fn from_moments(mean: f64, std_dev: f64, samples: u64, alpha: f64) -> Result<Self> {
        if samples < 2 {
            return Err(Error::Precondition("a confidence interval needs at least two samples".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("α = {alpha} outside (0, 1)")));
        }
        let dof = (samples - 1) as f64;
        let half_width = student_t_critical(alpha, dof) * std_dev / dof.sqrt();
        Ok(Self {
            mean,
            std_dev,
            samples,
            confidence: 1.0 - alpha,
            half_width,
        })
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower() && x <= self.upper()
    }

    /// `σ_x / √(M−1)`.
    pub fn standard_error(&self) -> f64 {
        self.std_dev / ((self.samples - 1) as f64).sqrt()
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.m2 / self.count as f64).max(0.0)
        }
    }
}

fn reduce(parts: Vec<Moments>) -> Moments {
    parts.iter().fold(Moments::default(), |mut acc, m| {
        acc.merge(m);
        acc
    })
}

/// Mean of `observable` over full sampled states.
pub fn estimate_mean(
    observable: impl Fn(&DensityMatrix) -> f64 + Sync,
    measure: &MeasureSpec,
    dims: Dims,
    plan: &RunPlan,
    alpha: f64,
) -> Result<EstimateWithCI> {
    let sampler = prepare(measure, dims)?;
    let parts = plan.map_chunks(|rng, count| {
        let mut m = Moments::default();
        for _ in 0..count {
            m.push(observable(&sample_state_with(&sampler, dims, rng)?));
        }
        Ok(m)
    })?;
    let m = reduce(parts);
    EstimateWithCI::from_moments(m.mean, m.variance().sqrt(), m.count, alpha)
}

/// Mean of a spectral `observable`; skips the Haar unitary.
pub fn estimate_mean_spectrum(
    observable: impl Fn(&SpectrumPoint) -> f64 + Sync,
    measure: &MeasureSpec,
    dim: usize,
    plan: &RunPlan,
    alpha: f64,
) -> Result<EstimateWithCI> {
    let sampler = SpectrumSampler::new(measure.clone(), dim)?;
    let parts = plan.map_chunks(|rng, count| {
        let mut m = Moments::default();
        for _ in 0..count {
            m.push(observable(&sampler.sample(rng)?));
        }
        Ok(m)
    })?;
    let m = reduce(parts);
    EstimateWithCI::from_moments(m.mean, m.variance().sqrt(), m.count, alpha)
}

/// Probability that `predicate` holds, with Bernoulli `σ_x = √(p̂(1−p̂))`.
pub fn estimate_probability(
    predicate: impl Fn(&DensityMatrix) -> bool + Sync,
    measure: &MeasureSpec,
    dims: Dims,
    plan: &RunPlan,
    alpha: f64,
) -> Result<EstimateWithCI> {
    let sampler = prepare(measure, dims)?;
    let hits: u64 = plan
        .map_chunks(|rng, count| {
            let mut hits = 0u64;
            for _ in 0..count {
                hits += predicate(&sample_state_with(&sampler, dims, rng)?) as u64;
            }
            Ok(hits)
        })?
        .into_iter()
        .sum();
    let p = hits as f64 / plan.samples as f64;
    EstimateWithCI::from_moments(p, (p * (1.0 - p)).sqrt(), plan.samples, alpha)
}

/// Several state predicates evaluated on the same draws.
pub fn estimate_probabilities(
    predicates: &[&(dyn Fn(&DensityMatrix) -> bool + Sync)],
    measure: &MeasureSpec,
    dims: Dims,
    plan: &RunPlan,
    alpha: f64,
) -> Result<Vec<EstimateWithCI>> {
    let sampler = prepare(measure, dims)?;
    let parts = plan.map_chunks(|rng, count| {
        let mut hits = vec![0u64; predicates.len()];
        for _ in 0..count {
            let rho = sample_state_with(&sampler, dims, rng)?;
            for (h, p) in hits.iter_mut().zip(predicates) {
                *h += p(&rho) as u64;
            }
        }
        Ok(hits)
    })?;
    (0..predicates.len())
        .map(|i| {
            let p = parts.iter().map(|h| h[i]).sum::<u64>() as f64 / plan.samples as f64;
            EstimateWithCI::from_moments(p, (p * (1.0 - p)).sqrt(), plan.samples, alpha)
        })
        .collect()
}
