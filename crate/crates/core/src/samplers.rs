//! Spectrum measures on the simplex and the full state generator
//! `ρ = U diag(λ) U†` with Haar `U`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{compose_state, haar_unitary, DensityMatrix, Dims};
use crate::simplex::{radius_from_participation, CriticalRadii, SimplexEmbedding, SpectrumPoint};
use crate::{Error, Result};

/// Consecutive rejections after which a rejection sampler reports failure.
pub const MAX_CONSECUTIVE_REJECTIONS: u64 = 10_000_000;

/// How the two-qubit fixed-`R` sampler explores the shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FixedRStrategy {
    /// Uniform on the whole sphere, reject points outside the tetrahedron.
    #[default]
    Naive,
    /// Beyond the edge-tangent radius, draw only from the polar cap around one
    /// vertex that contains the accepted patch, then relabel the vertices at
    /// random.
    ThetaRestricted,
}

/// Measure on the spectrum. The eigenbasis is always Haar.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// Lebesgue measure on the simplex.
    SimplexUniform,
    /// Symmetric Dirichlet, density `∝ Π λ_i^{η−1}`.
    Dirichlet { eta: f64 },
    /// Dirichlet with one parameter per eigenvalue.
    DirichletWeights { etas: Vec<f64> },
    /// Uniform on the part of the sphere `1/Σλ² = R` inside the simplex.
    FixedR { r: f64, strategy: FixedRStrategy },
}

impl MeasureSpec {
    pub fn dirichlet(eta: f64) -> Self {
        MeasureSpec::Dirichlet { eta }
    }

    pub fn fixed_r(r: f64) -> Self {
        MeasureSpec::FixedR {
            r,
            strategy: FixedRStrategy::Naive,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim < 2 {
            return Err(Error::InvalidDimension(format!("N = {dim} < 2")));
        }
        match self {
            MeasureSpec::SimplexUniform => Ok(()),
            MeasureSpec::Dirichlet { eta } => check_eta(*eta),
            MeasureSpec::DirichletWeights { etas } => {
                if etas.len() != dim {
                    return Err(Error::InvalidDimension(format!(
                        "{} Dirichlet parameters for N = {dim}",
                        etas.len()
                    )));
                }
                etas.iter().try_for_each(|&e| check_eta(e))
            }
            MeasureSpec::FixedR { r, strategy } => {
                if !(*r >= 1.0 && *r <= dim as f64) {
                    return Err(Error::Domain(format!("R = {r} outside [1, {dim}]")));
                }
                if dim < 3 {
                    return Err(Error::InvalidDimension("fixed-R sampling needs N >= 3".into()));
                }
                if *strategy == FixedRStrategy::ThetaRestricted && dim != 4 {
                    return Err(Error::NotImplemented(format!(
                        "theta-restricted sampling exists for N = 4 only, got N = {dim}"
                    )));
                }
                Ok(())
            }
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Domain(format!("Dirichlet parameter must be positive, got {eta}")));
    }
    Ok(())
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSpec::SimplexUniform => write!(f, "uniform"),
            MeasureSpec::Dirichlet { eta } => write!(f, "dirichlet:{eta}"),
            MeasureSpec::DirichletWeights { etas } => {
                let parts: Vec<String> = etas.iter().map(|e| e.to_string()).collect();
                write!(f, "dirichlet-weights:{}", parts.join(","))
            }
            MeasureSpec::FixedR { r, strategy } => match strategy {
                FixedRStrategy::Naive => write!(f, "fixed-r:{r}"),
                FixedRStrategy::ThetaRestricted => write!(f, "fixed-r:{r}:theta"),
            },
        }
    }
}

impl FromStr for MeasureSpec {
    type Err = Error;

    /// Accepts `uniform`, `dirichlet:<eta>`, `dirichlet-weights:<e1>,<e2>,…`,
    /// `fixed-r:<R>` and `fixed-r:<R>:{naive|theta}`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("unrecognised measure '{s}'"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let mut parts = s.trim().split(':');
        let head = parts.next().unwrap_or_default();
        let measure = match head {
            "uniform" | "lebesgue" => MeasureSpec::SimplexUniform,
            "dirichlet" => MeasureSpec::Dirichlet {
                eta: num(parts.next().ok_or_else(bad)?)?,
            },
            "dirichlet-weights" => MeasureSpec::DirichletWeights {
                etas: parts
                    .next()
                    .ok_or_else(bad)?
                    .split(',')
                    .map(num)
                    .collect::<Result<_>>()?,
            },
            "fixed-r" => {
                let r = num(parts.next().ok_or_else(bad)?)?;
                let strategy = match parts.next() {
                    None | Some("naive") => FixedRStrategy::Naive,
                    Some("theta") => FixedRStrategy::ThetaRestricted,
                    Some(_) => return Err(bad()),
                };
                MeasureSpec::FixedR { r, strategy }
            }
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(measure)
    }
}

/// A spectrum sampler bound to one measure and dimension.
#[derive(Debug, Clone)]
pub struct SpectrumSampler {
    measure: MeasureSpec,
    emb: SimplexEmbedding,
    shell: Option<Shell>,
}

#[derive(Debug, Clone, Copy)]
struct Shell {
    radius: f64,
    /// `cos θ_c` bounding the polar cap searched by the theta-restricted sampler.
    cap_cos: Option<f64>,
}

impl SpectrumSampler {
    pub fn new(measure: MeasureSpec, dim: usize) -> Result<Self> {
        measure.validate(dim)?;
        let emb = SimplexEmbedding::new(dim)?;
        let shell = match &measure {
            MeasureSpec::FixedR { r, strategy } => {
                let radius = radius_from_participation(*r, dim)?;
                let cap_cos = match strategy {
                    FixedRStrategy::ThetaRestricted => theta_cap_cos(radius),
                    FixedRStrategy::Naive => None,
                };
                Some(Shell { radius, cap_cos })
            }
            _ => None,
        };
        Ok(Self { measure, emb, shell })
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    pub fn embedding(&self) -> &SimplexEmbedding {
        &self.emb
    }

    pub fn dim(&self) -> usize {
        self.emb.dim()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SpectrumPoint> {
        self.sample_counting(rng).map(|(sp, _)| sp)
    }

    /// Draws one spectrum and reports how many candidates were rejected first.
    pub fn sample_counting<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(SpectrumPoint, u64)> {
        let n = self.dim();
        match &self.measure {
            MeasureSpec::SimplexUniform => {
                let lambdas = uniform_simplex_weights(n, rng);
                Ok((SpectrumPoint::from_lambdas(lambdas, &self.emb)?, 0))
            }
            MeasureSpec::Dirichlet { eta } => {
                let lambdas = dirichlet_weights(&vec![*eta; n], rng);
                Ok((SpectrumPoint::from_lambdas(lambdas, &self.emb)?, 0))
            }
            MeasureSpec::DirichletWeights { etas } => {
                let lambdas = dirichlet_weights(etas, rng);
                Ok((SpectrumPoint::from_lambdas(lambdas, &self.emb)?, 0))
            }
            MeasureSpec::FixedR { .. } => {
                let shell = self.shell.expect("shell set for fixed-R measures");
                if n == 4 {
                    sample_tetra_shell(&self.emb, shell, rng)
                } else {
                    sample_shell_gaussian(&self.emb, shell.radius, rng)
                }
            }
        }
    }
}

/// Uniform point of the simplex from the spacings of sorted uniforms.
pub fn sample_spectrum_uniform<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<SpectrumPoint> {
    SpectrumSampler::new(MeasureSpec::SimplexUniform, dim)?.sample(rng)
}

/// Symmetric Dirichlet(η) spectrum.
pub fn sample_spectrum_dirichlet<R: Rng + ?Sized>(dim: usize, eta: f64, rng: &mut R) -> Result<SpectrumPoint> {
    SpectrumSampler::new(MeasureSpec::Dirichlet { eta }, dim)?.sample(rng)
}

/// Two-qubit spectrum with participation ratio `r_ratio`, uniform on the shell.
pub fn sample_spectrum_fixed_r<R: Rng + ?Sized>(
    r_ratio: f64,
    strategy: FixedRStrategy,
    rng: &mut R,
) -> Result<SpectrumPoint> {
    SpectrumSampler::new(MeasureSpec::FixedR { r: r_ratio, strategy }, 4)?.sample(rng)
}

/// Fixed-`R` spectrum in any dimension `N ≥ 3`, via normalized Gaussian directions.
pub fn sample_spectrum_fixed_r_general<R: Rng + ?Sized>(
    dim: usize,
    r_ratio: f64,
    rng: &mut R,
) -> Result<SpectrumPoint> {
    MeasureSpec::fixed_r(r_ratio).validate(dim)?;
    let emb = SimplexEmbedding::new(dim)?;
    let radius = radius_from_participation(r_ratio, dim)?;
    sample_shell_gaussian(&emb, radius, rng).map(|(sp, _)| sp)
}

/// Full random state: spectrum from `measure`, eigenbasis Haar.
pub fn sample_state<R: Rng + ?Sized>(measure: &MeasureSpec, dims: Dims, rng: &mut R) -> Result<DensityMatrix> {
    let sampler = SpectrumSampler::new(measure.clone(), dims.total())?;
    sample_state_with(&sampler, dims, rng)
}

/// [`sample_state`] reusing a prepared sampler.
pub fn sample_state_with<R: Rng + ?Sized>(
    sampler: &SpectrumSampler,
    dims: Dims,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if dims.total() != sampler.dim() {
        return Err(Error::InvalidDimension(format!(
            "dims {dims} for a sampler of dimension {}",
            sampler.dim()
        )));
    }
    let spectrum = sampler.sample(rng)?;
    let u = haar_unitary(dims.total(), rng)?;
    compose_state(&u, &spectrum.lambdas, dims)
}

fn uniform_simplex_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let mut lambdas = Vec::with_capacity(n);
    let mut prev = 0.0;
    for c in cuts {
        lambdas.push(c - prev);
        prev = c;
    }
    lambdas.push(1.0 - prev);
    lambdas
}

/// Normalized Gamma variates, combined in log space so that tiny shape
/// parameters cannot underflow every weight to zero.
fn dirichlet_weights<R: Rng + ?Sized>(etas: &[f64], rng: &mut R) -> Vec<f64> {
    let logs: Vec<f64> = etas.iter().map(|&a| ln_gamma_variate(a, rng)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let sum: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= sum;
    }
    w
}

/// `ln X` for `X ~ Gamma(shape, 1)`.
///
/// Marsaglia–Tsang squeeze for `shape ≥ 1`; below one,
/// `Gamma(a) = Gamma(a + 1) · U^{1/a}`.
fn ln_gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u: f64 = open01(rng);
        return ln_gamma_variate(shape + 1.0, rng) + u.ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u: f64 = open01(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d.ln() + v.ln();
        }
    }
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Point of the 2-sphere of radius `r` from polar angle `θ` (measured from the
/// axis of the fourth vertex) and azimuth `φ`.
pub fn sphere_point(r: f64, cos_theta: f64, phi: f64) -> [f64; 3] {
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    [r * sin_theta * phi.cos(), r * sin_theta * phi.sin(), r * cos_theta]
}

/// Larger root `w` of `3r²w² − √(3/2) r w + 3/8 − 2r² = 0`: the cosine of the
/// polar angle at which the sphere crosses the edges through the fourth
/// vertex. Defined only between the edge-tangent radius and the circumradius.
pub fn theta_cap_cos(r: f64) -> Option<f64> {
    let radii = CriticalRadii::new(4).expect("N = 4");
    if r <= radii.h2 || r > radii.h3 {
        return None;
    }
    let a = 3.0 * r * r;
    let b = -(1.5f64).sqrt() * r;
    let c = 0.375 - 2.0 * r * r;
    let disc = (b * b - 4.0 * a * c).max(0.0);
    Some(((-b + disc.sqrt()) / (2.0 * a)).min(1.0))
}

fn sample_tetra_shell<R: Rng + ?Sized>(
    emb: &SimplexEmbedding,
    shell: Shell,
    rng: &mut R,
) -> Result<(SpectrumPoint, u64)> {
    if shell.radius == 0.0 {
        return Ok((SpectrumPoint::from_point(vec![0.0; 3], emb)?, 0));
    }
    let lo = shell.cap_cos.unwrap_or(-1.0);
    let mut rejected = 0;
    loop {
        let phi = 2.0 * PI * rng.random::<f64>();
        let cos_theta = lo + (1.0 - lo) * rng.random::<f64>();
        let point = sphere_point(shell.radius, cos_theta, phi);
        let sp = SpectrumPoint::from_point(point.to_vec(), emb)?;
        if sp.is_physical() {
            if shell.cap_cos.is_none() {
                return Ok((sp, rejected));
            }
            // The cap holds the patch around vertex 4 only; a random relabelling
            // spreads it over the four congruent patches.
            let mut lambdas = sp.lambdas;
            for i in (1..lambdas.len()).rev() {
                let j = rng.random_range(0..=i);
                lambdas.swap(i, j);
            }
            return Ok((SpectrumPoint::from_lambdas(lambdas, emb)?, rejected));
        }
        rejected += 1;
        if rejected >= MAX_CONSECUTIVE_REJECTIONS {
            return Err(Error::RejectionLimit(rejected));
        }
    }
}

fn sample_shell_gaussian<R: Rng + ?Sized>(
    emb: &SimplexEmbedding,
    radius: f64,
    rng: &mut R,
) -> Result<(SpectrumPoint, u64)> {
    let d = emb.dim() - 1;
    if radius == 0.0 {
        return Ok((SpectrumPoint::from_point(vec![0.0; d], emb)?, 0));
    }
    let mut rejected = 0;
    let mut dir = vec![0.0; d];
    loop {
        let norm = loop {
            for x in dir.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                break norm;
            }
        };
        let point: Vec<f64> = dir.iter().map(|x| radius * x / norm).collect();
        let sp = SpectrumPoint::from_point(point, emb)?;
        if sp.is_physical() {
            return Ok((sp, rejected));
        }
        rejected += 1;
        if rejected >= MAX_CONSECUTIVE_REJECTIONS {
            return Err(Error::RejectionLimit(rejected));
        }
    }
}
