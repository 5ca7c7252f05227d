//! Formulas valid for general `N`: the end regions of the `λ_m` density,
//! the near-maximally-mixed tail of the `R` density, mean purity under the
//! Dirichlet measure and the Borel ball radius.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use statrs::function::gamma::ln_gamma;

use super::piecewise::{PiecewiseDensity, Segment};
use crate::simplex::{
    circumradius, inradius, inradius_from_lmax, inradius_per_lmax, ln_volume_ball, ln_volume_simplex, radius_from_participation,
    sphere_area, volume_simplex,
};
use crate::{Error, Result};

/// Dimensions for which every `λ_m` region is available in closed form.
pub const SUPPORTED_LMAX_DIMS: [usize; 2] = [4, 6];

fn check_dim(dim: usize, min: usize) -> Result<f64> {
    if dim < min {
        return Err(Error::InvalidDimension(format!("N = {dim} < {min}")));
    }
    Ok(dim as f64)
}

/// `K = N/(N−2)! · √((N−1)/2^{N−2})`.
fn prefactor(n: f64) -> f64 {
    (n.ln() - ln_gamma(n - 1.0)).exp() * ((n - 1.0) / 2f64.powf(n - 2.0)).sqrt()
}

/// `κ = (dl/dλ_m)/V_T`.
fn kappa(dim: usize) -> f64 {
    inradius_per_lmax(dim) / volume_simplex(dim)
}

struct LmaxTerms {
    dim: usize,
    n: f64,
    kk: f64,
    c: f64,
    scale: f64,
}

impl LmaxTerms {
    fn new(dim: usize) -> Self {
        let n = dim as f64;
        Self {
            dim,
            n,
            kk: kappa(dim) * prefactor(n),
            c: circumradius(dim),
            scale: (n / (2.0 * (n - 1.0))).sqrt(),
        }
    }

    fn l(&self, t: f64) -> f64 {
        inradius_from_lmax(t.clamp(1.0 / self.n, 1.0), self.dim).unwrap_or(0.0)
    }

    fn first(&self, t: f64) -> f64 {
        let l = self.l(t);
        self.kk * ((2.0 * self.n * (self.n - 1.0)).sqrt() * l).powi(self.dim as i32 - 2)
    }

    fn last(&self, t: f64) -> f64 {
        let l = self.l(t);
        self.kk * ((self.c - l).max(0.0) / self.scale).powi(self.dim as i32 - 2)
    }

    /// `(N−1) K κ y_i^{N−2}` with `y_i = (l(N−1) − i c/(N−i)) / √(N/(2(N−1)))`.
    fn correction(&self, i: usize, t: f64) -> f64 {
        let l = self.l(t);
        let y = (l * (self.n - 1.0) - i as f64 / (self.n - i as f64) * self.c) / self.scale;
        (self.n - 1.0) * self.kk * y.powi(self.dim as i32 - 2)
    }
}

/// Unnormalized `λ_m` density on its first region `[1/N, 1/(N−1)]`.
pub fn lmax_first_region(dim: usize) -> Result<impl Fn(f64) -> f64 + Send + Sync> {
    check_dim(dim, 3)?;
    let terms = LmaxTerms::new(dim);
    Ok(move |t| terms.first(t))
}

/// Unnormalized `λ_m` density on its last region `[1/2, 1]`.
pub fn lmax_last_region(dim: usize) -> Result<impl Fn(f64) -> f64 + Send + Sync> {
    check_dim(dim, 3)?;
    let terms = LmaxTerms::new(dim);
    Ok(move |t| terms.last(t))
}

/// Density of the largest eigenvalue over `[1/N, 1]` with region boundaries
/// at `1/(N−i)`.
pub fn density_lmax_general(dim: usize) -> Result<PiecewiseDensity> {
    if !SUPPORTED_LMAX_DIMS.contains(&dim) {
        return Err(Error::NotImplemented(format!(
            "all λ_m regions are available for N ∈ {SUPPORTED_LMAX_DIMS:?}, not N = {dim}"
        )));
    }
    let terms = Arc::new(LmaxTerms::new(dim));
    // Signed multiples of the i-th correction entering each middle region.
    let weights: &[f64] = match dim {
        4 => &[-1.0],
        _ => &[-1.0, 2f64.powi(9) / 5f64.powi(4), -2.0 * 3f64.powi(4) / 5f64.powi(4)],
    };
    let mut breakpoints: Vec<f64> = (0..dim - 1).map(|i| 1.0 / (dim - i) as f64).collect();
    breakpoints.push(1.0);
    let mut segments: Vec<Segment> = Vec::with_capacity(dim - 1);
    let first = Arc::clone(&terms);
    segments.push(Arc::new(move |t| first.first(t)));
    for k in 1..=weights.len() {
        let terms = Arc::clone(&terms);
        let w = weights[..k].to_vec();
        segments.push(Arc::new(move |t| {
            terms.first(t)
                + w.iter()
                    .enumerate()
                    .map(|(j, wj)| wj * terms.correction(j + 1, t))
                    .sum::<f64>()
        }));
    }
    let last = Arc::clone(&terms);
    segments.push(Arc::new(move |t| last.last(t)));
    PiecewiseDensity::new(breakpoints, segments)
}

/// `R` density on `[N−1, N]`, where the sphere lies wholly inside the
/// polytope.
#[derive(Debug, Clone, Copy)]
pub struct RTail {
    dim: usize,
}

impl RTail {
    pub fn new(dim: usize) -> Result<Self> {
        check_dim(dim, 3)?;
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> (f64, f64) {
        let n = self.dim as f64;
        (n - 1.0, n)
    }

    /// `(1/R²)(1/R − 1/N)^{(N−3)/2}`.
    pub fn shape(&self, rr: f64) -> f64 {
        let n = self.dim as f64;
        let b = (1.0 / rr - 1.0 / n).max(0.0);
        b.powf((n - 3.0) / 2.0) / (rr * rr)
    }

    /// Absolute density under the uniform simplex measure: full sphere area
    /// times `|dr/dR| = 1/(4R²r)`, over the simplex volume.
    pub fn absolute(&self, rr: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(rr >= lo && rr <= hi) {
            return 0.0;
        }
        let r = radius_from_participation(rr, self.dim).unwrap_or(0.0);
        if r <= 0.0 {
            return 0.0;
        }
        sphere_area(self.dim - 1, r) / (4.0 * rr * rr * r) / volume_simplex(self.dim)
    }

    /// Tail density normalized over `[N−1, N]`.
    pub fn conditional(&self) -> PiecewiseDensity {
        let (lo, hi) = self.support();
        let tail = *self;
        PiecewiseDensity::new(vec![lo, hi], vec![Arc::new(move |rr| tail.shape(rr))]).expect("valid layout")
    }

    /// Probability mass of the tail region under the uniform simplex measure.
    pub fn mass(&self) -> f64 {
        let rc = inradius(self.dim);
        (ln_volume_ball(self.dim - 1, rc) - ln_volume_simplex(self.dim)).exp()
    }
}

/// Shorthand for [`RTail::new`].
pub fn density_r_tail(dim: usize) -> Result<RTail> {
    RTail::new(dim)
}

/// `⟨Tr ρ²⟩ = [N − (N−1)/(η+1)]^{-1}` under the symmetric Dirichlet measure.
pub fn mean_purity(eta: f64, dim: usize) -> Result<f64> {
    let n = check_dim(dim, 2)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Domain(format!("η = {eta} must be positive and finite")));
    }
    Ok(1.0 / (n - (n - 1.0) / (eta + 1.0)))
}

/// `R* = 1/⟨Tr ρ²⟩`.
pub fn r_star(eta: f64, dim: usize) -> Result<f64> {
    Ok(1.0 / mean_purity(eta, dim)?)
}

/// Radius of the `(N−1)`-ball whose volume equals that of the simplex.
pub fn borel_radius(dim: usize) -> Result<f64> {
    check_dim(dim, 4)?;
    let d = dim - 1;
    let ln_unit = ln_volume_ball(d, 1.0);
    let r = ((ln_volume_simplex(dim) - ln_unit) / d as f64).exp();
    if !(r > 0.0 && r < circumradius(dim)) {
        return Err(Error::Numeric(format!("no Borel radius inside the simplex for N = {dim}")));
    }
    Ok(r)
}

/// `(1/R(r*)) / (1/N) = 2N r*² + 1`.
pub fn borel_ratio(dim: usize) -> Result<f64> {
    let r = borel_radius(dim)?;
    Ok(2.0 * dim as f64 * r * r + 1.0)
}

/// Large-`N` limit `(2π + e)/(2π)` of [`borel_ratio`].
pub fn borel_limit() -> f64 {
    (2.0 * PI + E) / (2.0 * PI)
}
