//! The eigenvalue simplex Δ as a regular polytope of unit edge in `R^{N-1}`.
//!
//! Vertices are built recursively, one axis per added vertex: coordinate `k`
//! (0-based) places vertex `k+1` at `+c_k` and vertices `0..=k` at `-c_k/(k+1)`,
//! where `c_k = √((k+1)/(2(k+2)))` is the circumradius of the unit
//! `(k+1)`-simplex. Every formula downstream only uses the Gram relations
//! `r_i·r_j = −1/(2N) + δ_ij/2`, so the choice of orientation is immaterial.
//!
//! A spectrum `λ` and its point `x` are related by `x = Σ λ_i r_i` and
//! `λ_i = 2 x·r_i + 1/N`; the squared distance to the centre is
//! `|x|² = Σλ_i²/2 − 1/(2N)`.

use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

const SPECTRUM_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexEmbedding {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl SimplexEmbedding {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(format!(
                "simplex needs at least 2 vertices, got {dim}"
            )));
        }
        let mut vertices = vec![vec![0.0; dim - 1]; dim];
        for k in 0..dim - 1 {
            let m = (k + 2) as f64; // vertices in the sub-simplex
            let c = ((m - 1.0) / (2.0 * m)).sqrt();
            for v in vertices.iter_mut().take(k + 1) {
                v[k] = -c / (m - 1.0);
            }
            vertices[k + 1][k] = c;
        }
        Ok(Self { dim, vertices })
    }

    /// Number of vertices `N` (the Hilbert-space dimension).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    pub fn circumradius(&self) -> f64 {
        circumradius(self.dim)
    }

    pub fn inradius(&self) -> f64 {
        inradius(self.dim)
    }

    /// `λ_i = 2 x·r_i + 1/N`. Negative weights are returned as-is.
    pub fn lambdas_from_point(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check_point(point)?;
        let inv_n = 1.0 / self.dim as f64;
        Ok(self
            .vertices
            .iter()
            .map(|v| 2.0 * dot(point, v) + inv_n)
            .collect())
    }

    /// `x = Σ λ_i r_i`; requires `Σλ_i = 1` within `1e-12`.
    pub fn point_from_lambdas(&self, lambdas: &[f64]) -> Result<Vec<f64>> {
        if lambdas.len() != self.dim {
            return Err(Error::InvalidDimension(format!(
                "{} weights for a simplex with {} vertices",
                lambdas.len(),
                self.dim
            )));
        }
        let sum: f64 = lambdas.iter().sum();
        if (sum - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::InvalidSpectrum(format!("weights sum to {sum}, not 1")));
        }
        let mut point = vec![0.0; self.dim - 1];
        for (lam, v) in lambdas.iter().zip(&self.vertices) {
            for (p, x) in point.iter_mut().zip(v) {
                *p += lam * x;
            }
        }
        Ok(point)
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim - 1 {
            return Err(Error::InvalidDimension(format!(
                "point has {} coordinates, embedding has {}",
                point.len(),
                self.dim - 1
            )));
        }
        Ok(())
    }
}

/// A spectrum together with its Cartesian point in the embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub lambdas: Vec<f64>,
    pub point: Vec<f64>,
}

impl SpectrumPoint {
    pub fn from_lambdas(lambdas: Vec<f64>, emb: &SimplexEmbedding) -> Result<Self> {
        let point = emb.point_from_lambdas(&lambdas)?;
        Ok(Self { lambdas, point })
    }

    pub fn from_point(point: Vec<f64>, emb: &SimplexEmbedding) -> Result<Self> {
        let lambdas = emb.lambdas_from_point(&point)?;
        Ok(Self { lambdas, point })
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    /// `Σ λ_i²`.
    pub fn purity(&self) -> f64 {
        self.lambdas.iter().map(|x| x * x).sum()
    }

    pub fn participation_ratio(&self) -> f64 {
        1.0 / self.purity()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.lambdas.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Distance of the point from the simplex centre.
    pub fn radius(&self) -> f64 {
        dot(&self.point, &self.point).sqrt()
    }

    pub fn is_physical(&self) -> bool {
        self.lambdas.iter().all(|&x| x >= 0.0)
    }
}

/// Radii at which the growing sphere changes how it meets the polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalRadii {
    /// Insphere radius (tangent to the facets); `R = N − 1`.
    pub h1: f64,
    /// Distance to edge midpoints; `R = 2`.
    pub h2: f64,
    /// Circumradius; `R = 1`.
    pub h3: f64,
    /// `r(R_i)` for integer `R_i = 1..=N`, index `i − 1`.
    pub breakpoints: Vec<f64>,
}

impl CriticalRadii {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(format!("N = {dim} < 2")));
        }
        let breakpoints = (1..=dim)
            .map(|k| radius_from_participation(k as f64, dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            h1: inradius(dim),
            h2: breakpoints[1.min(dim - 1)],
            h3: circumradius(dim),
            breakpoints,
        })
    }
}

pub fn circumradius(dim: usize) -> f64 {
    let n = dim as f64;
    ((n - 1.0) / (2.0 * n)).sqrt()
}

/// Also the radius `r_c` of the ball of states with `R ≥ N − 1`.
pub fn inradius(dim: usize) -> f64 {
    let n = dim as f64;
    1.0 / (2.0 * n * (n - 1.0)).sqrt()
}

fn check_dim(dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("N = {dim} < 2")));
    }
    Ok(dim as f64)
}

/// Values within this relative distance outside a domain are clamped to it.
const DOMAIN_SLACK: f64 = 1e-12;

fn clamp_domain(x: f64, lo: f64, hi: f64, what: &str) -> Result<f64> {
    let slack = DOMAIN_SLACK * hi.abs().max(1.0);
    if !(x >= lo - slack && x <= hi + slack) {
        return Err(Error::Domain(format!("{what} = {x} outside [{lo}, {hi}]")));
    }
    Ok(x.clamp(lo, hi))
}

/// `r = √(1/(2R) − 1/(2N))`.
pub fn radius_from_participation(r_ratio: f64, dim: usize) -> Result<f64> {
    let n = check_dim(dim)?;
    let r_ratio = clamp_domain(r_ratio, 1.0, n, "R")?;
    Ok((0.5 / r_ratio - 0.5 / n).max(0.0).sqrt())
}

/// Inverse of [`radius_from_participation`]: `R = 1/(2r² + 1/N)`.
pub fn participation_from_radius(radius: f64, dim: usize) -> Result<f64> {
    let n = check_dim(dim)?;
    let radius = clamp_domain(radius, 0.0, circumradius(dim), "r")?;
    Ok(1.0 / (2.0 * radius * radius + 1.0 / n))
}

/// `λ_m = 2 l √((N−1)/(2N)) + 1/N`, where `l` is the inradius of the inner
/// polytope `{λ_i ≤ λ_m}`.
pub fn lmax_from_inradius(l: f64, dim: usize) -> Result<f64> {
    let n = check_dim(dim)?;
    let c = circumradius(dim);
    let l = clamp_domain(l, 0.0, c, "l")?;
    Ok(2.0 * l * c + 1.0 / n)
}

pub fn inradius_from_lmax(lmax: f64, dim: usize) -> Result<f64> {
    let n = check_dim(dim)?;
    let lmax = clamp_domain(lmax, 1.0 / n, 1.0, "λ_m")?;
    Ok((lmax - 1.0 / n) / (2.0 * circumradius(dim)))
}

/// `dl/dλ_m = √(2N/(N−1))/2`, constant in `λ_m`.
pub fn inradius_per_lmax(dim: usize) -> f64 {
    let n = dim as f64;
    (2.0 * n / (n - 1.0)).sqrt() / 2.0
}

/// Volume of the regular unit-edge simplex with `dim` vertices,
/// `√(N/2^{N−1})/(N−1)!`.
pub fn volume_simplex(dim: usize) -> f64 {
    ln_volume_simplex(dim).exp()
}

pub fn ln_volume_simplex(dim: usize) -> f64 {
    let n = dim as f64;
    0.5 * (n.ln() - (n - 1.0) * std::f64::consts::LN_2) - ln_gamma(n)
}

/// Volume of the `d`-dimensional ball of radius `r`.
pub fn volume_ball(d: usize, r: f64) -> f64 {
    if r == 0.0 {
        return if d == 0 { 1.0 } else { 0.0 };
    }
    ln_volume_ball(d, r).exp()
}

pub fn ln_volume_ball(d: usize, r: f64) -> f64 {
    let h = d as f64 / 2.0;
    h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0) + d as f64 * r.ln()
}

/// Surface area of the sphere of radius `r` bounding a ball in `R^d`.
pub fn sphere_area(d: usize, r: f64) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / ln_gamma(h).exp() * r.powi(d as i32 - 1)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
