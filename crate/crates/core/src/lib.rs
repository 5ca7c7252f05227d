//! Random mixed states of bipartite quantum systems and the distribution of
//! their mixedness.
//!
//! States are drawn from product measures `Haar × (spectrum measure)`, where
//! the spectrum lives on the probability simplex embedded as a regular
//! polytope of unit edge. The geometry of that embedding turns distributions
//! of the participation ratio `R = 1/Tr ρ²` and the maximal eigenvalue `λ_m`
//! into surface-area problems, which [`analytic`] solves in closed form and
//! [`montecarlo`] cross-checks by sampling.
//!
//! Modules:
//! - [`linalg`]: small dense complex matrices, Haar unitaries, Jacobi eigensolver,
//!   partial trace / transpose.
//! - [`simplex`]: the simplex embedding and radius/mixedness conversions.
//! - [`samplers`]: spectrum measures and full-state generation.
//! - [`analytic`]: closed-form densities and scalar formulas.
//! - [`criteria`]: mixedness functionals and separability tests.
//! - [`montecarlo`]: reproducible parallel estimation, histograms, goodness of fit.
//! - [`stats`]: the handful of distribution tests the crate needs.

pub mod analytic;
pub mod criteria;
mod error;
pub mod linalg;
pub mod montecarlo;
pub mod samplers;
pub mod simplex;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, Dims, EigenDecomposition, Subsystem};
pub use samplers::{FixedRStrategy, MeasureSpec};
pub use simplex::{SimplexEmbedding, SpectrumPoint};

pub use num_complex::Complex64;
