//! Closed-form densities of mixedness and related scalar formulas.
//!
//! Under `Haar × Lebesgue`, states with fixed `R = 1/Tr ρ²` sit on a sphere
//! centred in the eigenvalue polytope and states with fixed `λ_m` on the
//! boundary of an inverted inner polytope. The density of either statistic
//! is the area of that surface inside the outer polytope, times a Jacobian.

mod general;
mod piecewise;
mod quad;
mod two_qubit;

pub use general::{
    SUPPORTED_LMAX_DIMS,
    borel_limit, borel_radius, borel_ratio, density_lmax_general, density_r_tail, lmax_first_region,
    lmax_last_region, mean_purity, r_star, RTail,
};
pub use piecewise::{InverseCdf, PiecewiseDensity, Segment};
pub use quad::adaptive_simpson;
pub use two_qubit::{area_sphere_in_tetrahedron, area_tetra_in_tetrahedron, density_lmax_4, density_r_4};
