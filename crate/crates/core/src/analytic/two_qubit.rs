//! Exact areas and densities for `N = 4`.

use std::f64::consts::PI;
use std::sync::Arc;

use super::piecewise::PiecewiseDensity;
use crate::simplex::{circumradius, inradius_per_lmax, radius_from_participation, CriticalRadii};
use crate::{Error, Result};

const N: usize = 4;

fn radii() -> CriticalRadii {
    CriticalRadii::new(N).expect("N = 4 is valid")
}

fn check_range(x: f64, hi: f64, what: &str) -> Result<f64> {
    let slack = 1e-12;
    if !(x >= -slack && x <= hi + slack) {
        return Err(Error::Domain(format!("{what} = {x} outside [0, {hi}]")));
    }
    Ok(x.clamp(0.0, hi))
}

/// Area of the sphere of radius `r` (centred in the eigenvalue tetrahedron)
/// lying inside the tetrahedron.
pub fn area_sphere_in_tetrahedron(r: f64) -> Result<f64> {
    let h = radii();
    let r = check_range(r, h.h3, "r")?;
    Ok(if r <= h.h1 {
        4.0 * PI * r * r
    } else if r <= h.h2 {
        4.0 * PI * (r * r - 2.0 * r * (r - h.h1))
    } else {
        area_region_three(r, &h)
    })
}

fn area_region_three(r: f64, radii: &CriticalRadii) -> f64 {
    if r >= radii.h3 {
        return 0.0;
    }
    let r2 = r * r;
    let d1 = 0.5 * (0.5 - (r2 - 0.125).max(0.0).sqrt());
    let a = 2.0 * (d1 / r).clamp(-1.0, 1.0).asin();
    // (cos A − cos²A)/sin²A, rewritten to stay finite as A → 0.
    let cos_a = a.cos();
    let beta = (cos_a / (1.0 + cos_a)).clamp(-1.0, 1.0).acos();
    let s_a = r2 * (3.0 * beta - PI);

    let hh = radii.h1 / r;
    let c1 = hh / (1.0 - hh * hh).sqrt();
    let d2 = r * (1.0 - hh * hh).sqrt();
    let c_b = ((d2 * d2 - d1 * d1) / (r2 - d1 * d1)).max(0.0).sqrt();
    let c2 = c_b / (1.0 - c_b * c_b).sqrt();
    let c12 = (c1 * c2).clamp(-1.0, 1.0);
    let inner = ((1.0 - c12 * c12) / (1.0 + c2 * c2)).max(0.0).sqrt();
    let s_b = r2 * (hh * (-PI + 2.0 * c12.asin()) + 2.0 * inner.min(1.0).asin());

    (4.0 * (s_a - 3.0 * s_b)).max(0.0)
}

/// Surface area of the inner (inverted) tetrahedron of inradius `l` lying
/// inside the eigenvalue tetrahedron.
pub fn area_tetra_in_tetrahedron(l: f64) -> Result<f64> {
    let h1 = radii().h1;
    let l = check_range(l, 3.0 * h1, "l")?;
    let s3 = 3.0_f64.sqrt();
    Ok(if l <= h1 / 3.0 {
        24.0 * s3 * l * l
    } else if l <= h1 {
        3.0 * s3 * (8.0 * l * l - 1.5 * (3.0 * l - h1).powi(2))
    } else {
        1.5 * s3 * (3.0 * h1 - l).powi(2)
    })
}

/// Density of the participation ratio `R` on `[1, 4]`.
pub fn density_r_4() -> PiecewiseDensity {
    let seg = || -> super::piecewise::Segment {
        Arc::new(|rr: f64| {
            let r = radius_from_participation(rr, N).unwrap_or(0.0);
            if r <= 0.0 {
                return 0.0;
            }
            let jac = 1.0 / (4.0 * rr * rr * r);
            area_sphere_in_tetrahedron(r).unwrap_or(0.0) * jac
        })
    };
    PiecewiseDensity::new(vec![1.0, 2.0, 3.0, 4.0], vec![seg(), seg(), seg()]).expect("valid layout")
}

/// Density of the largest eigenvalue `λ_m` on `[1/4, 1]`.
pub fn density_lmax_4() -> PiecewiseDensity {
    let jac = inradius_per_lmax(N);
    let seg = move || -> super::piecewise::Segment {
        Arc::new(move |t: f64| {
            let l = (t - 0.25) / (2.0 * circumradius(N));
            area_tetra_in_tetrahedron(l.max(0.0)).unwrap_or(0.0) * jac
        })
    };
    PiecewiseDensity::new(vec![0.25, 1.0 / 3.0, 0.5, 1.0], vec![seg(), seg(), seg()]).expect("valid layout")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::sphere_point;
    use crate::simplex::SimplexEmbedding;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sphere_area_examples() {
        let h = radii();
        assert_relative_eq!(area_sphere_in_tetrahedron(h.h1).unwrap(), 4.0 * PI * h.h1 * h.h1, max_relative = 1e-14);
        // 4π[0.09 − 0.6(0.3 − h1)] = 0.4080864...
        assert_abs_diff_eq!(area_sphere_in_tetrahedron(0.3).unwrap(), 0.408086, epsilon = 1e-6);
        assert_abs_diff_eq!(area_sphere_in_tetrahedron(h.h3).unwrap(), 0.0, epsilon = 1e-12);
        assert!(area_sphere_in_tetrahedron(h.h3 + 1e-6).is_err());
        assert!(area_sphere_in_tetrahedron(-0.1).is_err());
    }

    #[test]
    fn sphere_area_is_continuous_at_critical_radii() {
        let h = radii();
        let two = 4.0 * PI * (h.h2 * h.h2 - 2.0 * h.h2 * (h.h2 - h.h1));
        assert_relative_eq!(area_region_three(h.h2, &h), two, max_relative = 1e-10);
        let just = area_region_three(h.h3 - 1e-9, &h);
        assert!(just >= 0.0 && just < 1e-6);
    }

    #[test]
    fn region_three_area_matches_surface_monte_carlo() {
        let emb = SimplexEmbedding::new(N).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for r in [0.45, 0.5, 0.55] {
            let m = 2_000_000;
            let mut hits = 0u64;
            for _ in 0..m {
                let w: f64 = 2.0 * rng.random::<f64>() - 1.0;
                let phi = 2.0 * PI * rng.random::<f64>();
                let x = sphere_point(r, w, phi);
                if emb.lambdas_from_point(&x).unwrap().iter().all(|&v| v >= 0.0) {
                    hits += 1;
                }
            }
            let p = hits as f64 / m as f64;
            let sigma = (p * (1.0 - p) / m as f64).sqrt() * 4.0 * PI * r * r;
            let mc = p * 4.0 * PI * r * r;
            let exact = area_sphere_in_tetrahedron(r).unwrap();
            assert!((mc - exact).abs() < 4.0 * sigma, "r={r}: mc {mc} vs {exact} (σ {sigma})");
        }
    }

    #[test]
    fn tetra_area_examples() {
        let h1 = radii().h1;
        let s3 = 3.0_f64.sqrt();
        let a = area_tetra_in_tetrahedron(h1 / 3.0).unwrap();
        assert_relative_eq!(a, 24.0 * s3 * h1 * h1 / 9.0, max_relative = 1e-13);
        assert_relative_eq!(3.0 * s3 * (8.0 * h1 * h1 / 9.0), a, max_relative = 1e-13);
        assert_relative_eq!(area_tetra_in_tetrahedron(h1).unwrap(), 6.0 * s3 * h1 * h1, max_relative = 1e-13);
        assert_relative_eq!(3.0 * s3 * (8.0 * h1 * h1 - 1.5 * 4.0 * h1 * h1), 6.0 * s3 * h1 * h1, max_relative = 1e-13);
        assert_eq!(area_tetra_in_tetrahedron(3.0 * h1).unwrap(), 0.0);
        assert!(area_tetra_in_tetrahedron(3.0 * h1 + 1e-6).is_err());
    }

    #[test]
    fn r_density_shape() {
        let d = density_r_4();
        assert_abs_diff_eq!(d.integrate(1.0, 4.0), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(d.eval(1.0), 0.0, epsilon = 1e-9);
        assert!(d.eval(4.0 - 1e-10) < 1e-3);
        for (i, &b) in [2.0, 3.0].iter().enumerate() {
            let diff = d.eval_segment(i, b) - d.eval_segment(i + 1, b);
            assert!(diff.abs() <= 1e-9, "jump {diff} at R={b}");
        }
        assert!((1..400).all(|k| d.eval(1.0 + 3.0 * k as f64 / 400.0) >= 0.0));
    }

    #[test]
    fn lmax_density_closed_form() {
        // Uniform Dirichlet: F = 12(4t−1)², F − 36(3t−1)², 12(1−t)².
        let d = density_lmax_4();
        for k in 0..=300 {
            let t = 0.25 + 0.75 * k as f64 / 300.0;
            let mut f = 12.0 * (4.0 * t - 1.0).powi(2);
            if t > 1.0 / 3.0 {
                f -= 36.0 * (3.0 * t - 1.0).powi(2);
            }
            if t > 0.5 {
                f = 12.0 * (1.0 - t).powi(2);
            }
            assert_abs_diff_eq!(d.eval(t), f, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(d.eval(0.25), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.eval(1.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.integrate(0.25, 1.0), 1.0, epsilon = 1e-6);
    }
}
