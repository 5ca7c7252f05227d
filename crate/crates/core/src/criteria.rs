//! Mixedness functionals and separability tests.

use crate::linalg::{hermitian_eigen, DensityMatrix, Subsystem};
use crate::simplex::{inradius, SimplexEmbedding, SpectrumPoint};
use crate::{Error, Result};

/// Minimum partial-transpose eigenvalue still counted as non-negative.
pub const PPT_TOL: f64 = 1e-10;
/// Margin by which `λ_m` must exceed a marginal's to count as a violation.
pub const ENTROPIC_TOL: f64 = 1e-12;
/// Slack on the separable-ball radius.
pub const BALL_TOL: f64 = 1e-12;

/// Scalar measures of how mixed a state is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixednessReport {
    pub participation_ratio: f64,
    pub max_eigenvalue: f64,
    /// Von Neumann entropy in nats.
    pub von_neumann: f64,
    /// `S_∞ = −ln λ_m` in nats.
    pub renyi_inf: f64,
    pub purity: f64,
}

impl MixednessReport {
    pub fn from_spectrum(lambdas: &[f64]) -> Self {
        let purity: f64 = lambdas.iter().map(|x| x * x).sum();
        let max = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let von_neumann = -lambdas.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>();
        Self {
            participation_ratio: 1.0 / purity,
            max_eigenvalue: max,
            von_neumann: von_neumann.max(0.0),
            renyi_inf: -max.ln(),
            purity,
        }
    }
}

pub fn mixedness(rho: &DensityMatrix) -> MixednessReport {
    MixednessReport::from_spectrum(&rho.eigenvalues())
}

/// `Tr ρ^q = Σ λ_i^q` for `q ≥ 1`.
pub fn trace_moment(rho: &DensityMatrix, q: f64) -> Result<f64> {
    spectrum_moment(&rho.eigenvalues(), q)
}

pub fn spectrum_moment(lambdas: &[f64], q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::Domain(format!("q = {q} must be at least 1")));
    }
    Ok(lambdas.iter().map(|&x| x.max(0.0).powf(q)).sum())
}

/// Smallest eigenvalue of the partial transpose on `B`.
pub fn min_pt_eigenvalue(rho: &DensityMatrix) -> f64 {
    let pt = rho.partial_transpose(Subsystem::B);
    hermitian_eigen(&pt)
        .map(|e| e.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
        .unwrap_or(f64::NAN)
}

/// Peres–Horodecki test. Equivalent to separability for 2×2 and 2×3.
pub fn is_ppt(rho: &DensityMatrix) -> bool {
    min_pt_eigenvalue(rho) >= -PPT_TOL
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// True when `S_∞` of the whole is below `S_∞` of either marginal.
pub fn violates_qinf_entropic(rho: &DensityMatrix) -> bool {
    let whole = max_of(&rho.eigenvalues());
    let a = max_of(&rho.partial_trace(Subsystem::A).eigenvalues());
    let b = max_of(&rho.partial_trace(Subsystem::B).eigenvalues());
    whole > a.min(b) + ENTROPIC_TOL
}

/// True when the spectrum lies in the ball of radius `1/√(2N(N−1))`, i.e.
/// `R ≥ N − 1`. Such states are separable for every bipartition.
pub fn in_separable_ball(rho: &DensityMatrix) -> bool {
    spectrum_in_separable_ball(&rho.eigenvalues())
}

pub fn spectrum_in_separable_ball(lambdas: &[f64]) -> bool {
    let n = lambdas.len();
    if n < 2 {
        return true;
    }
    let emb = SimplexEmbedding::new(n).expect("n >= 2");
    let total: f64 = lambdas.iter().sum();
    let normalized: Vec<f64> = lambdas.iter().map(|x| x / total).collect();
    match SpectrumPoint::from_lambdas(normalized, &emb) {
        Ok(p) => p.radius() <= inradius(n) + BALL_TOL,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{compose_state, haar_unitary, ComplexMatrix, Dims};
    use crate::samplers::{sample_spectrum_fixed_r, sample_state, FixedRStrategy, MeasureSpec};
    use crate::Complex64;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d22() -> Dims {
        Dims::new(2, 2).unwrap()
    }

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [Complex64::new(s, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(s, 0.0)];
        DensityMatrix::pure(&psi, d22()).unwrap()
    }

    fn werner(p: f64) -> DensityMatrix {
        let b = bell();
        let m = ComplexMatrix::from_fn(4, |i, j| {
            b.matrix()[(i, j)] * p + if i == j { Complex64::new((1.0 - p) / 4.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        DensityMatrix::new(m, d22()).unwrap()
    }

    #[test]
    fn mixedness_examples() {
        let mm = mixedness(&DensityMatrix::maximally_mixed(d22()));
        assert_abs_diff_eq!(mm.participation_ratio, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mm.max_eigenvalue, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(mm.von_neumann, 4f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(mm.renyi_inf, 4f64.ln(), epsilon = 1e-12);

        let pure = mixedness(&bell());
        assert_abs_diff_eq!(pure.participation_ratio, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(pure.max_eigenvalue, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(pure.von_neumann, 0.0, epsilon = 1e-9);

        let r = MixednessReport::from_spectrum(&[0.5, 0.3, 0.2, 0.0]);
        assert_abs_diff_eq!(r.participation_ratio, 1.0 / 0.38, epsilon = 1e-12);
        assert_abs_diff_eq!(r.max_eigenvalue, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.renyi_inf, -(0.5f64.ln()), epsilon = 1e-12);
        assert_abs_diff_eq!(r.purity * r.participation_ratio, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn moments() {
        let l = [0.5, 0.3, 0.2, 0.0];
        assert_eq!(spectrum_moment(&l, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(spectrum_moment(&l, 2.0).unwrap(), 0.38, epsilon = 1e-15);
        let q64 = spectrum_moment(&l, 64.0).unwrap().powf(1.0 / 64.0);
        assert!((q64 - 0.5).abs() / 0.5 < 0.02);
        let mut prev = f64::INFINITY;
        for q in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
            let v = spectrum_moment(&l, q).unwrap().powf(1.0 / q);
            assert!(v <= prev && v >= 0.5);
            prev = v;
        }
        assert!(spectrum_moment(&l, 0.5).is_err());
        let rho = DensityMatrix::maximally_mixed(d22());
        assert_abs_diff_eq!(trace_moment(&rho, 1.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ppt_examples() {
        assert!(is_ppt(&DensityMatrix::maximally_mixed(d22())));
        assert!(is_ppt(&werner(0.3)));
        assert!(!is_ppt(&werner(0.4)));
        assert_abs_diff_eq!(min_pt_eigenvalue(&werner(0.4)), (1.0 - 1.2) / 4.0, epsilon = 1e-12);
        assert!(!is_ppt(&bell()));
    }

    #[test]
    fn entropic_examples() {
        assert!(!violates_qinf_entropic(&DensityMatrix::maximally_mixed(d22())));
        assert!(violates_qinf_entropic(&bell()));
    }

    #[test]
    fn ball_examples() {
        assert!(in_separable_ball(&DensityMatrix::maximally_mixed(d22())));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (rr, inside) in [(3.2, true), (2.5, false)] {
            let p = sample_spectrum_fixed_r(rr, FixedRStrategy::Naive, &mut rng).unwrap();
            assert_eq!(spectrum_in_separable_ball(&p.lambdas), inside);
        }
    }

    #[test]
    fn products_are_separable() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let single = Dims::single(2).unwrap();
        let single3 = Dims::single(3).unwrap();
        for k in 0..10_000 {
            let a = sample_state(&MeasureSpec::dirichlet(1.0), single, &mut rng).unwrap();
            let b = if k % 2 == 0 {
                sample_state(&MeasureSpec::dirichlet(0.3), single, &mut rng).unwrap()
            } else {
                sample_state(&MeasureSpec::dirichlet(0.3), single3, &mut rng).unwrap()
            };
            let rho = DensityMatrix::product(&a, &b);
            assert!(is_ppt(&rho));
            assert!(!violates_qinf_entropic(&rho));
        }
    }

    #[test]
    fn implication_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for dims in [Dims::new(2, 2).unwrap(), Dims::new(2, 3).unwrap()] {
            let mut ball = 0;
            for _ in 0..100_000 {
                let rho = sample_state(&MeasureSpec::SimplexUniform, dims, &mut rng).unwrap();
                let ppt = is_ppt(&rho);
                if in_separable_ball(&rho) {
                    ball += 1;
                    assert!(ppt, "ball state not PPT: {:?}", rho.eigenvalues());
                }
                if violates_qinf_entropic(&rho) {
                    assert!(!ppt, "entropic violation by a PPT state: {:?}", rho.eigenvalues());
                }
            }
            assert!(ball > 0);
        }
    }

    #[test]
    fn diagonal_state_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = haar_unitary(4, &mut rng).unwrap();
        let rho = compose_state(&u, &[0.5, 0.3, 0.2, 0.0], d22()).unwrap();
        let r = mixedness(&rho);
        assert_abs_diff_eq!(r.participation_ratio, 1.0 / 0.38, epsilon = 1e-10);
    }
}
