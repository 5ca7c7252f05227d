//! Dense complex linear algebra for the small matrices (N up to ~16) that
//! describe bipartite states.
//!
//! Bipartite index convention: row/column `i` of an `N_A·N_B` matrix maps to
//! `(a, b) = (i / N_B, i % N_B)`, so subsystem A is the slow index.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails unless `entries.len() == dim²`.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidDimension(format!(
                "{} entries cannot form a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|h_ij − conj(h_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `max |(U†U − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = &self.adjoint() * self;
        gram.max_abs_diff(&Self::identity(self.dim))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (na, nb) = (self.dim, other.dim);
        Self::from_fn(na * nb, |i, j| {
            self[(i / nb, j / nb)] * other[(i % nb, j % nb)]
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Subsystem labels of a bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Local dimensions `(N_A, N_B)` of a bipartite Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::InvalidDimension(format!(
                "local dimensions must be positive, got {a}x{b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// A single system of dimension `n`, written as the trivial split `1 × n`.
    pub fn single(n: usize) -> Result<Self> {
        Self::new(1, n)
    }

    pub fn total(&self) -> usize {
        self.a * self.b
    }

    fn check(&self, dim: usize) -> Result<()> {
        if self.total() != dim {
            return Err(Error::InvalidDimension(format!(
                "dims {}x{} do not match matrix size {dim}",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.a, self.b)
    }
}

/// Tolerances enforced by [`DensityMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// A validated state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Dims,
}

impl DensityMatrix {
    /// Validates `matrix` against every state invariant, including a full
    /// eigendecomposition for positivity.
    pub fn new(matrix: ComplexMatrix, dims: Dims) -> Result<Self> {
        dims.check(matrix.dim())?;
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::Precondition(format!(
                "matrix is not Hermitian (defect {defect:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Precondition(format!("trace is {tr}, expected 1")));
        }
        let eig = hermitian_eigen(&matrix)?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::Precondition(format!(
                "matrix is not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(Self { matrix, dims })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: Dims) -> Self {
        debug_assert_eq!(matrix.dim(), dims.total());
        Self { matrix, dims }
    }

    pub fn maximally_mixed(dims: Dims) -> Self {
        let n = dims.total();
        let m = ComplexMatrix::from_real_diagonal(&vec![1.0 / n as f64; n]);
        Self::new_unchecked(m, dims)
    }

    /// `|ψ⟩⟨ψ|` for a state vector, normalized here.
    pub fn pure(psi: &[Complex64], dims: Dims) -> Result<Self> {
        dims.check(psi.len())?;
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidSpectrum("zero state vector".into()));
        }
        let m = ComplexMatrix::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Ok(Self::new_unchecked(m, dims))
    }

    /// `ρ_A ⊗ ρ_B`, with the result's dims set to `(dim ρ_A, dim ρ_B)`.
    pub fn product(rho_a: &Self, rho_b: &Self) -> Self {
        let dims = Dims {
            a: rho_a.dim(),
            b: rho_b.dim(),
        };
        Self::new_unchecked(rho_a.matrix.kron(&rho_b.matrix), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `Tr ρ²`, computed as the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.matrix.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix)
            .expect("density matrices are Hermitian")
            .eigenvalues
    }

    pub fn partial_transpose(&self, subsystem: Subsystem) -> ComplexMatrix {
        partial_transpose(&self.matrix, self.dims, subsystem).expect("dims validated")
    }

    /// Reduced state on `keep`; its dims are `(dim_keep, 1)`.
    pub fn partial_trace(&self, keep: Subsystem) -> DensityMatrix {
        let m = partial_trace(&self.matrix, self.dims, keep).expect("dims validated");
        let dims = Dims { a: m.dim(), b: 1 };
        Self::new_unchecked(m, dims)
    }
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` folded back into the columns of `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension("unitary of dimension 0".into()));
    }
    let mut a = ComplexMatrix::zeros(dim);
    for z in a.data.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = Complex64::new(re, im);
    }
    let (mut q, r_diag) = householder_qr(a);
    for (j, r) in r_diag.iter().enumerate() {
        let norm = r.norm();
        let phase = if norm > 0.0 { r / norm } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Householder QR. Returns `Q` and the diagonal of `R`.
fn householder_qr(mut a: ComplexMatrix) -> (ComplexMatrix, Vec<Complex64>) {
    let n = a.dim();
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut r_diag = Vec::with_capacity(n);

    for k in 0..n {
        let norm = (k..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let x0 = a[(k, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 > 0.0 {
            for j in k..n {
                let s: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(t, vi)| vi.conj() * a[(k + t, j)])
                    .sum();
                let f = s * (2.0 / vnorm2);
                for (t, vi) in v.iter().enumerate() {
                    a[(k + t, j)] -= f * vi;
                }
            }
        }
        r_diag.push(a[(k, k)]);
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{n-1}, accumulated right to left.
    let mut q = ComplexMatrix::identity(n);
    for k in (0..n).rev() {
        let v = &reflectors[k];
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * q[(k + t, j)])
                .sum();
            let f = s * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                q[(k + t, j)] -= f * vi;
            }
        }
    }
    (q, r_diag)
}

/// Eigenvalues (descending) and matching eigenvector columns of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * self.eigenvalues[k])
                .sum()
        })
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;
const JACOBI_REL_TOL: f64 = 1e-14;

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first removes the phase of the pivot `h_pq`, then applies
/// the real symmetric Jacobi rotation. Sweeps stop once the off-diagonal
/// Frobenius norm is below `1e-14·‖H‖_F`.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let defect = h.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::Precondition(format!(
            "eigen-decomposition of a non-Hermitian matrix (defect {defect:e})"
        )));
    }
    let n = h.dim();
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = scale == 0.0 || off_norm(&a) <= JACOBI_REL_TOL * scale;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_norm(&a) <= JACOBI_REL_TOL * scale;
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let babs = b.norm();
    if babs < f64::MIN_POSITIVE {
        return;
    }
    let e = b / babs; // e^{iφ}
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * babs);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.dim();
    let ec = e.conj();

    // A <- A U, V <- V U with U = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q).
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * c - ec * akq * s;
        a[(k, q)] = akp * s + ec * akq * c;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * c - ec * vkq * s;
        v[(k, q)] = vkp * s + ec * vkq * c;
    }
    // A <- U† A
    for j in 0..n {
        let (apj, aqj) = (a[(p, j)], a[(q, j)]);
        a[(p, j)] = apj * c - e * aqj * s;
        a[(q, j)] = apj * s + e * aqj * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

/// `ρ = U diag(spectrum) U†`.
///
/// `U` is assumed unitary; the spectrum must be non-negative and sum to 1
/// within `1e-12`.
pub fn compose_state(u: &ComplexMatrix, spectrum: &[f64], dims: Dims) -> Result<DensityMatrix> {
    let n = u.dim();
    if spectrum.len() != n {
        return Err(Error::InvalidDimension(format!(
            "spectrum of length {} for a {n}x{n} unitary",
            spectrum.len()
        )));
    }
    dims.check(n)?;
    if let Some(bad) = spectrum.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::InvalidSpectrum(format!("negative or NaN weight {bad}")));
    }
    let sum: f64 = spectrum.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidSpectrum(format!("weights sum to {sum}, not 1")));
    }
    debug_assert!(u.unitarity_defect() < 1e-10);

    let mut rho = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut acc = ZERO;
            for (k, &lam) in spectrum.iter().enumerate() {
                if lam != 0.0 {
                    acc += u[(i, k)] * u[(j, k)].conj() * lam;
                }
            }
            if i == j {
                acc.im = 0.0;
            }
            rho[(i, j)] = acc;
            rho[(j, i)] = acc.conj();
        }
    }
    Ok(DensityMatrix::new_unchecked(rho, dims))
}

/// Transposes the indices of `subsystem`: for B,
/// `ρ^{T_B}_{(a,b),(a',b')} = ρ_{(a,b'),(a',b)}`.
pub fn partial_transpose(m: &ComplexMatrix, dims: Dims, subsystem: Subsystem) -> Result<ComplexMatrix> {
    dims.check(m.dim())?;
    let nb = dims.b;
    Ok(ComplexMatrix::from_fn(m.dim(), |i, j| {
        let (a, b) = (i / nb, i % nb);
        let (a2, b2) = (j / nb, j % nb);
        match subsystem {
            Subsystem::A => m[(a2 * nb + b, a * nb + b2)],
            Subsystem::B => m[(a * nb + b2, a2 * nb + b)],
        }
    }))
}

/// Traces out the complement of `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: Dims, keep: Subsystem) -> Result<ComplexMatrix> {
    dims.check(m.dim())?;
    let (na, nb) = (dims.a, dims.b);
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(na, |a, a2| {
            (0..nb).map(|b| m[(a * nb + b, a2 * nb + b)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(nb, |b, b2| {
            (0..na).map(|a| m[(a * nb + b, a * nb + b2)]).sum()
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[c(s), c(0.0), c(0.0), c(s)], Dims::new(2, 2).unwrap()).unwrap()
    }

    #[test]
    fn haar_dim_one_is_a_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let u = haar_unitary(1, &mut rng).unwrap();
            assert_abs_diff_eq!(u[(0, 0)].norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn haar_dim_zero_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(haar_unitary(0, &mut rng), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn haar_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 4, 6, 9, 12, 16] {
            for _ in 0..50 {
                let u = haar_unitary(n, &mut rng).unwrap();
                assert!(u.unitarity_defect() <= 1e-12, "n={n}: {}", u.unitarity_defect());
            }
        }
    }

    #[test]
    fn eigen_of_identity_and_diagonal() {
        let e = hermitian_eigen(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0; 4]);

        let d = ComplexMatrix::from_real_diagonal(&[0.1, 0.4, 0.2, 0.3]);
        let e = hermitian_eigen(&d).unwrap();
        for (got, want) in e.eigenvalues.iter().zip([0.4, 0.3, 0.2, 0.1]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn eigen_recovers_constructed_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = haar_unitary(4, &mut rng).unwrap();
        let spectrum = [0.7, 0.3, 0.0, 0.0];
        let rho = compose_state(&u, &spectrum, Dims::new(2, 2).unwrap()).unwrap();
        let e = hermitian_eigen(rho.matrix()).unwrap();
        for (got, want) in e.eigenvalues.iter().zip(spectrum) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
        assert!(e.reconstruct().max_abs_diff(rho.matrix()) <= 1e-9);
        assert!(e.eigenvectors.unitarity_defect() <= 1e-10);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(3);
        m[(0, 1)] = c(1.0);
        assert!(matches!(hermitian_eigen(&m), Err(Error::Precondition(_))));
    }

    #[test]
    fn eigen_handles_complex_offdiagonal() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
        let m = ComplexMatrix::from_row_major(
            2,
            vec![c(2.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), c(2.0)],
        )
        .unwrap();
        let e = hermitian_eigen(&m).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-14);
        assert!(e.reconstruct().max_abs_diff(&m) < 1e-13);
    }

    #[test]
    fn compose_examples() {
        let dims = Dims::new(2, 2).unwrap();
        let id = ComplexMatrix::identity(4);
        let rho = compose_state(&id, &[0.25; 4], dims).unwrap();
        assert_eq!(rho, DensityMatrix::maximally_mixed(dims));

        let rho = compose_state(&id, &[1.0, 0.0, 0.0, 0.0], dims).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], c(1.0));
        assert_abs_diff_eq!(rho.purity(), 1.0);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(4, &mut rng).unwrap();
        let rho = compose_state(&u, &[0.5, 0.3, 0.2, 0.0], dims).unwrap();
        assert_abs_diff_eq!(rho.purity(), 0.38, epsilon = 1e-12);
        DensityMatrix::new(rho.into_matrix(), dims).unwrap();
    }

    #[test]
    fn compose_rejects_bad_spectra() {
        let dims = Dims::new(2, 2).unwrap();
        let id = ComplexMatrix::identity(4);
        assert!(matches!(
            compose_state(&id, &[0.5, 0.5, 0.5, 0.0], dims),
            Err(Error::InvalidSpectrum(_))
        ));
        assert!(matches!(
            compose_state(&id, &[1.1, -0.1, 0.0, 0.0], dims),
            Err(Error::InvalidSpectrum(_))
        ));
        assert!(matches!(
            compose_state(&id, &[0.5, 0.5, 0.0], dims),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn partial_transpose_examples() {
        let dims = Dims::new(2, 2).unwrap();
        let mixed = DensityMatrix::maximally_mixed(dims);
        assert_eq!(&mixed.partial_transpose(Subsystem::B), mixed.matrix());

        let pt = bell().partial_transpose(Subsystem::B);
        let e = hermitian_eigen(&pt).unwrap();
        for (got, want) in e.eigenvalues.iter().zip([0.5, 0.5, 0.5, -0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(pt.trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_transpose_of_product_keeps_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let da = Dims::single(2).unwrap();
        let db = Dims::single(3).unwrap();
        let ra = compose_state(&haar_unitary(2, &mut rng).unwrap(), &[0.8, 0.2], da).unwrap();
        let rb = compose_state(&haar_unitary(3, &mut rng).unwrap(), &[0.5, 0.3, 0.2], db).unwrap();
        let rho = DensityMatrix::product(&ra, &rb);
        let before = rho.eigenvalues();
        for sub in [Subsystem::A, Subsystem::B] {
            let after = hermitian_eigen(&rho.partial_transpose(sub)).unwrap().eigenvalues;
            for (x, y) in before.iter().zip(&after) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn partial_ops_reject_mismatched_dims() {
        let m = ComplexMatrix::identity(4);
        let dims = Dims::new(2, 3).unwrap();
        assert!(partial_transpose(&m, dims, Subsystem::A).is_err());
        assert!(partial_trace(&m, dims, Subsystem::B).is_err());
        assert!(Dims::new(0, 3).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ra = compose_state(&haar_unitary(2, &mut rng).unwrap(), &[0.9, 0.1], Dims::single(2).unwrap()).unwrap();
        let rb = compose_state(&haar_unitary(2, &mut rng).unwrap(), &[0.6, 0.4], Dims::single(2).unwrap()).unwrap();
        let rho = DensityMatrix::product(&ra, &rb);
        assert!(rho.partial_trace(Subsystem::A).matrix().max_abs_diff(ra.matrix()) <= 1e-12);
        assert!(rho.partial_trace(Subsystem::B).matrix().max_abs_diff(rb.matrix()) <= 1e-12);

        let half = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        assert!(bell().partial_trace(Subsystem::A).matrix().max_abs_diff(&half) <= 1e-15);

        let mixed = DensityMatrix::maximally_mixed(Dims::new(2, 3).unwrap());
        let third = ComplexMatrix::from_real_diagonal(&[1.0 / 3.0; 3]);
        assert!(mixed.partial_trace(Subsystem::B).matrix().max_abs_diff(&third) <= 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        let dims = Dims::new(2, 2).unwrap();
        let bad_trace = ComplexMatrix::from_real_diagonal(&[0.5, 0.5, 0.5, 0.0]);
        assert!(DensityMatrix::new(bad_trace, dims).is_err());
        let not_psd = ComplexMatrix::from_real_diagonal(&[0.6, 0.6, -0.2, 0.0]);
        assert!(DensityMatrix::new(not_psd, dims).is_err());
        let wrong_size = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        assert!(matches!(DensityMatrix::new(wrong_size, dims), Err(Error::InvalidDimension(_))));
    }
}
