//! Dense complex matrices, Hermitian eigendecomposition and the handful of
//! matrix operations the model needs (tensor products, partial traces,
//! spectral matrix functions).
//!
//! Everything here is small and dense: the mental state lives in a
//! four-dimensional space and the slit models in three. Matrices are stored
//! row-major in a flat `Vec`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum entrywise asymmetry `|m_ij - conj(m_ji)|` accepted as Hermitian.
pub const HERM_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;
/// Accepted deviation of `U†U` from the identity.
pub const UNITARY_TOL: f64 = 1e-10;
/// Accepted deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-12;

const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Shorthand for a real number lifted into `Complex64`.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { re(1.0) } else { re(0.0) })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    /// Builds a matrix from nested rows. Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| {
            let row = rows[i].as_ref();
            assert_eq!(row.len(), dim, "row {i} has length {} != {dim}", row.len());
            row[j]
        })
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| {
            let row = rows[i].as_ref();
            assert_eq!(row.len(), dim, "row {i} has length {} != {dim}", row.len());
            re(row[j])
        })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { re(0.0) })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { re(diag[i]) } else { re(0.0) })
    }

    /// `|v⟩⟨v|` for a column vector `v`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(re(factor))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_ij |m_ij - conj(m_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `‖U†U − I‖_max`.
    pub fn unitary_deviation(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim))
    }

    /// Unitary similarity `U M U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = vec![re(0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == re(0.0) {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        Self { dim: n, entries: out }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.dim, rhs.dim, "elementwise dimension mismatch");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`. The first factor indexes the slow (outer)
/// coordinate, so `tensor(rho_b, rho_a)` is laid out in the basis
/// `{dd, dc, cd, cc}` with the prediction first.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    ComplexMatrix::from_fn(na * nb, |i, j| a[(i / nb, j / nb)] * b[(i % nb, j % nb)])
}

/// The two factors of the prediction ⊗ action space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    /// Prediction about the opponent; the first tensor factor.
    B,
    /// The player's own action; the second tensor factor.
    A,
}

/// Reduced matrix of subsystem `keep` for a matrix on a `d_b · d_a` space
/// ordered B-major.
pub fn partial_trace(
    m: &ComplexMatrix,
    keep: Subsystem,
    (d_b, d_a): (usize, usize),
) -> Result<ComplexMatrix> {
    if m.dim != d_b * d_a {
        return Err(Error::DimensionMismatch {
            expected: d_b * d_a,
            got: m.dim,
        });
    }
    let idx = |b: usize, a: usize| b * d_a + a;
    Ok(match keep {
        Subsystem::B => ComplexMatrix::from_fn(d_b, |i, j| {
            (0..d_a).map(|a| m[(idx(i, a), idx(j, a))]).sum()
        }),
        Subsystem::A => ComplexMatrix::from_fn(d_a, |i, j| {
            (0..d_b).map(|b| m[(idx(b, i), idx(b, j))]).sum()
        }),
    })
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    /// Eigenvectors stored as columns, matching `eigenvalues` order.
    eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.dim)
            .map(|i| self.eigenvectors[(i, k)])
            .collect()
    }

    /// `V diag(f(ε)) V†`.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim;
        let weights: Vec<Complex64> = self.eigenvalues.iter().map(|&e| f(e)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * weights[k] * v[(j, k)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(re)
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Spectrum> {
    let dev = m.hermitian_deviation();
    if dev > HERM_TOL {
        return Err(Error::NonHermitian(dev));
    }
    let n = m.dim;
    let symmetrized = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            re(m[(i, i)].re)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    });
    let eig = SymmetricEigen::try_new(symmetrized, f64::EPSILON, EIGEN_MAX_ITERATIONS)
        .ok_or_else(|| Error::Invariant(format!("eigensolver did not converge on a {n}x{n} matrix")))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        eigenvectors: ComplexMatrix::from_fn(n, |i, j| eig.eigenvectors[(i, order[j])]),
    })
}

/// `exp(-i H t)` with `ħ = 1`, built from the spectral decomposition of `H`.
pub fn unitary_from_hamiltonian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(Propagator::new(h)?.at(t))
}

/// Cached spectral decomposition of a time-independent Hamiltonian.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectrum: Spectrum,
}

impl Propagator {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            spectrum: eig_hermitian(h)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.spectrum.eigenvectors.dim
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `U(t) = V diag(e^{-iε_j t}) V†`.
    pub fn at(&self, t: f64) -> ComplexMatrix {
        self.spectrum
            .apply(|e| Complex64::from_polar(1.0, -e * t))
    }
}

/// Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::checked_hermitian_unit_trace(matrix)?;
        let min = eig_hermitian(&rho.matrix)?
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(rho)
    }

    /// Validates Hermiticity and trace only. Used where positivity follows
    /// from construction (unitary similarity, partial trace, projection).
    pub(crate) fn checked_hermitian_unit_trace(matrix: ComplexMatrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > HERM_TOL {
            return Err(Error::NonHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr - re(1.0)).norm() > TRACE_TOL {
            return Err(Error::NotNormalized(format!("trace {tr}")));
        }
        Ok(Self { matrix })
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// `|ψ⟩⟨ψ|` for a state vector, normalized on the way in.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized("zero state vector".into()));
        }
        let unit: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self {
            matrix: ComplexMatrix::outer(&unit),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    /// Real diagonal (the probabilities in the computational basis).
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.matrix.dim).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn spectrum(&self) -> Spectrum {
        eig_hermitian(&self.matrix).expect("density matrix is Hermitian by construction")
    }

    /// Eigenvalues in descending order, with values in `[-PSD_TOL, 0)`
    /// clamped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum()
            .eigenvalues
            .into_iter()
            .map(|e| if (-PSD_TOL..0.0).contains(&e) { 0.0 } else { e })
            .collect()
    }

    /// Reduced state of one factor of a `d_b ⊗ d_a` bipartition.
    pub fn reduced(&self, keep: Subsystem, dims: (usize, usize)) -> Result<Self> {
        Ok(Self {
            matrix: partial_trace(&self.matrix, keep, dims)?,
        })
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: tensor(&self.matrix, &other.matrix),
        }
    }

    /// `U ρ U†`.
    pub fn evolve_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.dim,
            });
        }
        Self::checked_hermitian_unit_trace(self.matrix.conjugate_by(u))
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}
