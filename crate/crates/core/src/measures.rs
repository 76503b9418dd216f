//! Quantum-information functionals: von Neumann entropy, l₁ and relative
//! entropy of coherence, entanglement of formation and mutual information.
//! All logarithms are base 2.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, re, ComplexMatrix, DensityMatrix, Spectrum, Subsystem, PSD_TOL};

/// Eigenvalues of ρ at or below this are treated as numerically zero when
/// building the concurrence matrix.
const RANK_CUTOFF: f64 = 1e-14;

const QUBITS: (usize, usize) = (2, 2);

/// `−Σ p log₂ p` with `0 log 0 = 0`. Values in `[−PSD_TOL, 0)` count as zero.
pub fn shannon_entropy(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = probabilities
        .into_iter()
        .map(|p| if (-PSD_TOL..=0.0).contains(&p) { 0.0 } else { p })
        .map(|p| if p > 0.0 { -p * p.log2() } else { 0.0 })
        .sum();
    h.max(0.0)
}

/// Binary entropy `h₂(x)`.
pub fn binary_entropy(x: f64) -> f64 {
    shannon_entropy([x, 1.0 - x])
}

/// `S(ρ) = −tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(rho.eigenvalues())
}

/// `C_l1(ρ) = Σ_{i≠j} |ρ_ij|`.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let n = m.dim();
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].norm())
        .sum()
}

/// `C_RE(ρ) = S(ρ_diag) − S(ρ)`.
pub fn relative_entropy_coherence(rho: &DensityMatrix) -> f64 {
    (shannon_entropy(rho.probabilities()) - von_neumann_entropy(rho)).max(0.0)
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    Ok(())
}

/// Two-qubit concurrence.
///
/// Writing `ρ = X X†` with the columns of `X` the eigenvectors scaled by
/// `√ε`, the square-rooted eigenvalues of `ρ ρ̃` (ρ̃ the spin-flipped state)
/// are the singular values of `τ = Xᵀ (σ_y ⊗ σ_y) X`. Dropping numerically
/// null eigenvalues keeps the pure-state case exact.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    Ok(concurrence_from_spectrum(&rho.spectrum()))
}

fn concurrence_from_spectrum(spectrum: &Spectrum) -> f64 {
    let columns: Vec<Vec<Complex64>> = spectrum
        .eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > RANK_CUTOFF)
        .map(|(k, &e)| {
            let w = e.sqrt();
            spectrum.eigenvector(k).into_iter().map(|z| z * w).collect()
        })
        .collect();
    let rank = columns.len();
    if rank == 0 {
        return 0.0;
    }

    // (σ_y ⊗ σ_y) x = (−x₃, x₂, x₁, −x₀)
    let flip = |x: &[Complex64]| [-x[3], x[2], x[1], -x[0]];
    let tau = ComplexMatrix::from_fn(rank, |k, l| {
        let fl = flip(&columns[l]);
        columns[k].iter().zip(fl).map(|(a, b)| a * b).sum()
    });
    let gram = &tau.adjoint() * &tau;
    let mut singular: Vec<f64> = eig_hermitian(&gram)
        .expect("τ†τ is Hermitian")
        .eigenvalues()
        .iter()
        .map(|&e| e.max(0.0).sqrt())
        .collect();
    singular.resize(4, 0.0);
    singular.sort_by(|a, b| b.total_cmp(a));
    (singular[0] - singular[1] - singular[2] - singular[3]).max(0.0)
}

fn formation_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()))
}

/// Entanglement of formation of a two-qubit state, in ebits.
pub fn entanglement_of_formation(rho: &DensityMatrix) -> Result<f64> {
    Ok(formation_from_concurrence(concurrence(rho)?))
}

/// Entropy of entanglement `S(tr_A ρ)` of a pure bipartite state.
pub fn entropy_of_entanglement(psi: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    Ok(von_neumann_entropy(&psi.reduced(Subsystem::B, dims)?))
}

/// `I(A:B) = S(A) + S(B) − S(AB)` for a two-qubit state, with round-off
/// below [`SUBADDITIVITY_TOL`] clamped to zero.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let s_b = von_neumann_entropy(&rho.reduced(Subsystem::B, QUBITS)?);
    let s_a = von_neumann_entropy(&rho.reduced(Subsystem::A, QUBITS)?);
    let i = s_a + s_b - von_neumann_entropy(rho);
    if i < -SUBADDITIVITY_TOL {
        return Err(Error::Invariant(format!("negative mutual information {i:.3e}")));
    }
    Ok(i.max(0.0))
}

/// Largest negative `S(A) + S(B) − S(AB)` attributed to round-off.
pub const SUBADDITIVITY_TOL: f64 = 1e-10;

/// Every measure of one two-qubit mental state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MeasureRecord {
    pub s_b: f64,
    pub s_a: f64,
    pub s_ab: f64,
    pub i_ab: f64,
    pub cl1_b: f64,
    pub cl1_a: f64,
    pub cl1_ab: f64,
    pub cre_ab: f64,
    pub ef_ab: f64,
}

impl MeasureRecord {
    pub const COLUMNS: [&'static str; 9] = [
        "S_B", "S_A", "S_AB", "I_AB", "Cl1_B", "Cl1_A", "Cl1_AB", "CRE_AB", "EF_AB",
    ];

    /// Evaluates all measures, sharing one diagonalization of ρ.
    pub fn of(rho: &DensityMatrix) -> Result<Self> {
        require_two_qubits(rho)?;
        let rho_b = rho.reduced(Subsystem::B, QUBITS)?;
        let rho_a = rho.reduced(Subsystem::A, QUBITS)?;
        let spectrum = rho.spectrum();
        let s_ab = shannon_entropy(spectrum.eigenvalues().iter().copied());
        let s_b = von_neumann_entropy(&rho_b);
        let s_a = von_neumann_entropy(&rho_a);
        let i_ab = s_a + s_b - s_ab;
        if i_ab < -SUBADDITIVITY_TOL {
            return Err(Error::Invariant(format!("negative mutual information {i_ab:.3e}")));
        }
        Ok(Self {
            s_b,
            s_a,
            s_ab,
            i_ab: i_ab.max(0.0),
            cl1_b: l1_coherence(&rho_b),
            cl1_a: l1_coherence(&rho_a),
            cl1_ab: l1_coherence(rho),
            cre_ab: (shannon_entropy(rho.probabilities()) - s_ab).max(0.0),
            ef_ab: formation_from_concurrence(concurrence_from_spectrum(&spectrum)),
        })
    }

    pub fn values(&self) -> [f64; 9] {
        [
            self.s_b, self.s_a, self.s_ab, self.i_ab, self.cl1_b, self.cl1_a, self.cl1_ab,
            self.cre_ab, self.ef_ab,
        ]
    }

    pub fn from_values(v: [f64; 9]) -> Self {
        Self {
            s_b: v[0],
            s_a: v[1],
            s_ab: v[2],
            i_ab: v[3],
            cl1_b: v[4],
            cl1_a: v[5],
            cl1_ab: v[6],
            cre_ab: v[7],
            ef_ab: v[8],
        }
    }

    /// Nonnegativity and `I = S_A + S_B − S_AB`, both to 1e-10.
    pub fn check(&self) -> Result<()> {
        if let Some((name, v)) = Self::COLUMNS
            .iter()
            .zip(self.values())
            .find(|(_, v)| !v.is_finite() || *v < -1e-10)
        {
            return Err(Error::Invariant(format!("{name} = {v}")));
        }
        let gap = self.i_ab - (self.s_a + self.s_b - self.s_ab).max(0.0);
        if gap.abs() > 1e-10 {
            return Err(Error::Invariant(format!("mutual information mismatch {gap:.3e}")));
        }
        Ok(())
    }
}

/// Composite trapezoid mean `(1/T) ∫ f dt` of samples on ascending `times`.
/// A single sample averages to itself.
pub fn trapezoid_mean(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.is_empty() || values.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            got: values.len(),
        });
    }
    if times.len() == 1 {
        return Ok(values[0]);
    }
    let span = times[times.len() - 1] - times[0];
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum();
    Ok(integral / span)
}

/// Trapezoid time average of a per-state functional along a trajectory.
pub fn time_average(traj: &Trajectory, f: impl Fn(&DensityMatrix) -> f64) -> Result<f64> {
    let values: Vec<f64> = traj.states().iter().map(f).collect();
    trapezoid_mean(traj.times(), &values)
}

/// `diag(ρ)` as a density matrix, the closest incoherent state.
pub fn dephased(rho: &DensityMatrix) -> DensityMatrix {
    let diag: Vec<Complex64> = rho.probabilities().into_iter().map(re).collect();
    DensityMatrix::new(ComplexMatrix::from_diagonal(&diag)).expect("diagonal of a density matrix")
}
