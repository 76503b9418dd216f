//! Unitary mental dynamics and the final projective measurement on the
//! action.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{re, tensor, ComplexMatrix, DensityMatrix, Propagator};

/// Default payoff constant `μ_d = μ_c`.
pub const DEFAULT_MU: f64 = 0.59;
/// Default prediction/action coupling `γ`.
pub const DEFAULT_GAMMA: f64 = 1.74;
/// Default number of grid samples over `[0, 2π]`.
pub const DEFAULT_SAMPLES: usize = 4097;
/// Default evolution horizon.
pub const DEFAULT_T_MAX: f64 = 2.0 * PI;

/// Outcome probabilities below this leave the post-measurement state undefined.
pub const DEGENERATE_PROBABILITY: f64 = 1e-14;

/// Constants of the two-term Hamiltonian `H = H_A + H_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    pub mu_d: f64,
    pub mu_c: f64,
    pub gamma: f64,
}

impl Default for HamiltonianParams {
    fn default() -> Self {
        Self {
            mu_d: DEFAULT_MU,
            mu_c: DEFAULT_MU,
            gamma: DEFAULT_GAMMA,
        }
    }
}

impl HamiltonianParams {
    /// Payoffs independent of the prediction: `μ_d = μ_c = mu`.
    pub fn symmetric(mu: f64, gamma: f64) -> Self {
        Self {
            mu_d: mu,
            mu_c: mu,
            gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.mu_d, self.mu_c, self.gamma].iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("non-finite Hamiltonian parameters {self:?}")))
        }
    }
}

fn action_block(mu: f64) -> ComplexMatrix {
    let n = 1.0 / (1.0 + mu * mu).sqrt();
    ComplexMatrix::from_real_rows(&[[mu * n, n], [n, -mu * n]])
}

fn prediction_block(nu: f64, gamma: f64) -> ComplexMatrix {
    let g = -gamma / SQRT_2;
    ComplexMatrix::from_real_rows(&[[g * nu, g], [g, -g * nu]])
}

fn projector(k: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(2);
    p[(k, k)] = re(1.0);
    p
}

/// Term in which the prediction controls the action:
/// `Σ_i |i⟩⟨i|_B ⊗ H_Ai`.
pub fn action_hamiltonian(params: &HamiltonianParams) -> ComplexMatrix {
    &tensor(&projector(0), &action_block(params.mu_d))
        + &tensor(&projector(1), &action_block(params.mu_c))
}

/// Term in which the action controls the prediction:
/// `Σ_j H_Bj ⊗ |j⟩⟨j|_A` with `ν_d = −ν_c = 1`.
pub fn prediction_hamiltonian(params: &HamiltonianParams) -> ComplexMatrix {
    &tensor(&prediction_block(1.0, params.gamma), &projector(0))
        + &tensor(&prediction_block(-1.0, params.gamma), &projector(1))
}

/// `H = H_A + H_B` in the basis `{dd, dc, cd, cc}`.
pub fn build_hamiltonian(params: &HamiltonianParams) -> ComplexMatrix {
    &action_hamiltonian(params) + &prediction_hamiltonian(params)
}

/// Ascending sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidConfig("non-finite sample time".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("time grid must be strictly ascending".into()));
        }
        Ok(Self { times })
    }

    /// `samples` equally spaced points on `[0, t_max]`, both ends included.
    pub fn uniform(t_max: f64, samples: usize) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidConfig(format!("samples must be >= 2, got {samples}")));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidConfig(format!("t_max must be positive, got {t_max}")));
        }
        let step = t_max / (samples - 1) as f64;
        let mut times: Vec<f64> = (0..samples).map(|k| k as f64 * step).collect();
        times[samples - 1] = t_max;
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::uniform(DEFAULT_T_MAX, DEFAULT_SAMPLES).expect("default grid is valid")
    }
}

/// Sampled states `ρ(t_k)` of one branch.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(&self.states)
    }

    /// Largest change of any eigenvalue relative to the first sample.
    pub fn spectral_drift(&self) -> f64 {
        let Some(first) = self.states.first() else {
            return 0.0;
        };
        let reference = first.eigenvalues();
        self.states
            .iter()
            .map(|rho| {
                rho.eigenvalues()
                    .iter()
                    .zip(&reference)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// `ρ(t_k) = U(t_k) ρ0 U†(t_k)` for every grid point, with each `U(t_k)`
/// rebuilt from the cached spectral decomposition of `h`.
pub fn evolve(rho0: &DensityMatrix, h: &ComplexMatrix, grid: &TimeGrid) -> Result<Trajectory> {
    evolve_with(&Propagator::new(h)?, rho0, grid)
}

/// As [`evolve`] with a precomputed propagator, so several branches can
/// share one diagonalization.
pub fn evolve_with(
    propagator: &Propagator,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    if propagator.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: propagator.dim(),
            got: rho0.dim(),
        });
    }
    let states = grid
        .times()
        .iter()
        .map(|&t| rho0.evolve_by(&propagator.at(t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: grid.times().to_vec(),
        states,
    })
}

/// The player's own move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Defect,
    Cooperate,
}

impl Action {
    pub const ALL: [Action; 2] = [Action::Defect, Action::Cooperate];

    fn index(self) -> usize {
        match self {
            Action::Defect => 0,
            Action::Cooperate => 1,
        }
    }
}

/// One branch of the projective action measurement.
#[derive(Debug, Clone)]
pub struct ActionOutcome {
    pub action: Action,
    pub probability: f64,
    /// `Π ρ Π / p`; `None` when `p` is below [`DEGENERATE_PROBABILITY`].
    pub post_state: Option<DensityMatrix>,
}

/// Projective measurement `Π_j = I_B ⊗ |j⟩⟨j|_A` on the action factor.
pub fn measure_action(rho: &DensityMatrix) -> Result<[ActionOutcome; 2]> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let outcome = |action: Action| -> Result<ActionOutcome> {
        let pi = tensor(&ComplexMatrix::identity(2), &projector(action.index()));
        let projected = &(&pi * rho.matrix()) * &pi;
        let probability = projected.trace().re.clamp(0.0, 1.0);
        let post_state = if probability < DEGENERATE_PROBABILITY {
            None
        } else {
            Some(DensityMatrix::checked_hermitian_unit_trace(
                projected.scale_real(1.0 / probability),
            )?)
        };
        Ok(ActionOutcome {
            action,
            probability: if post_state.is_none() { 0.0 } else { probability },
            post_state,
        })
    };
    Ok([outcome(Action::Defect)?, outcome(Action::Cooperate)?])
}
