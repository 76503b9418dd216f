//! Sure-thing-principle analysis.
//!
//! For each prediction branch α the probability of defecting is
//! `p_α(t) = ⟨dd|ρ^(α)(t)|dd⟩ + ⟨cd|ρ^(α)(t)|cd⟩`. Linearity of the dynamics
//! carries the initial decomposition `ρ^(u) = p_B ρ^(d) + (1 − p_B) ρ^(c) + χ`
//! forward in time, so
//!
//! ```text
//! p_u(t) = p_B p_d(t) + (1 − p_B) p_c(t) + δ(t),   δ(t) = χ_dd,dd(t) + χ_cd,cd(t)
//! ```
//!
//! A classical mixture has `δ ≡ 0`; any nonzero `δ` is a violation. The
//! envelope `Δ(t) = Σ_i |χ_ii(t)|` bounds `|δ(t)|`.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{evolve_with, HamiltonianParams, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, Propagator};
use crate::measures::{trapezoid_mean, MeasureRecord};
use crate::states::{initial_mental_state, Branch, ChiMatrix, ScenarioSpec};
use crate::dynamics::build_hamiltonian;

/// Threshold on `max |δ|` separating numerical noise from a violation.
pub const DELTA_EPS: f64 = 1e-6;

/// Trace tolerance for χ(t) formed from evolved states.
pub const CHI_TRACE_TOL: f64 = 1e-10;

/// Tolerance of the decomposition identity `p_u = p_B p_d + (1−p_B) p_c + δ`.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

/// Basis indices of `|d_B d_A⟩` and `|c_B d_A⟩`.
const DEFECT_ACTION: [usize; 2] = [0, 2];

/// Probability that the action measurement yields defection.
pub fn choice_probability(rho: &DensityMatrix) -> f64 {
    DEFECT_ACTION.iter().map(|&i| rho.matrix()[(i, i)].re).sum()
}

/// `χ(t_k) = ρ^(u)(t_k) − p_B ρ^(d)(t_k) − (1 − p_B) ρ^(c)(t_k)`.
pub fn chi_at(
    traj_u: &Trajectory,
    traj_d: &Trajectory,
    traj_c: &Trajectory,
    p_b: f64,
    t_index: usize,
) -> Result<ChiMatrix> {
    if traj_u.times() != traj_d.times() || traj_u.times() != traj_c.times() {
        return Err(Error::GridMismatch);
    }
    if t_index >= traj_u.len() {
        return Err(Error::DimensionMismatch {
            expected: traj_u.len(),
            got: t_index,
        });
    }
    ChiMatrix::from_branches(
        traj_u.states()[t_index].matrix(),
        traj_d.states()[t_index].matrix(),
        traj_c.states()[t_index].matrix(),
        p_b,
        CHI_TRACE_TOL,
    )
}

/// `δ = χ_dd,dd + χ_cd,cd`. The imaginary parts of the diagonal are below
/// the Hermiticity tolerance and are dropped.
pub fn delta_at(chi: &ChiMatrix) -> f64 {
    DEFECT_ACTION.iter().map(|&i| chi.matrix()[(i, i)].re).sum()
}

/// Choice probabilities and interference terms at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StpRecord {
    pub t: f64,
    pub p_u: f64,
    pub p_d: f64,
    pub p_c: f64,
    pub delta: f64,
    /// `Δ = Σ_i |χ_ii|`.
    pub delta_envelope: f64,
}

impl StpRecord {
    /// `p_B p_d + (1 − p_B) p_c`, the classical prediction for `p_u`.
    pub fn classical_mixture(&self, p_b: f64) -> f64 {
        p_b * self.p_d + (1.0 - p_b) * self.p_c
    }

    pub fn check(&self, p_b: f64) -> Result<()> {
        let gap = self.p_u - self.classical_mixture(p_b) - self.delta;
        if gap.abs() > DECOMPOSITION_TOL {
            return Err(Error::Invariant(format!(
                "decomposition identity off by {gap:.3e} at t = {}",
                self.t
            )));
        }
        if self.delta_envelope < self.delta.abs() - 1e-12 {
            return Err(Error::Invariant(format!(
                "Δ = {} < |δ| = {} at t = {}",
                self.delta_envelope,
                self.delta.abs(),
                self.t
            )));
        }
        for p in [self.p_u, self.p_d, self.p_c] {
            if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(Error::Invariant(format!("probability {p} at t = {}", self.t)));
            }
        }
        Ok(())
    }
}

/// Whether, and from when, a scenario violates the principle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StpVerdict {
    pub violated: bool,
    pub max_abs_delta: f64,
    /// First sample time with `|δ| > DELTA_EPS`.
    pub onset_time: Option<f64>,
}

pub fn stp_verdict(records: &[StpRecord]) -> Result<StpVerdict> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let max_abs_delta = records.iter().map(|r| r.delta.abs()).fold(0.0, f64::max);
    let onset_time = records.iter().find(|r| r.delta.abs() > DELTA_EPS).map(|r| r.t);
    Ok(StpVerdict {
        violated: max_abs_delta > DELTA_EPS,
        max_abs_delta,
        onset_time,
    })
}

/// The three branch trajectories of one scenario under one Hamiltonian.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    spec: ScenarioSpec,
    hamiltonian: HamiltonianParams,
    propagator: Propagator,
    trajectories: [Trajectory; 3],
}

impl ScenarioRun {
    pub fn simulate(spec: &ScenarioSpec, hamiltonian: &HamiltonianParams, grid: &TimeGrid) -> Result<Self> {
        hamiltonian.validate()?;
        let propagator = Propagator::new(&build_hamiltonian(hamiltonian))?;
        let mut trajectories: Vec<Trajectory> = Branch::ALL
            .par_iter()
            .map(|&b| evolve_with(&propagator, &initial_mental_state(spec, b), grid))
            .collect::<Result<_>>()?;
        let cooperate = trajectories.pop().expect("three branches");
        let defect = trajectories.pop().expect("three branches");
        let uncertain = trajectories.pop().expect("three branches");
        Ok(Self {
            spec: spec.clone(),
            hamiltonian: *hamiltonian,
            propagator,
            trajectories: [uncertain, defect, cooperate],
        })
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn hamiltonian(&self) -> &HamiltonianParams {
        &self.hamiltonian
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn times(&self) -> &[f64] {
        self.trajectories[0].times()
    }

    pub fn trajectory(&self, branch: Branch) -> &Trajectory {
        &self.trajectories[branch as usize]
    }

    pub fn chi(&self, t_index: usize) -> Result<ChiMatrix> {
        let [u, d, c] = &self.trajectories;
        chi_at(u, d, c, self.spec.p_b(), t_index)
    }

    /// χ(t_k) propagated directly, `U(t_k) χ(0) U†(t_k)`.
    pub fn chi_propagated(&self, t_index: usize) -> Result<ComplexMatrix> {
        let chi0 = self.chi(0)?;
        let t = self.times()[t_index] - self.times()[0];
        Ok(chi0.matrix().conjugate_by(&self.propagator.at(t)))
    }

    /// One [`StpRecord`] per sample, each checked against its invariants.
    pub fn stp_records(&self) -> Result<Vec<StpRecord>> {
        let p_b = self.spec.p_b();
        (0..self.times().len())
            .into_par_iter()
            .map(|k| {
                let chi = self.chi(k)?;
                let [u, d, c] = &self.trajectories;
                let record = StpRecord {
                    t: self.times()[k],
                    p_u: choice_probability(&u.states()[k]),
                    p_d: choice_probability(&d.states()[k]),
                    p_c: choice_probability(&c.states()[k]),
                    delta: delta_at(&chi),
                    delta_envelope: chi.diagonal_magnitude(),
                };
                record.check(p_b)?;
                Ok(record)
            })
            .collect()
    }

    pub fn verdict(&self) -> Result<StpVerdict> {
        stp_verdict(&self.stp_records()?)
    }

    /// Measures of one branch at every sample, each checked.
    pub fn measures(&self, branch: Branch) -> Result<Vec<MeasureRecord>> {
        self.trajectory(branch)
            .states()
            .par_iter()
            .map(|rho| {
                let r = MeasureRecord::of(rho)?;
                r.check()?;
                Ok(r)
            })
            .collect()
    }

    /// Trapezoid time averages of every measure of one branch.
    pub fn mean_measures(&self, branch: Branch) -> Result<MeasureRecord> {
        mean_of(self.times(), &self.measures(branch)?)
    }
}

/// Column-wise trapezoid mean of a measure series.
pub fn mean_of(times: &[f64], records: &[MeasureRecord]) -> Result<MeasureRecord> {
    let mut means = [0.0; 9];
    for (col, mean) in means.iter_mut().enumerate() {
        let series: Vec<f64> = records.iter().map(|r| r.values()[col]).collect();
        *mean = trapezoid_mean(times, &series)?;
    }
    Ok(MeasureRecord::from_values(means))
}
