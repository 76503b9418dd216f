//! Quantum-probabilistic model of a Prisoner's Dilemma player.
//!
//! A player's mental state is a two-qubit density matrix on
//! `B ⊗ A`, where `B` holds the prediction of the opponent's move and `A`
//! the player's own action, both in the basis `{d, c}`. Three branches are
//! tracked: the prediction is unknown (`u`), or known to be defect (`d`) or
//! cooperate (`c`). Each evolves under the same Hamiltonian, and the gap
//!
//! ```text
//! δ(t) = p_u(t) − p_B p_d(t) − (1 − p_B) p_c(t)
//! ```
//!
//! measures how far the choice departs from the sure-thing principle.
//!
//! ```
//! use qdecision::{HamiltonianParams, ScenarioRun, ScenarioSpec, TimeGrid};
//!
//! let spec = ScenarioSpec::catalog("4*").unwrap();
//! let grid = TimeGrid::uniform(std::f64::consts::TAU, 257).unwrap();
//! let run = ScenarioRun::simulate(&spec, &HamiltonianParams::default(), &grid).unwrap();
//! assert!(run.verdict().unwrap().violated);
//! ```
//!
//! Modules:
//! - [`linalg`]: small dense complex matrices, eigensolver, density matrices
//! - [`states`]: scenario catalog and initial mental states
//! - [`dynamics`]: Hamiltonian and unitary evolution
//! - [`measures`]: entropies, coherence, concurrence, entanglement of formation
//! - [`stp`]: δ(t), the χ matrix and violation verdicts
//! - [`sorkin`]: two- and three-slit interference terms
//! - [`report`], [`runner`]: reference tables, CSV output and batch runs

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod report;
pub mod runner;
pub mod sorkin;
pub mod states;
pub mod stp;

pub use dynamics::{build_hamiltonian, evolve, measure_action, HamiltonianParams, TimeGrid, Trajectory};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, Propagator, Subsystem};
pub use measures::MeasureRecord;
pub use num_complex::Complex64;
pub use runner::{Output, RunConfig, ScenarioSource};
pub use sorkin::{QuantumSlitModel, SlitExperiment, SorkinSurvey};
pub use states::{Branch, ScenarioSpec, SubsystemParams, CATALOG_LABELS};
pub use stp::{ScenarioRun, StpRecord, StpVerdict};
