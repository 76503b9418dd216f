//! Mental states of one player: the prediction (B) ⊗ action (A) density
//! matrix, the built-in case catalog, and the correction matrix χ that
//! separates the uncertain branch from the classical mixture of the two
//! certain branches.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{re, ComplexMatrix, DensityMatrix, HERM_TOL, PSD_TOL};

/// Labels of the built-in scenarios, in display order.
pub const CATALOG_LABELS: [&str; 7] = ["1", "1*", "2", "3", "3*", "4", "4*"];

/// Prediction branch: uncertain about the opponent, or sure they defect /
/// cooperate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "u")]
    Uncertain,
    #[serde(rename = "d")]
    Defect,
    #[serde(rename = "c")]
    Cooperate,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Uncertain, Branch::Defect, Branch::Cooperate];

    pub fn label(self) -> &'static str {
        match self {
            Branch::Uncertain => "u",
            Branch::Defect => "d",
            Branch::Cooperate => "c",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parameters of a single-qubit state `[[p, λ], [λ*, 1 − p]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsystemParams {
    pub p: f64,
    pub lambda: Complex64,
}

impl SubsystemParams {
    pub fn new(p: f64, lambda: Complex64) -> Self {
        Self { p, lambda }
    }

    pub fn real(p: f64, lambda: f64) -> Self {
        Self::new(p, re(lambda))
    }

    pub fn classical(p: f64) -> Self {
        Self::real(p, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p.is_finite() || !(0.0..=1.0).contains(&self.p) {
            return Err(Error::NotNormalized(format!("probability {} outside [0, 1]", self.p)));
        }
        if !self.lambda.re.is_finite() || !self.lambda.im.is_finite() {
            return Err(Error::InvalidScenario(format!("non-finite coherence {}", self.lambda)));
        }
        let det = self.p * (1.0 - self.p) - self.lambda.norm_sqr();
        if det < -PSD_TOL {
            return Err(Error::NotPositive(det));
        }
        Ok(())
    }
}

/// `[[p, λ], [λ*, 1 − p]]`.
pub fn qubit_state(params: SubsystemParams) -> Result<DensityMatrix> {
    params.validate()?;
    let SubsystemParams { p, lambda } = params;
    DensityMatrix::checked_hermitian_unit_trace(ComplexMatrix::from_rows(&[
        [re(p), lambda],
        [lambda.conj(), re(1.0 - p)],
    ]))
}

/// Initial prediction and action parameters of one branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchParams {
    pub prediction: SubsystemParams,
    pub action: SubsystemParams,
}

/// A named initial condition: one [`BranchParams`] per prediction branch.
///
/// Construction enforces that the certain branches start from `|d⟩⟨d|` and
/// `|c⟩⟨c|` predictions and that all branches share the same action state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioConfig", into = "ScenarioConfig")]
pub struct ScenarioSpec {
    case_label: String,
    uncertain: BranchParams,
    defect: BranchParams,
    cooperate: BranchParams,
}

impl ScenarioSpec {
    pub fn new(
        case_label: impl Into<String>,
        uncertain: BranchParams,
        defect: BranchParams,
        cooperate: BranchParams,
    ) -> Result<Self> {
        let spec = Self {
            case_label: case_label.into(),
            uncertain,
            defect,
            cooperate,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds the three branches from the uncertain prediction and the
    /// shared action state.
    pub fn from_uncertain(
        case_label: impl Into<String>,
        prediction: SubsystemParams,
        action: SubsystemParams,
    ) -> Result<Self> {
        Self::new(
            case_label,
            BranchParams { prediction, action },
            BranchParams {
                prediction: SubsystemParams::classical(1.0),
                action,
            },
            BranchParams {
                prediction: SubsystemParams::classical(0.0),
                action,
            },
        )
    }

    /// One of the built-in cases, see [`CATALOG_LABELS`].
    pub fn catalog(label: &str) -> Result<Self> {
        let half = 0.5;
        let (prediction, action) = match label {
            "1" => (SubsystemParams::classical(half), SubsystemParams::classical(half)),
            "1*" => (
                SubsystemParams::classical(1.0 / 3.0),
                SubsystemParams::classical(3.0 / 5.0),
            ),
            "2" => (SubsystemParams::classical(half), SubsystemParams::real(half, half)),
            "3" => (SubsystemParams::real(half, half), SubsystemParams::classical(half)),
            "3*" => (SubsystemParams::real(half, 0.25), SubsystemParams::classical(half)),
            "4" => (SubsystemParams::real(half, half), SubsystemParams::real(half, half)),
            "4*" => (
                SubsystemParams::new(half, Complex64::new(0.0, 0.25)),
                SubsystemParams::real(half, half),
            ),
            other => {
                return Err(Error::InvalidScenario(format!(
                    "unknown case label {other:?}, expected one of {CATALOG_LABELS:?}"
                )))
            }
        };
        Self::from_uncertain(label, prediction, action)
    }

    /// All built-in cases in display order.
    pub fn catalog_all() -> Vec<Self> {
        CATALOG_LABELS
            .iter()
            .map(|l| Self::catalog(l).expect("catalog entries are valid"))
            .collect()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn case_label(&self) -> &str {
        &self.case_label
    }

    pub fn branch(&self, branch: Branch) -> &BranchParams {
        match branch {
            Branch::Uncertain => &self.uncertain,
            Branch::Defect => &self.defect,
            Branch::Cooperate => &self.cooperate,
        }
    }

    /// Probability `p_B` that the uncertain player predicts defection.
    pub fn p_b(&self) -> f64 {
        self.uncertain.prediction.p
    }

    /// Coherence `λ_B` of the uncertain prediction.
    pub fn lambda_b(&self) -> Complex64 {
        self.uncertain.prediction.lambda
    }

    /// The action state shared by all branches.
    pub fn action(&self) -> SubsystemParams {
        self.uncertain.action
    }

    fn validate(&self) -> Result<()> {
        for b in Branch::ALL {
            let params = self.branch(b);
            params.prediction.validate()?;
            params.action.validate()?;
        }
        let exact = |params: &BranchParams, p: f64| {
            params.prediction.p == p && params.prediction.lambda == re(0.0)
        };
        if !exact(&self.defect, 1.0) {
            return Err(Error::InvalidScenario(
                "branch d must start from the prediction |d><d|".into(),
            ));
        }
        if !exact(&self.cooperate, 0.0) {
            return Err(Error::InvalidScenario(
                "branch c must start from the prediction |c><c|".into(),
            ));
        }
        if self.defect.action != self.uncertain.action || self.cooperate.action != self.uncertain.action {
            return Err(Error::InvalidScenario(
                "the action state must be identical across branches".into(),
            ));
        }
        Ok(())
    }
}

/// `ρ^(α)(0) = ρ_B^(α)(0) ⊗ ρ_A(0)`.
pub fn initial_mental_state(spec: &ScenarioSpec, branch: Branch) -> DensityMatrix {
    let params = spec.branch(branch);
    let rho_b = qubit_state(params.prediction).expect("validated scenario");
    let rho_a = qubit_state(params.action).expect("validated scenario");
    rho_b.tensor(&rho_a)
}

/// Traceless Hermitian correction `χ = ρ^(u) − p_B ρ^(d) − (1 − p_B) ρ^(c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix {
    matrix: ComplexMatrix,
}

impl ChiMatrix {
    /// Forms χ from the three branch states and checks it is Hermitian with
    /// trace below `trace_tol`.
    pub fn from_branches(
        uncertain: &ComplexMatrix,
        defect: &ComplexMatrix,
        cooperate: &ComplexMatrix,
        p_b: f64,
        trace_tol: f64,
    ) -> Result<Self> {
        let mixture = &defect.scale_real(p_b) + &cooperate.scale_real(1.0 - p_b);
        let matrix = uncertain - &mixture;
        let dev = matrix.hermitian_deviation();
        if dev > HERM_TOL {
            return Err(Error::NonHermitian(dev));
        }
        let tr = matrix.trace().norm();
        if tr > trace_tol {
            return Err(Error::Invariant(format!("tr χ = {tr:.3e}")));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `Δ = Σ_i |χ_ii|`.
    pub fn diagonal_magnitude(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.norm()).sum()
    }
}

/// χ(0) from the initial branch states.
pub fn chi_initial(spec: &ScenarioSpec) -> ChiMatrix {
    let [u, d, c] = Branch::ALL.map(|b| initial_mental_state(spec, b));
    ChiMatrix::from_branches(u.matrix(), d.matrix(), c.matrix(), spec.p_b(), HERM_TOL)
        .expect("χ(0) of a validated scenario is Hermitian and traceless")
}

/// Diagonal density matrix for a joint distribution over `{dd, dc, cd, cc}`.
pub fn classical_mental_state(joint: [f64; 4]) -> Result<DensityMatrix> {
    if let Some(p) = joint.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::NotNormalized(format!("negative or non-finite probability {p}")));
    }
    let total: f64 = joint.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(format!("probabilities sum to {total}")));
    }
    DensityMatrix::checked_hermitian_unit_trace(ComplexMatrix::from_real_diagonal(&joint))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct BranchConfig {
    #[serde(rename = "pB")]
    p_b: f64,
    #[serde(rename = "lamB_re", default)]
    lam_b_re: f64,
    #[serde(rename = "lamB_im", default)]
    lam_b_im: f64,
    #[serde(rename = "pA")]
    p_a: f64,
    #[serde(rename = "lamA_re", default)]
    lam_a_re: f64,
    #[serde(rename = "lamA_im", default)]
    lam_a_im: f64,
}

impl From<BranchConfig> for BranchParams {
    fn from(c: BranchConfig) -> Self {
        Self {
            prediction: SubsystemParams::new(c.p_b, Complex64::new(c.lam_b_re, c.lam_b_im)),
            action: SubsystemParams::new(c.p_a, Complex64::new(c.lam_a_re, c.lam_a_im)),
        }
    }
}

impl From<BranchParams> for BranchConfig {
    fn from(b: BranchParams) -> Self {
        Self {
            p_b: b.prediction.p,
            lam_b_re: b.prediction.lambda.re,
            lam_b_im: b.prediction.lambda.im,
            p_a: b.action.p,
            lam_a_re: b.action.lambda.re,
            lam_a_im: b.action.lambda.im,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchesConfig {
    u: BranchConfig,
    d: BranchConfig,
    c: BranchConfig,
}

/// On-disk scenario layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ScenarioConfig {
    case_label: String,
    branches: BranchesConfig,
}

impl TryFrom<ScenarioConfig> for ScenarioSpec {
    type Error = Error;

    fn try_from(c: ScenarioConfig) -> Result<Self> {
        Self::new(c.case_label, c.branches.u.into(), c.branches.d.into(), c.branches.c.into())
    }
}

impl From<ScenarioSpec> for ScenarioConfig {
    fn from(s: ScenarioSpec) -> Self {
        Self {
            case_label: s.case_label,
            branches: BranchesConfig {
                u: s.uncertain.into(),
                d: s.defect.into(),
                c: s.cooperate.into(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, Subsystem};

    /// χ(0) entries written out block by block.
    fn chi_closed_form(spec: &ScenarioSpec) -> ComplexMatrix {
        let lb = spec.lambda_b();
        let SubsystemParams { p: pa, lambda: la } = spec.action();
        let z = re(0.0);
        ComplexMatrix::from_rows(&[
            [z, z, re(pa) * lb, la * lb],
            [z, z, la.conj() * lb, re(1.0 - pa) * lb],
            [re(pa) * lb.conj(), la * lb.conj(), z, z],
            [la.conj() * lb.conj(), re(1.0 - pa) * lb.conj(), z, z],
        ])
    }

    fn eig(params: SubsystemParams) -> Vec<f64> {
        qubit_state(params).unwrap().eigenvalues()
    }

    #[test]
    fn qubit_state_examples() {
        let mixed = qubit_state(SubsystemParams::classical(0.5)).unwrap();
        assert_eq!(mixed, DensityMatrix::maximally_mixed(2));

        let e = eig(SubsystemParams::real(0.5, 0.5));
        assert!((e[0] - 1.0).abs() < 1e-15 && e[1].abs() < 1e-15);

        let e = eig(SubsystemParams::new(0.5, Complex64::new(0.0, 0.25)));
        assert!((e[0] - 0.75).abs() < 1e-15 && (e[1] - 0.25).abs() < 1e-15);

        let rho = qubit_state(SubsystemParams::new(0.3, Complex64::new(0.1, -0.2))).unwrap();
        assert_eq!(rho.matrix()[(0, 1)], Complex64::new(0.1, -0.2));
        assert_eq!(rho.probabilities(), vec![0.3, 0.7]);
    }

    #[test]
    fn qubit_state_rejects_excess_coherence() {
        // |λ|² = 0.3 > p(1−p) = 0.25 but below the looser √(p(1−p)) = 0.5
        let err = qubit_state(SubsystemParams::real(0.5, 0.3f64.sqrt())).unwrap_err();
        assert!(matches!(err, Error::NotPositive(_)));
        assert!(qubit_state(SubsystemParams::classical(1.2)).is_err());
    }

    #[test]
    fn initial_states() {
        let case1 = ScenarioSpec::catalog("1").unwrap();
        assert!(initial_mental_state(&case1, Branch::Uncertain)
            .matrix()
            .max_abs_diff(DensityMatrix::maximally_mixed(4).matrix())
            < 1e-15);

        let star = ScenarioSpec::catalog("1*").unwrap();
        let expect = ComplexMatrix::from_real_diagonal(&[
            1.0 / 3.0 * 3.0 / 5.0,
            1.0 / 3.0 * 2.0 / 5.0,
            2.0 / 3.0 * 3.0 / 5.0,
            2.0 / 3.0 * 2.0 / 5.0,
        ]);
        assert!(initial_mental_state(&star, Branch::Uncertain).matrix().max_abs_diff(&expect) < 1e-15);

        let case4 = ScenarioSpec::catalog("4").unwrap();
        let mut expect = ComplexMatrix::zeros(4);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            expect[(i, j)] = re(0.5);
        }
        assert_eq!(initial_mental_state(&case4, Branch::Defect).matrix(), &expect);
    }

    #[test]
    fn every_catalog_state_is_a_valid_density_matrix() {
        for spec in ScenarioSpec::catalog_all() {
            for b in Branch::ALL {
                let rho = initial_mental_state(&spec, b);
                assert!(DensityMatrix::new(rho.into_matrix()).is_ok(), "{} {b}", spec.case_label());
            }
        }
    }

    #[test]
    fn chi_vanishes_without_prediction_coherence() {
        for label in ["1", "1*", "2"] {
            let chi = chi_initial(&ScenarioSpec::catalog(label).unwrap());
            assert!(chi.matrix().max_abs() < 1e-15, "case {label}");
        }
    }

    #[test]
    fn chi_case3_entries() {
        let chi = chi_initial(&ScenarioSpec::catalog("3").unwrap());
        let m = chi.matrix();
        assert!((m[(0, 2)] - re(0.25)).norm() < 1e-15);
        assert!((m[(1, 3)] - re(0.25)).norm() < 1e-15);
        assert_eq!(m[(0, 3)], re(0.0));
        assert_eq!(m[(1, 2)], re(0.0));
    }

    #[test]
    fn chi_case4_star_corner_entry() {
        let chi = chi_initial(&ScenarioSpec::catalog("4*").unwrap());
        assert!((chi.matrix()[(0, 3)] - Complex64::new(0.0, 0.125)).norm() < 1e-15);
    }

    #[test]
    fn chi_matches_closed_form_and_decomposes_initial_state() {
        for spec in ScenarioSpec::catalog_all() {
            let chi = chi_initial(&spec);
            assert!(chi.matrix().max_abs_diff(&chi_closed_form(&spec)) < 1e-12);
            assert!(chi.matrix().diagonal().iter().all(|z| z.norm() < 1e-12));
            assert!(chi.matrix().trace().norm() < 1e-12);
            assert!(chi.matrix().is_hermitian(HERM_TOL));

            let p_b = spec.p_b();
            let [u, d, c] = Branch::ALL.map(|b| initial_mental_state(&spec, b));
            let rebuilt = &(&d.matrix().scale_real(p_b) + &c.matrix().scale_real(1.0 - p_b)) + chi.matrix();
            assert!(rebuilt.max_abs_diff(u.matrix()) < 1e-12);
        }
    }

    #[test]
    fn classical_states() {
        let dd = classical_mental_state([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(dd.probabilities(), vec![1.0, 0.0, 0.0, 0.0]);
        let flat = classical_mental_state([0.25; 4]).unwrap();
        assert_eq!(flat, DensityMatrix::maximally_mixed(4));
        assert!(matches!(
            classical_mental_state([0.5, 0.5, 0.5, 0.0]),
            Err(Error::NotNormalized(_))
        ));
        assert!(classical_mental_state([1.5, -0.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn classical_marginals_satisfy_bayes_factorization() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let raw: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
            let total: f64 = raw.iter().sum();
            let joint = raw.map(|x| x / total);
            let joint = {
                let mut j = joint;
                j[3] = 1.0 - j[0] - j[1] - j[2];
                j
            };
            let rho = classical_mental_state(joint).unwrap();
            let rho_b = partial_trace(rho.matrix(), Subsystem::B, (2, 2)).unwrap();
            for i in 0..2 {
                let marginal = rho_b[(i, i)].re;
                for j in 0..2 {
                    let p_ij = joint[2 * i + j];
                    let conditional = p_ij / marginal;
                    assert!((conditional * marginal - p_ij).abs() < 1e-15);
                }
                let conditional_sum: f64 = (0..2).map(|j| joint[2 * i + j] / marginal).sum();
                assert!((conditional_sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scenario_invariants_are_enforced() {
        let action = SubsystemParams::classical(0.5);
        let u = BranchParams { prediction: SubsystemParams::classical(0.5), action };
        let d = BranchParams { prediction: SubsystemParams::classical(1.0), action };
        let c = BranchParams { prediction: SubsystemParams::classical(0.0), action };
        assert!(ScenarioSpec::new("ok", u, d, c).is_ok());
        assert!(ScenarioSpec::new("swapped", u, c, d).is_err());
        let other_action = BranchParams { prediction: SubsystemParams::classical(0.0), action: SubsystemParams::classical(0.4) };
        assert!(ScenarioSpec::new("action", u, d, other_action).is_err());
        assert!(ScenarioSpec::catalog("5").is_err());
    }

    #[test]
    fn scenario_json_layout() {
        let json = r#"{
            "case_label": "custom",
            "branches": {
                "u": {"pB": 0.5, "lamB_re": 0.0, "lamB_im": 0.25, "pA": 0.5, "lamA_re": 0.5, "lamA_im": 0.0},
                "d": {"pB": 1.0, "lamB_re": 0.0, "lamB_im": 0.0, "pA": 0.5, "lamA_re": 0.5, "lamA_im": 0.0},
                "c": {"pB": 0.0, "lamB_re": 0.0, "lamB_im": 0.0, "pA": 0.5, "lamA_re": 0.5, "lamA_im": 0.0}
            }
        }"#;
        let spec = ScenarioSpec::from_json_str(json).unwrap();
        let mut expect = ScenarioSpec::catalog("4*").unwrap();
        expect.case_label = "custom".into();
        assert_eq!(spec, expect);
        let back = ScenarioSpec::from_json_str(&spec.to_json_string().unwrap()).unwrap();
        assert_eq!(back, spec);

        let bad = json.replace(r#""pB": 1.0"#, r#""pB": 0.9"#);
        assert!(ScenarioSpec::from_json_str(&bad).is_err());
    }
}
