//! Sorkin interference hierarchy over slit-subset detection probabilities.
//!
//! `I₂ = P₁₂ − P₁ − P₂` vanishes for classical (additive) assignments, while
//! `I₃ = P₁₂₃ − P₁₂ − P₁₃ − P₂₃ + P₁ + P₂ + P₃` vanishes for both classical
//! and quantum ones. [`QuantumSlitModel`] produces assignments of the form
//! `P_S = tr(Π_S ρ Π_S M)`, so any measured `I₃ ≠ 0` rules out every such
//! model.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, DensityMatrix, HERM_TOL, PSD_TOL};
use crate::stp::StpRecord;

/// Tolerance for model invariants and for probabilities straying outside `[0, 1]`.
const MODEL_TOL: f64 = 1e-12;

/// Canonical key of a slit subset: sorted 1-based indices, e.g. `"13"`.
pub fn subset_key(slits: &[usize]) -> String {
    let mut s = slits.to_vec();
    s.sort_unstable();
    s.dedup();
    s.iter().map(|i| i.to_string()).collect()
}

/// All non-empty subsets of `{1..n}` as sorted index lists, smallest first.
pub fn nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

/// Detection probabilities for subsets of open slits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlitExperiment {
    n_slits: usize,
    probs: BTreeMap<String, f64>,
}

impl SlitExperiment {
    /// Accepts any subset of the `2ⁿ − 1` keys; missing ones surface as
    /// [`Error::MissingSubset`] when an interference term needs them.
    pub fn new(n_slits: usize, probs: BTreeMap<String, f64>) -> Result<Self> {
        if !(2..=3).contains(&n_slits) {
            return Err(Error::InvalidModel(format!("{n_slits} slits, expected 2 or 3")));
        }
        let valid: Vec<String> = nonempty_subsets(n_slits).iter().map(|s| subset_key(s)).collect();
        for (key, p) in &probs {
            if !valid.contains(key) {
                return Err(Error::InvalidModel(format!("unknown subset key {key:?}")));
            }
            if !p.is_finite() || !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidModel(format!("P_{key} = {p} outside [0, 1]")));
            }
        }
        Ok(Self { n_slits, probs })
    }

    pub fn from_pairs<'a>(n_slits: usize, pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        Self::new(n_slits, pairs.into_iter().map(|(k, p)| (k.to_string(), p)).collect())
    }

    pub fn n_slits(&self) -> usize {
        self.n_slits
    }

    pub fn probabilities(&self) -> &BTreeMap<String, f64> {
        &self.probs
    }

    /// Fails on the first absent subset, in canonical order.
    pub fn require_complete(&self) -> Result<()> {
        for s in nonempty_subsets(self.n_slits) {
            self.get(&s)?;
        }
        Ok(())
    }

    pub fn get(&self, slits: &[usize]) -> Result<f64> {
        let key = subset_key(slits);
        self.probs.get(&key).copied().ok_or(Error::MissingSubset(key))
    }

    /// Interchange form: a flat JSON object mapping subset key to probability.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.probs)?)
    }

    /// Parses the flat JSON form; the slit count is the largest index seen.
    pub fn from_json(s: &str) -> Result<Self> {
        let probs: BTreeMap<String, f64> = serde_json::from_str(s)?;
        let n = probs
            .keys()
            .flat_map(|k| k.chars())
            .filter_map(|c| c.to_digit(10))
            .max()
            .unwrap_or(0) as usize;
        Self::new(n, probs)
    }
}

/// `P_{ij} − P_i − P_j` for one pair of slits of any experiment.
pub fn pair_interference(exp: &SlitExperiment, i: usize, j: usize) -> Result<f64> {
    Ok(exp.get(&[i, j])? - exp.get(&[i])? - exp.get(&[j])?)
}

/// `I₂ = P₁₂ − P₁ − P₂`.
pub fn interference_i2(exp: &SlitExperiment) -> Result<f64> {
    if exp.n_slits != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: exp.n_slits });
    }
    exp.require_complete()?;
    pair_interference(exp, 1, 2)
}

/// `I₃ = P₁₂₃ − P₁₂ − P₁₃ − P₂₃ + P₁ + P₂ + P₃`.
pub fn interference_i3(exp: &SlitExperiment) -> Result<f64> {
    if exp.n_slits != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: exp.n_slits });
    }
    exp.require_complete()?;
    let p = |s: &[usize]| exp.get(s);
    Ok(p(&[1, 2, 3])? - p(&[1, 2])? - p(&[1, 3])? - p(&[2, 3])? + p(&[1])? + p(&[2])? + p(&[3])?)
}

/// Reads a choice-probability record as a two-slit experiment whose slits
/// are the two certain predictions: `P₁ = p_B p_d`, `P₂ = (1 − p_B) p_c`,
/// `P₁₂ = p_u`. Its `I₂` is the record's δ.
pub fn stp_as_two_slit(record: &StpRecord, p_b: f64) -> Result<SlitExperiment> {
    let clip = |x: f64| x.clamp(0.0, 1.0);
    SlitExperiment::from_pairs(
        2,
        [
            ("1", clip(p_b * record.p_d)),
            ("2", clip((1.0 - p_b) * record.p_c)),
            ("12", clip(record.p_u)),
        ],
    )
}

/// Quantum generator of slit experiments: state `ρ`, one rank-1 projector per
/// slit, and a detection effect `0 ≤ M ≤ I`.
#[derive(Debug, Clone)]
pub struct QuantumSlitModel {
    rho: DensityMatrix,
    projectors: Vec<ComplexMatrix>,
    effect: ComplexMatrix,
}

impl QuantumSlitModel {
    pub fn new(rho: DensityMatrix, projectors: Vec<ComplexMatrix>, effect: ComplexMatrix) -> Result<Self> {
        let n = rho.dim();
        if projectors.len() != n || effect.dim() != n || projectors.iter().any(|p| p.dim() != n) {
            return Err(Error::InvalidModel(format!(
                "need {n} projectors and an effect of dimension {n}"
            )));
        }
        let mut sum = ComplexMatrix::zeros(n);
        for (i, p) in projectors.iter().enumerate() {
            if (p.trace().re - 1.0).abs() > MODEL_TOL || (p * p).max_abs_diff(p) > MODEL_TOL {
                return Err(Error::InvalidModel(format!("projector {} is not rank-1 idempotent", i + 1)));
            }
            for q in &projectors[i + 1..] {
                if (p * q).max_abs() > MODEL_TOL {
                    return Err(Error::InvalidModel("projectors are not orthogonal".into()));
                }
            }
            sum = &sum + p;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(n)) > MODEL_TOL {
            return Err(Error::InvalidModel("projectors do not sum to the identity".into()));
        }
        let spectrum = eig_hermitian(&effect).map_err(|_| Error::InvalidModel("effect is not Hermitian".into()))?;
        let ev = spectrum.eigenvalues();
        if ev[0] > 1.0 + PSD_TOL || ev[n - 1] < -PSD_TOL {
            return Err(Error::InvalidModel(format!("effect eigenvalues {ev:?} outside [0, 1]")));
        }
        Ok(Self { rho, projectors, effect })
    }

    /// Projectors onto the computational basis.
    pub fn computational(rho: DensityMatrix, effect: ComplexMatrix) -> Result<Self> {
        let n = rho.dim();
        let projectors = (0..n)
            .map(|k| ComplexMatrix::from_fn(n, |i, j| if i == k && j == k { 1.0.into() } else { 0.0.into() }))
            .collect();
        Self::new(rho, projectors, effect)
    }

    /// Projectors onto the columns of a unitary.
    pub fn in_basis(rho: DensityMatrix, basis: &ComplexMatrix, effect: ComplexMatrix) -> Result<Self> {
        let n = basis.dim();
        let projectors = (0..n)
            .map(|k| {
                let v: Vec<Complex64> = (0..n).map(|i| basis[(i, k)]).collect();
                ComplexMatrix::outer(&v)
            })
            .collect();
        Self::new(rho, projectors, effect)
    }

    pub fn n_slits(&self) -> usize {
        self.projectors.len()
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    fn probability(&self, slits: &[usize]) -> Result<f64> {
        let n = self.n_slits();
        let mut pi = ComplexMatrix::zeros(n);
        for &s in slits {
            pi = &pi + &self.projectors[s - 1];
        }
        let p = (&(&(&pi * self.rho.matrix()) * &pi) * &self.effect).trace();
        if p.im.abs() > HERM_TOL || p.re < -MODEL_TOL || p.re > 1.0 + MODEL_TOL {
            return Err(Error::InvalidModel(format!("P_{} = {p}", subset_key(slits))));
        }
        Ok(p.re.clamp(0.0, 1.0))
    }
}

/// `P_S = tr(Π_S ρ Π_S M)` with `Π_S = Σ_{i∈S} π_i` for every non-empty `S`.
pub fn run_slit_model(model: &QuantumSlitModel) -> Result<SlitExperiment> {
    let n = model.n_slits();
    let probs = nonempty_subsets(n)
        .iter()
        .map(|s| Ok((subset_key(s), model.probability(s)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    SlitExperiment::new(n, probs)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-like random unitary: eigenvectors of a GUE matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, |_, _| gaussian_complex(rng));
    let h = &g + &g.adjoint();
    eig_hermitian(&h).expect("G + G† is Hermitian").eigenvectors().clone()
}

/// Random mixed state `G G† / tr(G G†)` from a complex Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(n, |_, _| gaussian_complex(rng));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    let m = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            w[(i, i)].re.into()
        } else {
            (w[(i, j)] + w[(j, i)].conj()) * 0.5
        }
    })
    .scale_real(1.0 / tr);
    DensityMatrix::new(m).expect("Ginibre construction is a density matrix")
}

/// Random effect with eigenvalues uniform in `[0, 1]` in a random basis.
pub fn random_effect<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let u = random_unitary(n, rng);
    let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let m = &(&u * &ComplexMatrix::from_real_diagonal(&weights)) * &u.adjoint();
    ComplexMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Random state, random slit basis and random effect.
pub fn random_slit_model<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QuantumSlitModel {
    let rho = random_density_matrix(n, rng);
    let basis = random_unitary(n, rng);
    let effect = random_effect(n, rng);
    QuantumSlitModel::in_basis(rho, &basis, effect).expect("random model is valid")
}

/// Interference terms of one random three-slit draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SorkinDraw {
    pub index: u64,
    pub i2_12: f64,
    pub i2_13: f64,
    pub i2_23: f64,
    pub i3: f64,
}

impl SorkinDraw {
    pub fn max_abs_i2(&self) -> f64 {
        self.i2_12.abs().max(self.i2_13.abs()).max(self.i2_23.abs())
    }
}

/// Monte-Carlo survey over random three-level slit models.
#[derive(Debug, Clone, Serialize)]
pub struct SorkinSurvey {
    pub seed: u64,
    pub draws: Vec<SorkinDraw>,
}

impl SorkinSurvey {
    /// Draw `k` uses its own ChaCha stream, so results do not depend on
    /// thread scheduling.
    pub fn run(draws: u64, seed: u64) -> Result<Self> {
        let draws = (0..draws)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k);
                let exp = run_slit_model(&random_slit_model(3, &mut rng))?;
                Ok(SorkinDraw {
                    index: k,
                    i2_12: pair_interference(&exp, 1, 2)?,
                    i2_13: pair_interference(&exp, 1, 3)?,
                    i2_23: pair_interference(&exp, 2, 3)?,
                    i3: interference_i3(&exp)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { seed, draws })
    }

    pub fn max_abs_i3(&self) -> f64 {
        self.draws.iter().map(|d| d.i3.abs()).fold(0.0, f64::max)
    }

    /// Fraction of draws where `|P₁₂ − P₁ − P₂|` exceeds `threshold`.
    pub fn fraction_i2_above(&self, threshold: f64) -> f64 {
        if self.draws.is_empty() {
            return 0.0;
        }
        let hits = self.draws.iter().filter(|d| d.i2_12.abs() > threshold).count();
        hits as f64 / self.draws.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;

    #[test]
    fn subsets_are_canonical() {
        let keys: Vec<String> = nonempty_subsets(3).iter().map(|s| subset_key(s)).collect();
        assert_eq!(keys, ["1", "2", "3", "12", "13", "23", "123"]);
        assert_eq!(subset_key(&[3, 1]), "13");
    }

    #[test]
    fn classical_assignments_have_no_interference() {
        let two = SlitExperiment::from_pairs(2, [("1", 0.2), ("2", 0.3), ("12", 0.5)]).unwrap();
        assert!(interference_i2(&two).unwrap().abs() < 1e-15);

        let (a, b, c) = (0.1, 0.25, 0.4);
        let three = SlitExperiment::from_pairs(
            3,
            [("1", a), ("2", b), ("3", c), ("12", a + b), ("13", a + c), ("23", b + c), ("123", a + b + c)],
        )
        .unwrap();
        assert!(interference_i3(&three).unwrap().abs() < 1e-15);
    }

    #[test]
    fn i3_is_linear_in_each_probability() {
        let base: Vec<(&str, f64)> =
            vec![("1", 0.1), ("2", 0.2), ("3", 0.15), ("12", 0.35), ("13", 0.2), ("23", 0.3), ("123", 0.4)];
        let i3 = |pairs: &[(&str, f64)]| interference_i3(&SlitExperiment::from_pairs(3, pairs.iter().copied()).unwrap()).unwrap();
        let reference = i3(&base);
        let coefficients = [1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0];
        for (k, coeff) in coefficients.iter().enumerate() {
            let mut bumped = base.clone();
            bumped[k].1 += 0.1;
            assert!((i3(&bumped) - reference - 0.1 * coeff).abs() < 1e-14, "{}", base[k].0);
        }
    }

    #[test]
    fn missing_subset_is_reported() {
        let partial = SlitExperiment::from_pairs(3, [("1", 0.1), ("2", 0.2)]).unwrap();
        assert!(matches!(interference_i3(&partial), Err(Error::MissingSubset(k)) if k == "3"));
        let two = SlitExperiment::from_pairs(2, [("1", 0.1), ("12", 0.2)]).unwrap();
        assert!(matches!(interference_i2(&two), Err(Error::MissingSubset(k)) if k == "2"));
        assert!(interference_i2(&partial).is_err());
    }

    #[test]
    fn bad_keys_and_values_are_rejected() {
        assert!(SlitExperiment::from_pairs(2, [("3", 0.1)]).is_err());
        assert!(SlitExperiment::from_pairs(2, [("1", 1.5)]).is_err());
        assert!(SlitExperiment::from_pairs(4, [("1", 0.5)]).is_err());
    }

    #[test]
    fn equal_superposition_interferes_constructively() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityMatrix::pure(&[re(s), re(s)]).unwrap();
        let effect = ComplexMatrix::outer(&[re(s), re(s)]);
        let exp = run_slit_model(&QuantumSlitModel::computational(rho, effect).unwrap()).unwrap();
        // P₁ = P₂ = 1/4, P₁₂ = 1
        assert!((exp.get(&[1]).unwrap() - 0.25).abs() < 1e-15);
        assert!((exp.get(&[1, 2]).unwrap() - 1.0).abs() < 1e-15);
        assert!((interference_i2(&exp).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_with_unit_effect_counts_open_slits() {
        let model = QuantumSlitModel::computational(DensityMatrix::maximally_mixed(3), ComplexMatrix::identity(3)).unwrap();
        let exp = run_slit_model(&model).unwrap();
        for s in nonempty_subsets(3) {
            assert!((exp.get(&s).unwrap() - s.len() as f64 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_slit_probability_is_diagonal_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density_matrix(3, &mut rng);
        let effect = random_effect(3, &mut rng);
        let exp = run_slit_model(&QuantumSlitModel::computational(rho.clone(), effect.clone()).unwrap()).unwrap();
        for i in 0..3 {
            let expect = rho.matrix()[(i, i)].re * effect[(i, i)].re;
            assert!((exp.get(&[i + 1]).unwrap() - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_models_are_rejected() {
        let rho = DensityMatrix::maximally_mixed(2);
        let overlapping = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)];
        assert!(QuantumSlitModel::new(rho.clone(), overlapping, ComplexMatrix::identity(2)).is_err());
        let too_big = ComplexMatrix::identity(2).scale_real(2.0);
        assert!(QuantumSlitModel::computational(rho, too_big).is_err());
    }

    #[test]
    fn stp_record_maps_delta_to_i2() {
        let record = StpRecord { t: 1.0, p_u: 0.42, p_d: 0.6, p_c: 0.3, delta: 0.42 - 0.45, delta_envelope: 0.05 };
        let exp = stp_as_two_slit(&record, 0.5).unwrap();
        assert!((interference_i2(&exp).unwrap() - record.delta).abs() < 1e-15);
    }

    #[test]
    fn json_interchange() {
        let exp = SlitExperiment::from_pairs(2, [("1", 0.25), ("2", 0.25), ("12", 1.0)]).unwrap();
        let back = SlitExperiment::from_json(&exp.to_json().unwrap()).unwrap();
        assert_eq!(back, exp);
        assert_eq!(back.n_slits(), 2);
    }

    #[test]
    fn survey_is_reproducible() {
        let a = SorkinSurvey::run(64, 11).unwrap();
        let b = SorkinSurvey::run(64, 11).unwrap();
        assert_eq!(a.draws, b.draws);
        assert_ne!(a.draws, SorkinSurvey::run(64, 12).unwrap().draws);
    }
}
