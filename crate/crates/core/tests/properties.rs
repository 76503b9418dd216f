use std::f64::consts::TAU;

use proptest::prelude::*;
use qdecision::linalg::{eig_hermitian, partial_trace, tensor};
use qdecision::measures::{
    concurrence, l1_coherence, mutual_information, relative_entropy_coherence, von_neumann_entropy, MeasureRecord,
};
use qdecision::report::fmt_sig;
use qdecision::sorkin::{interference_i3, random_slit_model, run_slit_model};
use qdecision::states::{chi_initial, qubit_state};
use qdecision::{
    Branch, Complex64, ComplexMatrix, DensityMatrix, HamiltonianParams, ScenarioRun, ScenarioSpec, SlitExperiment,
    Subsystem, SubsystemParams, TimeGrid,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn subsystem() -> impl Strategy<Value = SubsystemParams> {
    (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..TAU).prop_map(|(p, r, phase)| {
        let radius = r * (p * (1.0 - p)).sqrt();
        SubsystemParams::new(p, Complex64::from_polar(radius, phase))
    })
}

fn hamiltonian() -> impl Strategy<Value = HamiltonianParams> {
    (-3.0f64..3.0, -3.0f64..3.0, 0.0f64..4.0).prop_map(|(mu_d, mu_c, gamma)| HamiltonianParams { mu_d, mu_c, gamma })
}

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_entries(n).prop_map(move |v| {
        let g = ComplexMatrix::from_fn(n, |i, j| Complex64::new(v[i * n + j].0, v[i * n + j].1));
        (&g + &g.adjoint()).scale_real(0.5)
    })
}

fn density(n: usize) -> impl Strategy<Value = DensityMatrix> {
    complex_entries(n).prop_filter_map("degenerate draw", move |v| {
        let g = ComplexMatrix::from_fn(n, |i, j| Complex64::new(v[i * n + j].0, v[i * n + j].1));
        let w = &g * &g.adjoint();
        let tr = w.trace().re;
        if tr < 1e-6 {
            return None;
        }
        let m = &w.scale_real(0.5 / tr) + &w.adjoint().scale_real(0.5 / tr);
        DensityMatrix::new(m).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn valid_qubit_parameters_give_states(params in subsystem()) {
        let rho = qubit_state(params).unwrap();
        let ev = rho.eigenvalues();
        prop_assert!(ev.iter().all(|&x| x >= 0.0));
        prop_assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherence_beyond_the_disc_is_rejected(p in 0.01f64..0.99, excess in 1.01f64..3.0) {
        let lambda = excess * (p * (1.0 - p)).sqrt();
        prop_assert!(qubit_state(SubsystemParams::real(p, lambda)).is_err());
    }

    #[test]
    fn eigen_decomposition_reconstructs(h in hermitian(4)) {
        let s = eig_hermitian(&h).unwrap();
        prop_assert!(s.reconstruct().max_abs_diff(&h) < 1e-12);
        prop_assert!(s.eigenvectors().unitary_deviation() < 1e-12);
        prop_assert!(s.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn partial_trace_undoes_tensor(a in density(2), b in density(2)) {
        let ab = tensor(a.matrix(), b.matrix());
        prop_assert!(partial_trace(&ab, Subsystem::B, (2, 2)).unwrap().max_abs_diff(a.matrix()) < 1e-14);
        prop_assert!(partial_trace(&ab, Subsystem::A, (2, 2)).unwrap().max_abs_diff(b.matrix()) < 1e-14);
    }

    #[test]
    fn measures_stay_in_range(rho in density(4)) {
        let m = MeasureRecord::of(&rho).unwrap();
        prop_assert!(m.check().is_ok());
        for s in [m.s_a, m.s_b] {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s));
        }
        prop_assert!((-1e-12..=2.0 + 1e-12).contains(&m.s_ab));
        prop_assert!(m.i_ab >= -1e-10);
        prop_assert!((0.0..=1.0).contains(&m.ef_ab));
        let cre = relative_entropy_coherence(&rho);
        prop_assert!((-1e-12..=2.0 + 1e-12).contains(&cre));
        prop_assert!((0.0..=3.0 + 1e-12).contains(&l1_coherence(&rho)));
        prop_assert!((mutual_information(&rho).unwrap() - m.i_ab).abs() < 1e-12);
    }

    #[test]
    fn product_states_are_unentangled(a in density(2), b in density(2)) {
        let rho = a.tensor(&b);
        prop_assert!(concurrence(&rho).unwrap() < 1e-7);
        prop_assert!(mutual_information(&rho).unwrap().abs() < 1e-10);
        prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&a) - von_neumann_entropy(&b)).abs() < 1e-10);
    }

    #[test]
    fn chi_starts_with_zero_diagonal(pred in subsystem(), act in subsystem()) {
        let spec = ScenarioSpec::from_uncertain("random", pred, act).unwrap();
        let chi = chi_initial(&spec);
        prop_assert!(chi.diagonal_magnitude() < 1e-12);
        prop_assert!(chi.matrix().trace().norm() < 1e-12);
    }

    #[test]
    fn scenario_json_round_trips(pred in subsystem(), act in subsystem()) {
        let spec = ScenarioSpec::from_uncertain("rt", pred, act).unwrap();
        let back = ScenarioSpec::from_json_str(&spec.to_json_string().unwrap()).unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn significant_digits_round_trip(x in prop::num::f64::NORMAL) {
        let y: f64 = fmt_sig(x, 12).parse().unwrap();
        prop_assert!((y - x).abs() <= 1e-11 * x.abs());
    }

    #[test]
    fn slit_json_round_trips(p in prop::collection::vec(0.0f64..=1.0, 7)) {
        let keys = ["1", "2", "3", "12", "13", "23", "123"];
        let exp = SlitExperiment::from_pairs(3, keys.iter().copied().zip(p.iter().copied())).unwrap();
        let back = SlitExperiment::from_json(&exp.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, exp);
    }

    #[test]
    fn quantum_slits_have_no_third_order_term(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let exp = run_slit_model(&random_slit_model(3, &mut rng)).unwrap();
        prop_assert!(interference_i3(&exp).unwrap().abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evolution_keeps_delta_bounded_by_envelope(pred in subsystem(), act in subsystem(), h in hamiltonian()) {
        let spec = ScenarioSpec::from_uncertain("random", pred, act).unwrap();
        let grid = TimeGrid::uniform(TAU, 129).unwrap();
        let run = ScenarioRun::simulate(&spec, &h, &grid).unwrap();
        for r in run.stp_records().unwrap() {
            prop_assert!(r.delta.abs() <= r.delta_envelope + 1e-14);
            prop_assert!((0.0..=1.0).contains(&r.p_u));
        }
        for k in [0, 64, 128] {
            let direct = run.chi(k).unwrap();
            prop_assert!(direct.matrix().max_abs_diff(&run.chi_propagated(k).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn classical_prediction_never_violates(p_b in 0.0f64..=1.0, act in subsystem(), h in hamiltonian()) {
        let spec = ScenarioSpec::from_uncertain("classical", SubsystemParams::classical(p_b), act).unwrap();
        let grid = TimeGrid::uniform(TAU, 129).unwrap();
        let v = ScenarioRun::simulate(&spec, &h, &grid).unwrap().verdict().unwrap();
        prop_assert!(!v.violated);
        prop_assert!(v.max_abs_delta < 1e-10);
    }

    #[test]
    fn mean_measures_pass_range_checks(h in hamiltonian()) {
        let spec = ScenarioSpec::catalog("1").unwrap();
        let grid = TimeGrid::uniform(TAU, 65).unwrap();
        let run = ScenarioRun::simulate(&spec, &h, &grid).unwrap();
        for b in Branch::ALL {
            prop_assert!(run.mean_measures(b).unwrap().check().is_ok());
        }
    }
}
