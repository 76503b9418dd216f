use std::f64::consts::{PI, TAU};

use qdecision::dynamics::action_hamiltonian;
use qdecision::linalg::{eig_hermitian, re};
use qdecision::measures::{entanglement_of_formation, von_neumann_entropy};
use qdecision::report::{reproduce_all, Reproduction, Tolerances};
use qdecision::states::{chi_initial, initial_mental_state};
use qdecision::stp::choice_probability;
use qdecision::{
    build_hamiltonian, evolve, measure_action, Branch, Complex64, ComplexMatrix, HamiltonianParams, Propagator,
    ScenarioRun, ScenarioSpec, TimeGrid,
};

fn paper_run(label: &str, samples: usize) -> ScenarioRun {
    let spec = ScenarioSpec::catalog(label).unwrap();
    ScenarioRun::simulate(&spec, &HamiltonianParams::default(), &TimeGrid::uniform(TAU, samples).unwrap()).unwrap()
}

fn rk4_unitary(h: &ComplexMatrix, t: f64, steps: usize) -> ComplexMatrix {
    let minus_i = Complex64::new(0.0, -1.0);
    let f = |u: &ComplexMatrix| (h * u).scale(minus_i);
    let dt = t / steps as f64;
    let mut u = ComplexMatrix::identity(h.dim());
    for _ in 0..steps {
        let k1 = f(&u);
        let k2 = f(&(&u + &k1.scale_real(dt / 2.0)));
        let k3 = f(&(&u + &k2.scale_real(dt / 2.0)));
        let k4 = f(&(&u + &k3.scale_real(dt)));
        let incr = &(&(&k1 + &k2.scale_real(2.0)) + &k3.scale_real(2.0)) + &k4;
        u = &u + &incr.scale_real(dt / 6.0);
    }
    u
}

#[test]
fn action_term_has_doubly_degenerate_unit_spectrum() {
    let ev = eig_hermitian(&action_hamiltonian(&HamiltonianParams::default())).unwrap();
    for (got, want) in ev.eigenvalues().iter().zip([1.0, 1.0, -1.0, -1.0]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn propagator_matches_runge_kutta() {
    let h = build_hamiltonian(&HamiltonianParams::default());
    let exact = Propagator::new(&h).unwrap().at(1.0);
    assert!(exact.max_abs_diff(&rk4_unitary(&h, 1.0, 2000)) < 1e-8);
    assert!(Propagator::new(&h).unwrap().at(0.0).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
}

#[test]
fn involutory_hamiltonian_at_pi_is_minus_identity() {
    let h = action_hamiltonian(&HamiltonianParams::default());
    let u = Propagator::new(&h).unwrap().at(PI);
    assert!(u.max_abs_diff(&ComplexMatrix::identity(4).scale_real(-1.0)) < 1e-12);
}

#[test]
fn payoff_term_alone_creates_no_entanglement() {
    let spec = ScenarioSpec::catalog("2").unwrap();
    let params = HamiltonianParams { gamma: 0.0, ..HamiltonianParams::default() };
    let run = ScenarioRun::simulate(&spec, &params, &TimeGrid::uniform(TAU, 257).unwrap()).unwrap();
    for b in Branch::ALL {
        for m in run.measures(b).unwrap() {
            assert!(m.ef_ab < 1e-10);
        }
    }
}

#[test]
fn case_one_joint_entropy_stays_maximal() {
    for m in paper_run("1", 257).measures(Branch::Uncertain).unwrap() {
        assert!((m.s_ab - 2.0).abs() < 1e-12);
    }
}

#[test]
fn case_three_star_stays_separable() {
    for m in paper_run("3*", 4097).measures(Branch::Uncertain).unwrap() {
        assert!(m.ef_ab < 1e-6);
    }
}

#[test]
fn action_measurement_agrees_with_choice_probability() {
    let spec = ScenarioSpec::catalog("2").unwrap();
    let h = build_hamiltonian(&HamiltonianParams::default());
    let grid = TimeGrid::new(vec![0.0, 1.0]).unwrap();
    let traj = evolve(&initial_mental_state(&spec, Branch::Uncertain), &h, &grid).unwrap();
    let rho = &traj.states()[1];
    let [defect, _] = measure_action(rho).unwrap();
    assert!((defect.probability - choice_probability(rho)).abs() < 1e-14);
}

#[test]
fn case_one_defect_branch_means() {
    let mean = paper_run("1", 4097).mean_measures(Branch::Defect).unwrap();
    assert!((mean.cre_ab - 0.83).abs() < 0.02);
    assert!((mean.i_ab - 0.65).abs() < 0.02);
}

#[test]
fn quadrature_has_converged_at_default_resolution() {
    let fine = paper_run("4", 4097).mean_measures(Branch::Uncertain).unwrap();
    let coarse = paper_run("4", 2049).mean_measures(Branch::Uncertain).unwrap();
    assert!((fine.cl1_ab - coarse.cl1_ab).abs() < 1e-4);
}

#[test]
fn entropy_is_unitarily_invariant() {
    let spec = ScenarioSpec::catalog("3*").unwrap();
    let rho = initial_mental_state(&spec, Branch::Uncertain);
    let propagator = Propagator::new(&build_hamiltonian(&HamiltonianParams::default())).unwrap();
    for t in [0.3, 1.7, 4.2] {
        let evolved = rho.evolve_by(&propagator.at(t)).unwrap();
        assert!((von_neumann_entropy(&evolved) - von_neumann_entropy(&rho)).abs() < 1e-10);
    }
}

#[test]
fn chi_entry_of_case_four_star() {
    let chi = chi_initial(&ScenarioSpec::catalog("4*").unwrap());
    assert!((chi.matrix()[(0, 3)] - Complex64::new(0.0, 0.125)).norm() < 1e-15);
    assert!(chi.matrix()[(0, 0)].norm() < 1e-15);
}

#[test]
fn delta_at_unit_time_matches_independent_subtraction() {
    let spec = ScenarioSpec::catalog("3*").unwrap();
    let h = build_hamiltonian(&HamiltonianParams::default());
    let grid = TimeGrid::new(vec![0.0, 1.0]).unwrap();
    let p = |b| choice_probability(&evolve(&initial_mental_state(&spec, b), &h, &grid).unwrap().states()[1]);
    let expected = p(Branch::Uncertain) - spec.p_b() * p(Branch::Defect) - (1.0 - spec.p_b()) * p(Branch::Cooperate);
    let run = ScenarioRun::simulate(&spec, &HamiltonianParams::default(), &grid).unwrap();
    let record = run.stp_records().unwrap()[1];
    assert!((record.delta - expected).abs() < 1e-14);
    assert!(expected.abs() > 1e-3);
}

#[test]
fn reproduction_report_is_deterministic() {
    let grid = TimeGrid::uniform(TAU, 513).unwrap();
    let a = reproduce_all(&HamiltonianParams::default(), &grid).unwrap().to_text();
    let b = reproduce_all(&HamiltonianParams::default(), &grid).unwrap().to_text();
    assert_eq!(a, b);
}

#[test]
fn perturbed_parameters_are_reported_as_misses() {
    let params = HamiltonianParams::symmetric(0.59, 0.3);
    let report = Reproduction::compute(&params, &TimeGrid::uniform(TAU, 513).unwrap())
        .unwrap()
        .compare(&Tolerances::embedded());
    assert!(!report.passed());
    assert!(report.cells_of(1).all(|c| c.pass));
    assert!(report.to_text().contains("FAIL table2"));
}

#[test]
fn real_coherent_prediction_state_is_pure() {
    let spec = ScenarioSpec::catalog("3").unwrap();
    let rho_b = qdecision::states::qubit_state(spec.branch(Branch::Uncertain).prediction).unwrap();
    assert!(von_neumann_entropy(&rho_b).abs() < 1e-12);
    assert!((rho_b.matrix()[(0, 1)] - re(0.5)).norm() < 1e-15);
    assert!(entanglement_of_formation(&initial_mental_state(&spec, Branch::Uncertain)).unwrap() < 1e-7);
}
