//! Measuring the action qubit after the mental state has evolved.
//!
//! ```bash
//! cargo run -p qdecision --example action_measurement
//! ```

use qdecision::measures::entanglement_of_formation;
use qdecision::states::initial_mental_state;
use qdecision::{build_hamiltonian, measure_action, Branch, HamiltonianParams, Propagator, ScenarioSpec, Subsystem};

fn main() -> qdecision::Result<()> {
    let spec = ScenarioSpec::catalog("4")?;
    let propagator = Propagator::new(&build_hamiltonian(&HamiltonianParams::default()))?;
    let rho0 = initial_mental_state(&spec, Branch::Uncertain);

    for t in [0.0, 0.5, 1.5, 3.0] {
        let rho = rho0.evolve_by(&propagator.at(t))?;
        println!("t = {t}: E_F before measurement = {:.4}", entanglement_of_formation(&rho)?);
        for outcome in measure_action(&rho)? {
            match &outcome.post_state {
                Some(post) => {
                    let pred = post.reduced(Subsystem::B, (2, 2))?;
                    println!(
                        "  {:?}: p = {:.6}, post-measurement P(predict d) = {:.6}, E_F after = {:.2e}",
                        outcome.action,
                        outcome.probability,
                        pred.matrix()[(0, 0)].re,
                        entanglement_of_formation(post)?
                    );
                }
                None => println!("  {:?}: p = {:.2e}, no post-measurement state", outcome.action, outcome.probability),
            }
        }
    }
    Ok(())
}
