//! Unitary evolution of one mental state under the default Hamiltonian.
//!
//! ```bash
//! cargo run -p qdecision --example mental_dynamics
//! ```

use qdecision::stp::choice_probability;
use qdecision::states::initial_mental_state;
use qdecision::{build_hamiltonian, evolve, Branch, HamiltonianParams, Propagator, ScenarioSpec, TimeGrid};

fn main() -> qdecision::Result<()> {
    let params = HamiltonianParams::default();
    let h = build_hamiltonian(&params);
    let propagator = Propagator::new(&h)?;
    println!("gamma = {}, mu_d = mu_c = {}", params.gamma, params.mu_d);
    println!("energies: {:?}", propagator.spectrum().eigenvalues());
    println!("||U(1)^dag U(1) - I||max = {:.2e}", propagator.at(1.0).unitary_deviation());

    let spec = ScenarioSpec::catalog("2")?;
    let rho0 = initial_mental_state(&spec, Branch::Uncertain);
    let grid = TimeGrid::uniform(std::f64::consts::TAU, 9)?;
    let traj = evolve(&rho0, &h, &grid)?;

    println!("\n     t    p(defect)   tr rho");
    for (t, rho) in traj.iter() {
        println!("{t:6.3}   {:9.6}   {:.12}", choice_probability(rho), rho.matrix().trace().re);
    }
    println!("spectral drift over the run: {:.2e}", traj.spectral_drift());
    Ok(())
}
