//! Initial mental states of the built-in cases and their χ(0) matrices.
//!
//! ```bash
//! cargo run -p qdecision --example scenario_catalog
//! ```

use qdecision::measures::{l1_coherence, von_neumann_entropy};
use qdecision::report::fmt_rounded;
use qdecision::states::{chi_initial, initial_mental_state, qubit_state};
use qdecision::{Branch, ScenarioSpec, Subsystem};

fn main() -> qdecision::Result<()> {
    println!("case alpha  Cl1_B   S_B  Cl1_A   S_A   |diag chi(0)|  |chi(0)|max");
    for spec in ScenarioSpec::catalog_all() {
        let chi = chi_initial(&spec);
        for b in Branch::ALL {
            let params = spec.branch(b);
            let rho_b = qubit_state(params.prediction)?;
            let rho_a = qubit_state(params.action)?;
            println!(
                "{:>4} {:>5} {:>6} {:>5} {:>6} {:>5}   {:>12.1e}  {:>10}",
                spec.case_label(),
                b,
                fmt_rounded(l1_coherence(&rho_b), 2),
                fmt_rounded(von_neumann_entropy(&rho_b), 2),
                fmt_rounded(l1_coherence(&rho_a), 2),
                fmt_rounded(von_neumann_entropy(&rho_a), 2),
                chi.diagonal_magnitude(),
                fmt_rounded(chi.matrix().max_abs(), 3),
            );
        }
    }

    // The joint state is a product at t = 0, so the marginals come back unchanged.
    let spec = ScenarioSpec::catalog("4*")?;
    let rho = initial_mental_state(&spec, Branch::Uncertain);
    let rho_b = rho.reduced(Subsystem::B, (2, 2))?;
    println!("\ncase 4*, u branch, reduced prediction state:\n{:?}", rho_b.matrix());
    Ok(())
}
