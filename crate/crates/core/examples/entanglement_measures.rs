//! Concurrence and entanglement of formation on textbook states.
//!
//! ```bash
//! cargo run -p qdecision --example entanglement_measures
//! ```

use qdecision::linalg::re;
use qdecision::measures::{concurrence, entanglement_of_formation, entropy_of_entanglement, mutual_information};
use qdecision::{Complex64, ComplexMatrix, DensityMatrix};

fn werner(p: f64) -> qdecision::Result<DensityMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = DensityMatrix::pure(&[re(s), re(0.0), re(0.0), re(s)])?;
    let mixed = DensityMatrix::maximally_mixed(4);
    DensityMatrix::new(&bell.matrix().scale_real(p) + &mixed.matrix().scale_real(1.0 - p))
}

fn main() -> qdecision::Result<()> {
    println!("    p   concurrence     E_F      I(A:B)");
    for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
        let rho = werner(p)?;
        println!(
            "{p:5.3}   {:10.6}   {:8.6}   {:8.6}",
            concurrence(&rho)?,
            entanglement_of_formation(&rho)?,
            mutual_information(&rho)?
        );
    }

    let (c, s) = (0.6f64, 0.8f64);
    let psi = [re(c), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, s)];
    let rho = DensityMatrix::pure(&psi)?;
    println!(
        "\npure state 0.6|dd> + 0.8i|cc>: E_F = {:.12}, S(rho_B) = {:.12}",
        entanglement_of_formation(&rho)?,
        entropy_of_entanglement(&rho, (2, 2))?
    );

    let product = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.25; 4]))?;
    println!("maximally mixed: C = {}", concurrence(&product)?);
    Ok(())
}
