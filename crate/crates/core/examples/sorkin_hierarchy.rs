//! Second- and third-order interference in random three-slit models.
//!
//! ```bash
//! cargo run --release -p qdecision --example sorkin_hierarchy
//! ```

use qdecision::linalg::re;
use qdecision::sorkin::{interference_i2, interference_i3, run_slit_model};
use qdecision::{ComplexMatrix, DensityMatrix, QuantumSlitModel, SlitExperiment, SorkinSurvey};

fn main() -> qdecision::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [re(s), re(s)];
    let model = QuantumSlitModel::computational(DensityMatrix::pure(&plus)?, ComplexMatrix::outer(&plus))?;
    let exp = run_slit_model(&model)?;
    println!("two slits, |+> source, |+> detector: {}", exp.to_json()?);
    println!("I2 = {:.6}", interference_i2(&exp)?);

    let classical = SlitExperiment::from_pairs(
        3,
        [("1", 0.1), ("2", 0.2), ("3", 0.3), ("12", 0.3), ("13", 0.4), ("23", 0.5), ("123", 0.6)],
    )?;
    println!("additive three-slit assignment: I3 = {:.1e}", interference_i3(&classical)?);

    let survey = SorkinSurvey::run(10_000, 7)?;
    println!(
        "\n{} random models: max|I3| = {:.2e}, |I2| > 0.01 in {:.1}% of draws",
        survey.draws.len(),
        survey.max_abs_i3(),
        100.0 * survey.fraction_i2_above(0.01)
    );
    Ok(())
}
