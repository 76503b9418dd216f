//! δ(t) and the violation verdict for every built-in case.
//!
//! ```bash
//! cargo run -p qdecision --example stp_violation
//! ```

use qdecision::sorkin::{interference_i2, stp_as_two_slit};
use qdecision::{HamiltonianParams, ScenarioRun, ScenarioSpec, TimeGrid};

fn main() -> qdecision::Result<()> {
    let grid = TimeGrid::default();
    let params = HamiltonianParams::default();
    println!("case  lambda_B      verdict    max|delta|   onset");
    for spec in ScenarioSpec::catalog_all() {
        let run = ScenarioRun::simulate(&spec, &params, &grid)?;
        let v = run.verdict()?;
        println!(
            "{:>4}  {:>8}  {:>11}  {:>11.3e}   {}",
            spec.case_label(),
            format!("{}", spec.lambda_b()),
            if v.violated { "violated" } else { "satisfied" },
            v.max_abs_delta,
            v.onset_time.map_or("-".into(), |t| format!("{t:.4}")),
        );
    }

    // δ read as second-order interference between the two predictions.
    let spec = ScenarioSpec::catalog("3")?;
    let run = ScenarioRun::simulate(&spec, &params, &grid)?;
    let records = run.stp_records()?;
    let k = records
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.delta.abs().total_cmp(&b.1.delta.abs()))
        .map(|(k, _)| k)
        .unwrap();
    let r = &records[k];
    let slits = stp_as_two_slit(r, spec.p_b())?;
    println!(
        "\ncase 3 at t = {:.4}: p_u = {:.6}, p_d = {:.6}, p_c = {:.6}",
        r.t, r.p_u, r.p_d, r.p_c
    );
    println!("delta = {:.6}, I2 = {:.6}, Delta = {:.6}", r.delta, interference_i2(&slits)?, r.delta_envelope);
    Ok(())
}
