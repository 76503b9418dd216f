//! Time-averaged entropy, coherence and entanglement for one case.
//!
//! ```bash
//! cargo run -p qdecision --example information_measures -- 4*
//! ```

use qdecision::report::fmt_rounded;
use qdecision::{Branch, HamiltonianParams, MeasureRecord, ScenarioRun, ScenarioSpec, TimeGrid};

fn main() -> qdecision::Result<()> {
    let label = std::env::args().nth(1).unwrap_or_else(|| "4*".to_string());
    let spec = ScenarioSpec::catalog(&label)?;
    let run = ScenarioRun::simulate(&spec, &HamiltonianParams::default(), &TimeGrid::default())?;

    print!("alpha");
    for c in MeasureRecord::COLUMNS {
        print!(" {c:>7}");
    }
    println!();
    for b in Branch::ALL {
        let mean = run.mean_measures(b)?;
        print!("{:>5}", b.label());
        for v in mean.values() {
            print!(" {:>7}", fmt_rounded(v, 3));
        }
        println!();
    }

    let peak = run
        .measures(Branch::Uncertain)?
        .iter()
        .map(|m| m.ef_ab)
        .fold(0.0, f64::max);
    println!("\npeak E_F along the u trajectory: {peak:.4}");
    Ok(())
}
