//! Compares every built-in case against the published tables.
//!
//! ```bash
//! cargo run --release -p qdecision --example reproduce_tables
//! ```

use qdecision::report::{reproduce_all, Tier};
use qdecision::{HamiltonianParams, TimeGrid};

fn main() -> qdecision::Result<()> {
    let report = reproduce_all(&HamiltonianParams::default(), &TimeGrid::default())?;
    for table in 1..=3u8 {
        let cells: Vec<_> = report.cells_of(table).collect();
        let worst = cells.iter().max_by(|a, b| a.deviation().total_cmp(&b.deviation())).unwrap();
        println!(
            "table {table}: {} cells, {} failed, worst {} {} {} off by {:.4}",
            cells.len(),
            cells.iter().filter(|c| !c.pass).count(),
            worst.case,
            worst.alpha,
            worst.column,
            worst.deviation()
        );
    }
    let zero = report.cells.iter().filter(|c| c.tier == Tier::Zero);
    println!("largest zero cell: {:.2e}", zero.map(|c| c.computed.abs()).fold(0.0, f64::max));
    for v in &report.verdicts {
        println!("case {:>2}: verdict {}", v.case, if v.pass() { "matches" } else { "DIFFERS" });
    }
    println!("overall: {}", if report.passed() { "pass" } else { "fail" });
    Ok(())
}
