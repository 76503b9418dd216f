//! A scenario defined in JSON, run through the batch runner.
//!
//! ```bash
//! cargo run -p qdecision --example custom_scenario
//! ```

use std::collections::BTreeSet;

use qdecision::runner::{run, RunConfig, ScenarioSource};
use qdecision::{HamiltonianParams, Output, ScenarioSpec};

const SCENARIO: &str = r#"{
  "case_label": "tilted",
  "branches": {
    "u": { "pB": 0.7, "lamB_re": 0.2, "lamB_im": 0.3, "pA": 0.4, "lamA_re": 0.1 },
    "d": { "pB": 1.0, "pA": 0.4, "lamA_re": 0.1 },
    "c": { "pB": 0.0, "pA": 0.4, "lamA_re": 0.1 }
  }
}"#;

fn main() -> qdecision::Result<()> {
    let spec = ScenarioSpec::from_json_str(SCENARIO)?;
    let out_dir = std::env::temp_dir().join("qdecision-custom-scenario");
    let config = RunConfig {
        scenario: ScenarioSource::Custom(spec),
        hamiltonian: HamiltonianParams { mu_d: 0.3, mu_c: 0.9, gamma: 1.2 },
        samples: 1025,
        outputs: BTreeSet::from([Output::Table2, Output::Table3, Output::Trajectory]),
        out_dir: out_dir.clone(),
        precision: 3,
        ..RunConfig::default()
    };
    let summary = run(&config)?;
    for line in &summary.lines {
        println!("{line}");
    }
    println!("\nfiles written to {}:", out_dir.display());
    for f in &summary.files {
        println!("  {}", f.file_name().unwrap().to_string_lossy());
    }
    Ok(())
}
