use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qdecision::runner::{self, Output, RunConfig, ScenarioSource};

/// Simulate the catalog scenarios and write tables, trajectories and Sorkin reports.
#[derive(Parser, Debug)]
#[command(name = "qdecision", version)]
struct Cli {
    /// Optional subcommand word, accepted for `qdecision run ...`.
    #[arg(value_parser = ["run"], hide = true)]
    command: Option<String>,

    /// Catalog case (1, 1*, 2, 3, 3*, 4, 4*) or `all`.
    #[arg(long)]
    case: Option<String>,

    /// JSON config file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    gamma: Option<f64>,

    /// Sets both μ_d and μ_c.
    #[arg(long)]
    mu: Option<f64>,

    #[arg(long = "t-max")]
    t_max: Option<f64>,

    #[arg(long)]
    samples: Option<usize>,

    /// Comma-separated subset of table1,table2,table3,trajectory,sorkin.
    #[arg(long)]
    outputs: Option<String>,

    #[arg(long = "out-dir", default_value = "out")]
    out_dir: PathBuf,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Decimal places in the rounded table columns.
    #[arg(long, default_value_t = 2)]
    precision: usize,

    #[arg(long = "sorkin-draws", default_value_t = 10_000)]
    sorkin_draws: u64,

    /// Compare every catalog case against the published tables.
    #[arg(long = "reproduce-all")]
    reproduce_all: bool,
}

fn build_config(cli: &Cli) -> qdecision::Result<RunConfig> {
    let mut config = RunConfig {
        out_dir: cli.out_dir.clone(),
        seed: cli.seed,
        precision: cli.precision,
        sorkin_draws: cli.sorkin_draws,
        ..RunConfig::default()
    };
    if let Some(path) = &cli.config {
        config.apply_config_file(path)?;
    }
    if let Some(case) = &cli.case {
        config.scenario = ScenarioSource::from_case(case)?;
    }
    if let Some(g) = cli.gamma {
        config.hamiltonian.gamma = g;
    }
    if let Some(mu) = cli.mu {
        config.hamiltonian.mu_d = mu;
        config.hamiltonian.mu_c = mu;
    }
    if let Some(t) = cli.t_max {
        config.t_max = t;
    }
    if let Some(n) = cli.samples {
        config.samples = n;
    }
    if let Some(list) = &cli.outputs {
        config.outputs = Output::parse_list(list)?;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qdecision: {e}");
            return ExitCode::from(2);
        }
    };

    if cli.reproduce_all {
        return match runner::reproduce_all(&config) {
            Ok(report) => {
                print!("{}", report.to_text());
                if report.passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::FAILURE
                }
            }
            Err(e) => {
                eprintln!("qdecision: {e}");
                ExitCode::FAILURE
            }
        };
    }

    match runner::run(&config) {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qdecision: {e}");
            ExitCode::FAILURE
        }
    }
}
