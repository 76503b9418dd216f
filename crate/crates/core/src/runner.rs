//! Batch runs: scenario selection, output files and the reproduction sweep.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::dynamics::{HamiltonianParams, TimeGrid, DEFAULT_SAMPLES, DEFAULT_T_MAX};
use crate::error::{Error, Result};
use crate::measures::MeasureRecord;
use crate::report::{file_stem, fmt_rounded, fmt_sig, initial_state_values, Tolerances};
use crate::report::{Reproduction, ReproductionReport};
use crate::sorkin::SorkinSurvey;
use crate::states::{Branch, ScenarioSpec, CATALOG_LABELS};
use crate::stp::{ScenarioRun, StpRecord};

/// Header of the per-branch trajectory CSV.
pub const TRAJECTORY_COLUMNS: [&str; 15] = [
    "t", "p_u", "p_d", "p_c", "delta", "Delta", "S_A", "S_B", "S_AB", "I_AB", "Cl1_A", "Cl1_B",
    "Cl1_AB", "CRE_AB", "EF_AB",
];

const TABLE1_COLUMNS: [&str; 4] = ["Cl1_B", "S_B", "Cl1_A", "S_A"];
const TABLE2_COLUMNS: [&str; 4] = ["S_B", "S_A", "S_AB", "I_AB"];
const TABLE3_COLUMNS: [&str; 5] = ["Cl1_B", "Cl1_A", "Cl1_AB", "CRE_AB", "EF_AB"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Table1,
    Table2,
    Table3,
    Trajectory,
    Sorkin,
}

impl Output {
    pub const ALL: [Output; 5] = [
        Output::Table1,
        Output::Table2,
        Output::Table3,
        Output::Trajectory,
        Output::Sorkin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::Table1 => "table1",
            Output::Table2 => "table2",
            Output::Table3 => "table3",
            Output::Trajectory => "trajectory",
            Output::Sorkin => "sorkin",
        }
    }

    /// Parses a comma-separated list such as `table2,trajectory`.
    pub fn parse_list(s: &str) -> Result<BTreeSet<Output>> {
        s.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(Output::from_str)
            .collect()
    }
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Output::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown output {s:?}")))
    }
}

/// Which scenarios a run covers.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSource {
    Catalog(String),
    AllCatalog,
    Custom(ScenarioSpec),
}

impl ScenarioSource {
    /// `"all"` selects every catalog case.
    pub fn from_case(label: &str) -> Result<Self> {
        if label == "all" {
            Ok(Self::AllCatalog)
        } else {
            ScenarioSpec::catalog(label)?;
            Ok(Self::Catalog(label.to_string()))
        }
    }

    pub fn specs(&self) -> Result<Vec<ScenarioSpec>> {
        match self {
            Self::Catalog(label) => Ok(vec![ScenarioSpec::catalog(label)?]),
            Self::AllCatalog => Ok(ScenarioSpec::catalog_all()),
            Self::Custom(spec) => Ok(vec![spec.clone()]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioSource,
    pub hamiltonian: HamiltonianParams,
    pub t_max: f64,
    pub samples: usize,
    pub outputs: BTreeSet<Output>,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Decimal places of the rounded table columns.
    pub precision: usize,
    pub sorkin_draws: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioSource::AllCatalog,
            hamiltonian: HamiltonianParams::default(),
            t_max: DEFAULT_T_MAX,
            samples: DEFAULT_SAMPLES,
            outputs: BTreeSet::from([Output::Table1, Output::Table2, Output::Table3]),
            out_dir: PathBuf::from("out"),
            seed: 0,
            precision: 2,
            sorkin_draws: 10_000,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.hamiltonian.validate()?;
        if self.samples < 2 {
            return Err(Error::InvalidConfig(format!("samples must be >= 2, got {}", self.samples)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidConfig(format!("t_max must be positive, got {}", self.t_max)));
        }
        if self.outputs.is_empty() {
            return Err(Error::InvalidConfig("no outputs selected".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::uniform(self.t_max, self.samples)
    }

    /// Applies a JSON config file on top of `self`.
    ///
    /// Accepted keys: `case` or `scenario` (a scenario object), and the
    /// optional numerics `mu_d`, `mu_c`, `gamma`, `t_max`, `samples`.
    pub fn apply_config_str(&mut self, text: &str) -> Result<()> {
        let file: ConfigFile = serde_json::from_str(text)?;
        match (file.case, file.scenario) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig("config sets both case and scenario".into()))
            }
            (Some(label), None) => self.scenario = ScenarioSource::from_case(&label)?,
            (None, Some(spec)) => self.scenario = ScenarioSource::Custom(spec),
            (None, None) => {}
        }
        if let Some(v) = file.mu_d {
            self.hamiltonian.mu_d = v;
        }
        if let Some(v) = file.mu_c {
            self.hamiltonian.mu_c = v;
        }
        if let Some(v) = file.gamma {
            self.hamiltonian.gamma = v;
        }
        if let Some(v) = file.t_max {
            self.t_max = v;
        }
        if let Some(v) = file.samples {
            self.samples = v;
        }
        Ok(())
    }

    pub fn apply_config_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)?;
        self.apply_config_str(&text)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    case: Option<String>,
    scenario: Option<ScenarioSpec>,
    mu_d: Option<f64>,
    mu_c: Option<f64>,
    gamma: Option<f64>,
    t_max: Option<f64>,
    samples: Option<usize>,
}

/// What a run produced.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    /// Line-oriented summary, also printed by the CLI.
    pub lines: Vec<String>,
}

/// Writes `contents` to `path` through a sibling temp file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

struct CaseResult {
    spec: ScenarioSpec,
    means: [MeasureRecord; 3],
    records: Vec<StpRecord>,
    measures: Option<[Vec<MeasureRecord>; 3]>,
    times: Vec<f64>,
}

fn simulate_case(spec: &ScenarioSpec, config: &RunConfig, grid: &TimeGrid) -> Result<CaseResult> {
    let run = ScenarioRun::simulate(spec, &config.hamiltonian, grid)?;
    let records = run.stp_records()?;
    let per_branch = Branch::ALL
        .par_iter()
        .map(|&b| run.measures(b))
        .collect::<Result<Vec<_>>>()?;
    let means = per_branch
        .iter()
        .map(|m| crate::stp::mean_of(run.times(), m))
        .collect::<Result<Vec<_>>>()?;
    for m in &means {
        m.check()?;
    }
    let keep = config.outputs.contains(&Output::Trajectory);
    let measures = keep.then(|| {
        let mut it = per_branch.into_iter();
        [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
    });
    Ok(CaseResult {
        spec: spec.clone(),
        means: [means[0], means[1], means[2]],
        records,
        measures,
        times: run.times().to_vec(),
    })
}

fn table_header(columns: &[&str]) -> String {
    let mut h = String::from("case,alpha");
    for c in columns {
        let _ = write!(h, ",{c}");
    }
    for c in columns {
        let _ = write!(h, ",{c}_full");
    }
    h.push('\n');
    h
}

fn table_row(case: &str, alpha: Branch, values: &[f64], precision: usize) -> String {
    let mut row = format!("{case},{alpha}");
    for v in values {
        let _ = write!(row, ",{}", fmt_rounded(*v, precision));
    }
    for v in values {
        let _ = write!(row, ",{}", fmt_sig(*v, 12));
    }
    row.push('\n');
    row
}

fn pick(record: &MeasureRecord, columns: &[&str]) -> Vec<f64> {
    columns
        .iter()
        .map(|c| crate::report::measure_by_column(record, c).expect("known column"))
        .collect()
}

fn summary_line(case: &str, alpha: Branch, names: &[&str], values: &[f64], precision: usize) -> String {
    let mut line = format!("{case},{alpha}");
    for (n, v) in names.iter().zip(values) {
        let _ = write!(line, ",{n}={}", fmt_rounded(*v, precision));
    }
    line
}

/// CSV text of one branch's trajectory.
pub fn trajectory_csv(times: &[f64], records: &[StpRecord], measures: &[MeasureRecord]) -> Result<String> {
    if records.len() != times.len() || measures.len() != times.len() {
        return Err(Error::GridMismatch);
    }
    let mut s = TRAJECTORY_COLUMNS.join(",");
    s.push('\n');
    for ((t, r), m) in times.iter().zip(records).zip(measures) {
        let values = [
            *t,
            r.p_u,
            r.p_d,
            r.p_c,
            r.delta,
            r.delta_envelope,
            m.s_a,
            m.s_b,
            m.s_ab,
            m.i_ab,
            m.cl1_a,
            m.cl1_b,
            m.cl1_ab,
            m.cre_ab,
            m.ef_ab,
        ];
        let row: Vec<String> = values.iter().map(|v| fmt_sig(*v, 12)).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    Ok(s)
}

/// Runs `config`, writing the requested files under `config.out_dir`.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let grid = config.grid()?;
    let specs = config.scenario.specs()?;
    fs::create_dir_all(&config.out_dir)?;

    let needs_dynamics = config
        .outputs
        .iter()
        .any(|o| matches!(o, Output::Table2 | Output::Table3 | Output::Trajectory));
    let results = if needs_dynamics {
        specs
            .par_iter()
            .map(|spec| simulate_case(spec, config, &grid))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let mut summary = RunSummary::default();
    let emit = |name: String, contents: String, summary: &mut RunSummary| -> Result<()> {
        let path = config.out_dir.join(name);
        write_atomic(&path, contents.as_bytes())?;
        summary.files.push(path);
        Ok(())
    };

    if config.outputs.contains(&Output::Table1) {
        let mut csv = table_header(&TABLE1_COLUMNS);
        for spec in &specs {
            for b in Branch::ALL {
                let v = initial_state_values(spec, b);
                let values: Vec<f64> = TABLE1_COLUMNS.iter().map(|c| v[*c]).collect();
                csv.push_str(&table_row(spec.case_label(), b, &values, config.precision));
                summary.lines.push(summary_line(
                    spec.case_label(),
                    b,
                    &TABLE1_COLUMNS,
                    &values,
                    config.precision,
                ));
            }
        }
        emit("table1.csv".into(), csv, &mut summary)?;
    }

    if config.outputs.contains(&Output::Table2) {
        let mut csv = table_header(&TABLE2_COLUMNS);
        for r in &results {
            for b in Branch::ALL {
                let values = pick(&r.means[b as usize], &TABLE2_COLUMNS);
                csv.push_str(&table_row(r.spec.case_label(), b, &values, config.precision));
                summary.lines.push(summary_line(
                    r.spec.case_label(),
                    b,
                    &["S_B", "S_A", "S_AB", "I"],
                    &values,
                    config.precision,
                ));
            }
        }
        emit("table2.csv".into(), csv, &mut summary)?;
    }

    if config.outputs.contains(&Output::Table3) {
        let mut csv = table_header(&TABLE3_COLUMNS);
        for r in &results {
            for b in Branch::ALL {
                let values = pick(&r.means[b as usize], &TABLE3_COLUMNS);
                csv.push_str(&table_row(r.spec.case_label(), b, &values, config.precision));
                summary.lines.push(summary_line(
                    r.spec.case_label(),
                    b,
                    &TABLE3_COLUMNS,
                    &values,
                    config.precision,
                ));
            }
        }
        emit("table3.csv".into(), csv, &mut summary)?;
    }

    if config.outputs.contains(&Output::Trajectory) {
        for r in &results {
            let measures = r.measures.as_ref().expect("kept for trajectory output");
            let verdict = crate::stp::stp_verdict(&r.records)?;
            for b in Branch::ALL {
                let csv = trajectory_csv(&r.times, &r.records, &measures[b as usize])?;
                let name = format!("trajectory_{}_{}.csv", file_stem(r.spec.case_label()), b);
                emit(name, csv, &mut summary)?;
            }
            summary.lines.push(format!(
                "{},stp={},max|delta|={}",
                r.spec.case_label(),
                if verdict.violated { "violated" } else { "satisfied" },
                fmt_sig(verdict.max_abs_delta, 6)
            ));
        }
    }

    if config.outputs.contains(&Output::Sorkin) {
        let survey = SorkinSurvey::run(config.sorkin_draws, config.seed)?;
        let mut csv = String::from("draw,I2_12,I2_13,I2_23,I3\n");
        for d in &survey.draws {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                d.index,
                fmt_sig(d.i2_12, 12),
                fmt_sig(d.i2_13, 12),
                fmt_sig(d.i2_23, 12),
                fmt_sig(d.i3, 12)
            );
        }
        emit("sorkin.csv".into(), csv, &mut summary)?;
        let text = format!(
            "draws={}\nseed={}\nmax|I3|={}\nfraction|I2|>0.01={}\n",
            survey.draws.len(),
            survey.seed,
            fmt_sig(survey.max_abs_i3(), 6),
            fmt_sig(survey.fraction_i2_above(0.01), 6)
        );
        summary.lines.extend(text.lines().map(|l| format!("sorkin,{l}")));
        emit("sorkin_summary.txt".into(), text, &mut summary)?;
    }

    Ok(summary)
}

/// Full sweep over every catalog case against the embedded tables.
pub fn reproduce_all(config: &RunConfig) -> Result<ReproductionReport> {
    config.validate()?;
    let grid = config.grid()?;
    Ok(Reproduction::compute(&config.hamiltonian, &grid)?.compare(&Tolerances::embedded()))
}

/// Catalog labels accepted by `--case`.
pub fn case_labels() -> impl Iterator<Item = &'static str> {
    CATALOG_LABELS.into_iter().chain(std::iter::once("all"))
}
