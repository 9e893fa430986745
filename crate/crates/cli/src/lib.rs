//! File-level front end for `pcca-core`: scenario loading, run and sweep
//! commands, trace export, summary reports and SVG figures.

pub mod report;
pub mod svg;
pub mod trace_csv;

use std::fs;
use std::path::{Path, PathBuf};

use pcca_core::sim::{dt_sweep, metrics, run_scenario};
use pcca_core::{load_scenario, save_scenario, Scenario};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use report::{AssertionResult, MetricsSummary, RunReport, SweepSummary};

/// Residual allowed in the estimate identity, relative to `1 + max ‖u0‖`.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Abort(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Abort(_) => 3,
        }
    }
}

impl From<pcca_core::Error> for CliError {
    fn from(e: pcca_core::Error) -> Self {
        use pcca_core::Error as E;
        match e {
            E::Parse(_) | E::InvalidScenario(_) | E::EmptySweep | E::MarginScenario => CliError::Input(e.to_string()),
            _ => CliError::Abort(e.to_string()),
        }
    }
}

/// Hex SHA-256 of the canonical scenario text.
pub fn scenario_digest(s: &Scenario) -> String {
    Sha256::digest(save_scenario(s).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn read_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    load_scenario(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub assert_theorem2: bool,
    pub assert_no_collision: bool,
    pub svg: bool,
}

pub fn cmd_run(scenario: &Path, out: &Path, opts: &RunOptions) -> Result<RunReport, CliError> {
    let s = read_scenario(scenario)?;
    let trace = run_scenario(&s)?;
    let m = metrics(&trace, &s.barrier);

    let mut files = vec![write_file(out, "trace.csv", &trace_csv::write_trace_csv(&trace))?];
    if opts.svg {
        files.push(write_file(out, "trajectory.svg", &svg::trajectory_svg(&trace))?);
        files.push(write_file(out, "barrier.svg", &svg::barrier_svg(&trace))?);
    }

    let mut assertions = Vec::new();
    if opts.assert_theorem2 {
        let checked: Vec<_> = m
            .pairs
            .iter()
            .filter_map(|p| p.estimate_identity_residual.map(|r| (p, r)))
            .collect();
        let worst = checked
            .iter()
            .map(|(p, r)| r / (IDENTITY_TOLERANCE * (1.0 + p.max_baseline_norm)))
            .fold(0.0, f64::max);
        assertions.push(AssertionResult {
            name: "theorem2".into(),
            passed: !checked.is_empty() && worst <= 1.0,
            detail: if checked.is_empty() {
                "no pair of PCCA agents in scenario".into()
            } else {
                format!("{} PCCA pairs, worst residual / tolerance = {worst:.3e}", checked.len())
            },
        });
    }
    if opts.assert_no_collision {
        let v = m.min_h_r0();
        assertions.push(AssertionResult {
            name: "no_collision".into(),
            passed: v >= 0.0,
            detail: format!("min h_r0 = {v} m^2"),
        });
    }

    let mut report = RunReport {
        scenario_digest: scenario_digest(&s),
        metrics: Some(MetricsSummary::new(&m)),
        sweep: None,
        files: files.iter().map(|p| p.display().to_string()).collect(),
        assertions,
    };
    let path = out.join("metrics.json");
    report.files.push(path.display().to_string());
    write_file(out, "metrics.json", &report.to_json())?;
    Ok(report)
}

pub fn cmd_sweep(scenario: &Path, dts: &[f64], out: &Path) -> Result<RunReport, CliError> {
    if dts.is_empty() {
        return Err(CliError::Input("empty sampling-time list".into()));
    }
    if let Some(bad) = dts.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(CliError::Input(format!("sampling time must be positive, got {bad}")));
    }
    let s = read_scenario(scenario)?;
    let rows = dt_sweep(&s, dts)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["dt_s", "margin_m", "min_h_m2", "min_hr0_m2"]).expect("in-memory write");
    for r in &rows {
        w.write_record([r.dt, r.margin, r.min_h, r.min_h_r0].map(|v| v.to_string()))
            .expect("in-memory write");
    }
    let csv = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output");
    let mut report = RunReport {
        scenario_digest: scenario_digest(&s),
        metrics: None,
        sweep: Some(SweepSummary::new(&rows)),
        files: vec![write_file(out, "sweep.csv", &csv)?.display().to_string()],
        assertions: Vec::new(),
    };
    report.files.push(out.join("metrics.json").display().to_string());
    write_file(out, "metrics.json", &report.to_json())?;
    Ok(report)
}
