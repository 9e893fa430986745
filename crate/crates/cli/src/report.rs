//! `metrics.json` schema.
//!
//! ```text
//! {
//!   "scenario_digest": "<sha-256 hex of the canonical scenario text>",
//!   "metrics": {                       // run only
//!     "min_h_r0_m2": f64, "collision_free": bool,
//!     "pairs":  [{ "agents": [i, j], "min_h_m2", "min_h_time_s", "min_h_r0_m2",
//!                  "min_h_r0_literal_m2", "max_constraint_violation", "min_constraint",
//!                  "sampling_bound", "estimate_identity_residual" (null unless both PCCA),
//!                  "max_baseline_norm", "left_reduced_set" }],
//!     "agents": [{ "index", "min_speed_mps", "min_speed_time_s", "started_moving_at_s",
//!                  "min_speed_after_start_mps", "final_speed_mps",
//!                  "final_distance_to_destination_m", "braking_samples" }]
//!   },
//!   "sweep": {                         // sweep only
//!     "rows": [{ "dt_s", "margin_m", "min_h_m2", "min_hr0_m2" }],
//!     "margin_ratio_first_last": f64 | null, "fit_slope": f64, "fit_intercept_m": f64
//!   },
//!   "files": ["<path>", ...],
//!   "assertions": [{ "name", "passed", "detail" }]
//! }
//! ```
//!
//! Non-finite numbers are written as `null`.

use pcca_core::sim::{linear_fit, MetricsReport, SweepRow};
use serde::Serialize;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AssertionResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PairSummary {
    pub agents: [usize; 2],
    pub min_h_m2: f64,
    pub min_h_time_s: f64,
    pub min_h_r0_m2: f64,
    pub min_h_r0_literal_m2: f64,
    pub max_constraint_violation: f64,
    pub min_constraint: f64,
    pub sampling_bound: f64,
    pub estimate_identity_residual: Option<f64>,
    pub max_baseline_norm: f64,
    pub left_reduced_set: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AgentSummary {
    pub index: usize,
    pub min_speed_mps: f64,
    pub min_speed_time_s: f64,
    pub started_moving_at_s: Option<f64>,
    pub min_speed_after_start_mps: Option<f64>,
    pub final_speed_mps: f64,
    pub final_distance_to_destination_m: f64,
    pub braking_samples: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MetricsSummary {
    pub min_h_r0_m2: f64,
    pub collision_free: bool,
    pub pairs: Vec<PairSummary>,
    pub agents: Vec<AgentSummary>,
}

impl MetricsSummary {
    pub fn new(m: &MetricsReport) -> Self {
        Self {
            min_h_r0_m2: m.min_h_r0(),
            collision_free: m.collision_free(),
            pairs: m
                .pairs
                .iter()
                .map(|p| PairSummary {
                    agents: [p.pair.0, p.pair.1],
                    min_h_m2: p.min_h,
                    min_h_time_s: p.min_h_time,
                    min_h_r0_m2: p.min_h_r0,
                    min_h_r0_literal_m2: p.min_h_r0_literal,
                    max_constraint_violation: p.max_constraint_violation,
                    min_constraint: p.min_constraint,
                    sampling_bound: p.sampling_bound,
                    estimate_identity_residual: p.estimate_identity_residual,
                    max_baseline_norm: p.max_baseline_norm,
                    left_reduced_set: p.left_reduced_set,
                })
                .collect(),
            agents: m
                .agents
                .iter()
                .enumerate()
                .map(|(index, a)| AgentSummary {
                    index,
                    min_speed_mps: a.min_speed,
                    min_speed_time_s: a.min_speed_time,
                    started_moving_at_s: a.started_moving_at,
                    min_speed_after_start_mps: a.min_speed_after_start.map(|(v, _)| v),
                    final_speed_mps: a.final_speed,
                    final_distance_to_destination_m: a.final_distance_to_destination,
                    braking_samples: a.braking_samples,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SweepRowSummary {
    pub dt_s: f64,
    pub margin_m: f64,
    pub min_h_m2: f64,
    pub min_hr0_m2: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SweepSummary {
    pub rows: Vec<SweepRowSummary>,
    /// Margin at the first sampling time over the margin at the last one.
    pub margin_ratio_first_last: Option<f64>,
    pub fit_slope: f64,
    pub fit_intercept_m: f64,
}

impl SweepSummary {
    pub fn new(rows: &[SweepRow]) -> Self {
        let (fit_slope, fit_intercept_m) = linear_fit(rows);
        let ratio = match (rows.first(), rows.last()) {
            (Some(a), Some(b)) if rows.len() > 1 && b.margin > 0.0 => Some(a.margin / b.margin),
            _ => None,
        };
        Self {
            rows: rows
                .iter()
                .map(|r| SweepRowSummary {
                    dt_s: r.dt,
                    margin_m: r.margin,
                    min_h_m2: r.min_h,
                    min_hr0_m2: r.min_h_r0,
                })
                .collect(),
            margin_ratio_first_last: ratio,
            fit_slope,
            fit_intercept_m,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunReport {
    pub scenario_digest: String,
    pub metrics: Option<MetricsSummary>,
    pub sweep: Option<SweepSummary>,
    pub files: Vec<String>,
    pub assertions: Vec<AssertionResult>,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
