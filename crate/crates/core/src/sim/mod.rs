//! Fixed-step closed-loop simulation, metrics and sampling-time sweeps.

mod dynamics;
mod metrics;
mod run;
mod sweep;

pub use dynamics::step_dynamics;
pub use metrics::{metrics, AgentMetrics, MetricsReport, PairMetrics, MOVING_SPEED};
pub use run::{replay_controls, run_scenario, Trace};
pub use sweep::{dt_sweep, linear_fit, margin_required, SweepRow, MARGIN_RESOLUTION};
