use crate::error::{Error, Result};
use crate::scenario::Scenario;

use super::metrics::metrics;
use super::run::run_scenario;

/// Bisection resolution as a fraction of the agent radius.
pub const MARGIN_RESOLUTION: f64 = 1e-4;

/// Smallest physical separation `min h_r0` of a run, with coinciding
/// centers counted as a collision.
fn min_h_r0(s: &Scenario) -> Result<f64> {
    match run_scenario(s) {
        Ok(trace) => Ok(metrics(&trace, &s.barrier).min_h_r0()),
        Err(Error::SimulationAbort { source, .. })
            if matches!(*source, Error::DegenerateGeometry { .. }) =>
        {
            Ok(f64::NEG_INFINITY)
        }
        Err(e) => Err(e),
    }
}

/// Smallest radius margin `m ∈ [0, r0]` (controller radius `r = 2 r0 + m`)
/// that keeps `h_r0 >= 0` over the horizon at sampling time `dt`, to within
/// `MARGIN_RESOLUTION · r0`.
pub fn margin_required(base: &Scenario, dt: f64) -> Result<f64> {
    if base.agents.len() < 2 {
        return Err(Error::MarginScenario);
    }
    let r0 = base.max_radius();
    let collides = |m: f64| -> Result<bool> {
        let mut s = base.clone();
        s.dt = dt;
        s.barrier = s.barrier.with_radius(2.0 * r0 + m);
        Ok(min_h_r0(&s)? < 0.0)
    };

    if !collides(0.0)? {
        return Ok(0.0);
    }
    if collides(r0)? {
        return Err(Error::MarginBracket { margin: r0 });
    }
    let (mut lo, mut hi) = (0.0, r0);
    while hi - lo > MARGIN_RESOLUTION * r0 {
        let mid = 0.5 * (lo + hi);
        if collides(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub dt: f64,
    pub margin: f64,
    /// `min h` of the base scenario run at this `dt`.
    pub min_h: f64,
    pub min_h_r0: f64,
}

/// Required margin and base-scenario barrier minima for each sampling time.
pub fn dt_sweep(s: &Scenario, dts: &[f64]) -> Result<Vec<SweepRow>> {
    if dts.is_empty() {
        return Err(Error::EmptySweep);
    }
    dts.iter()
        .map(|&dt| {
            let margin = margin_required(s, dt)?;
            let mut run = s.clone();
            run.dt = dt;
            let trace = run_scenario(&run)?;
            let m = metrics(&trace, &run.barrier);
            Ok(SweepRow {
                dt,
                margin,
                min_h: m.min_h(),
                min_h_r0: m.min_h_r0(),
            })
        })
        .collect()
}

/// Least-squares line `margin ≈ slope · dt + intercept`.
pub fn linear_fit(rows: &[SweepRow]) -> (f64, f64) {
    let n = rows.len() as f64;
    let mx = rows.iter().map(|r| r.dt).sum::<f64>() / n;
    let my = rows.iter().map(|r| r.margin).sum::<f64>() / n;
    let sxx: f64 = rows.iter().map(|r| (r.dt - mx).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| (r.dt - mx) * (r.margin - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}
