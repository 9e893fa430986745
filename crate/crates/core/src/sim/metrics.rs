use crate::barrier::{in_reduced_admissible_set, pair_barrier_at};
use crate::scenario::{BarrierParams, ControllerKind};

use super::run::Trace;

#[derive(Debug, Clone, PartialEq)]
pub struct PairMetrics {
    pub pair: (usize, usize),
    pub min_h: f64,
    pub min_h_time: f64,
    /// Minimum of `ξᵀξ - (r0_i + r0_j)²`; negative means the circles overlapped.
    pub min_h_r0: f64,
    /// Minimum of `ξᵀξ - (r0_i² + r0_j²)`, the literal `ξᵀξ - 2 r0²` variant.
    pub min_h_r0_literal: f64,
    /// `max(0, -(a + b (u_i - u_j)))` over all samples.
    pub max_constraint_violation: f64,
    /// Smallest `a + b (u_i - u_j)` over all samples.
    pub min_constraint: f64,
    /// `-2 β M Δt` with `β = max ‖b‖` and `M = max ‖u0_i(k) - u0_i(k-1)‖ / Δt`
    /// over both agents of the pair. Baselines before the first sample count
    /// as zero, matching the zero-initialised estimator memory.
    pub sampling_bound: f64,
    /// `max_k ‖(ŵ_ji - ŵ_ij)(k) - (u0_i - u0_j)(k-1)‖` for `k >= 1`, when
    /// both agents run PCCA.
    pub estimate_identity_residual: Option<f64>,
    /// Largest baseline magnitude of the two agents.
    pub max_baseline_norm: f64,
    /// Some sample lies outside `C* = {h >= 0, h >= ḣ/λ1}`.
    pub left_reduced_set: bool,
}

/// Speed above which an agent counts as having started to move.
pub const MOVING_SPEED: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct AgentMetrics {
    pub min_speed: f64,
    pub min_speed_time: f64,
    /// First time the speed reached [`MOVING_SPEED`].
    pub started_moving_at: Option<f64>,
    /// Slowest speed from `started_moving_at` on, with its time.
    pub min_speed_after_start: Option<(f64, f64)>,
    pub final_speed: f64,
    pub final_distance_to_destination: f64,
    pub braking_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub pairs: Vec<PairMetrics>,
    pub agents: Vec<AgentMetrics>,
}

impl MetricsReport {
    pub fn min_h_r0(&self) -> f64 {
        self.pairs.iter().map(|p| p.min_h_r0).fold(f64::INFINITY, f64::min)
    }

    pub fn min_h(&self) -> f64 {
        self.pairs.iter().map(|p| p.min_h).fold(f64::INFINITY, f64::min)
    }

    pub fn collision_free(&self) -> bool {
        self.min_h_r0() >= 0.0
    }
}

fn argmin(values: impl Iterator<Item = f64>) -> (usize, f64) {
    values
        .enumerate()
        .fold((0, f64::INFINITY), |(bk, bv), (k, v)| if v < bv { (k, v) } else { (bk, bv) })
}

pub fn metrics(t: &Trace, p: &BarrierParams) -> MetricsReport {
    let pairs = t
        .pairs
        .iter()
        .enumerate()
        .map(|(q, &(i, j))| {
            let (kmin, min_h) = argmin(t.h.iter().map(|row| row[q]));
            let min_h_r0 = t.h_r0.iter().map(|row| row[q]).fold(f64::INFINITY, f64::min);
            let literal = t.radii[i].powi(2) + t.radii[j].powi(2);
            let min_h_r0_literal = t
                .states
                .iter()
                .map(|s| (s[i].position - s[j].position).norm_squared() - literal)
                .fold(f64::INFINITY, f64::min);
            let max_violation = t
                .constraint
                .iter()
                .map(|row| (-row[q]).max(0.0))
                .fold(0.0, f64::max);
            let min_constraint = t
                .constraint
                .iter()
                .map(|row| row[q])
                .fold(f64::INFINITY, f64::min);

            let mut beta: f64 = 0.0;
            let mut left = false;
            for s in &t.states {
                if let Ok(terms) = pair_barrier_at(s, i, j, p) {
                    beta = beta.max(terms.b.norm());
                    left |= !in_reduced_admissible_set(&terms, p);
                }
            }
            let startup = t
                .baselines
                .first()
                .map(|u| u[i].norm().max(u[j].norm()) / t.dt)
                .unwrap_or(0.0);
            let rate = t
                .baselines
                .windows(2)
                .map(|w| (w[1][i] - w[0][i]).norm().max((w[1][j] - w[0][j]).norm()) / t.dt)
                .fold(startup, f64::max);
            let max_baseline_norm = t
                .baselines
                .iter()
                .map(|u| u[i].norm().max(u[j].norm()))
                .fold(0.0, f64::max);

            let both_pcca =
                t.controllers[i] == ControllerKind::Pcca && t.controllers[j] == ControllerKind::Pcca;
            let estimate_identity_residual = both_pcca.then(|| {
                (1..t.len())
                    .map(|k| {
                        let dw = t.w_hat[k][j][i] - t.w_hat[k][i][j];
                        let du = t.baselines[k - 1][i] - t.baselines[k - 1][j];
                        (dw - du).norm()
                    })
                    .fold(0.0, f64::max)
            });

            PairMetrics {
                pair: (i, j),
                min_h,
                min_h_time: t.times.get(kmin).copied().unwrap_or(0.0),
                min_h_r0,
                min_h_r0_literal,
                max_constraint_violation: max_violation,
                min_constraint,
                sampling_bound: -2.0 * beta * rate * t.dt,
                estimate_identity_residual,
                max_baseline_norm,
                left_reduced_set: left,
            }
        })
        .collect();

    let agents = (0..t.n_agents())
        .map(|i| {
            let (kmin, min_speed) = argmin(t.states.iter().map(|s| s[i].velocity.norm()));
            let last = t.states.last().map(|s| s[i]);
            let start = t.states.iter().position(|s| s[i].velocity.norm() >= MOVING_SPEED);
            let after = start.map(|k0| {
                let (k, v) = argmin(t.states[k0..].iter().map(|s| s[i].velocity.norm()));
                (v, t.times[k0 + k])
            });
            AgentMetrics {
                min_speed,
                min_speed_time: t.times.get(kmin).copied().unwrap_or(0.0),
                started_moving_at: start.map(|k| t.times[k]),
                min_speed_after_start: after,
                final_speed: last.map(|x| x.velocity.norm()).unwrap_or(0.0),
                final_distance_to_destination: last
                    .map(|x| (x.position - t.destinations[i]).norm())
                    .unwrap_or(0.0),
                braking_samples: t.braking.iter().filter(|b| b[i]).count(),
            }
        })
        .collect();

    MetricsReport { pairs, agents }
}
