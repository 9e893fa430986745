//! Per-sample control policies.
//!
//! All policies read a snapshot of agent states and return accelerations;
//! none of them reads another agent's decision for the same sample.

pub mod lqr;
mod pcca;

use nalgebra::DVector;

pub use lqr::{lqr_baseline, pursuer_controller, LqrGains, LqrWeights};
pub use pcca::{pcca_qp, pcca_step, two_agent_closed_form, PccaMemory};

use crate::barrier::{pair_barrier_at, pair_row, ConstraintRow};
use crate::error::Result;
use crate::qp::{self, QpProblem, QpSolution};
use crate::scenario::BarrierParams;
use crate::state::{AgentState, Vec2};

pub(crate) fn stack(v: &[Vec2]) -> DVector<f64> {
    DVector::from_iterator(2 * v.len(), v.iter().flat_map(|u| [u.x, u.y]))
}

pub(crate) fn unstack(v: &DVector<f64>) -> Vec<Vec2> {
    v.as_slice().chunks(2).map(|c| Vec2::new(c[0], c[1])).collect()
}

/// One row per unordered pair `j < k` over all agents' stacked controls.
pub fn pair_rows(states: &[AgentState], p: &BarrierParams) -> Result<Vec<ConstraintRow>> {
    let n = states.len();
    let mut rows = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 0..n {
        for k in j + 1..n {
            let terms = pair_barrier_at(states, j, k, p)?;
            rows.push(pair_row(&terms, j, k, n));
        }
    }
    Ok(rows)
}

pub fn centralized_qp(states: &[AgentState], u0: &[Vec2], p: &BarrierParams) -> Result<QpProblem> {
    Ok(QpProblem::new(stack(u0), pair_rows(states, p)?))
}

/// Everyone's controls from the QP with full knowledge of all baselines.
/// Infeasibility is returned as [`crate::Error::Infeasible`].
pub fn centralized_step(states: &[AgentState], u0: &[Vec2], p: &BarrierParams) -> Result<Vec<Vec2>> {
    let problem = centralized_qp(states, u0, p)?;
    let opt = qp::solve(&problem, qp::DEFAULT_TOL)?.into_result()?;
    Ok(unstack(&opt.u_star))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecentralizedOutcome {
    pub accel: Vec2,
    /// The QP was infeasible and the braking fallback was applied.
    pub braking: bool,
}

pub fn decentralized_qp(
    host: usize,
    states: &[AgentState],
    u0_host: Vec2,
    chi: f64,
    p: &BarrierParams,
) -> Result<QpProblem> {
    let mut rows = Vec::new();
    for j in (0..states.len()).filter(|&j| j != host) {
        let t = pair_barrier_at(states, host, j, p)?;
        rows.push(ConstraintRow::new(stack(&[t.b]), chi * t.a));
    }
    Ok(QpProblem::new(stack(&[u0_host]), rows))
}

/// Full deceleration along the current velocity; zero at rest.
pub fn braking_action(velocity: &Vec2, brake_accel: f64) -> Vec2 {
    let speed = velocity.norm();
    if speed == 0.0 {
        Vec2::zeros()
    } else {
        -velocity * (brake_accel / speed)
    }
}

/// Host-only QP with responsibility share `chi`: `chi a_ij + b_ij u_i >= 0`.
/// Falls back to braking when the constraints admit no control.
pub fn decentralized_step(
    host: usize,
    states: &[AgentState],
    u0_host: Vec2,
    chi: f64,
    p: &BarrierParams,
    brake_accel: f64,
) -> Result<DecentralizedOutcome> {
    let problem = decentralized_qp(host, states, u0_host, chi, p)?;
    Ok(match qp::solve(&problem, qp::DEFAULT_TOL)? {
        QpSolution::Optimal(opt) => DecentralizedOutcome {
            accel: Vec2::new(opt.u_star[0], opt.u_star[1]),
            braking: false,
        },
        QpSolution::Infeasible(_) => DecentralizedOutcome {
            accel: braking_action(&states[host].velocity, brake_accel),
            braking: true,
        },
    })
}
