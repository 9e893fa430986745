//! Predictor-corrector collision avoidance.
//!
//! The host solves the joint QP for every agent, using its own baseline and
//! zero baselines for the targets. Each target's acceleration enters the
//! constraints shifted by a disturbance estimate, the gap between what the
//! target actually did over the last interval and what the host predicted
//! for it one sample earlier. Only the host's own component is applied.

use crate::barrier::{pair_barrier_at, pair_row, BarrierTerms};
use crate::error::{Error, Result};
use crate::qp::{self, QpProblem};
use crate::scenario::BarrierParams;
use crate::state::{AgentState, Vec2};

use super::{stack, unstack};

/// Controller state kept by one host between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PccaMemory {
    /// Joint QP solution `u*_ij` from the previous sample, one slot per agent.
    pub prev_u_star: Vec<Vec2>,
    /// Disturbance estimates `ŵ_ij`; the host's own slot stays zero.
    pub w_hat: Vec<Vec2>,
}

impl PccaMemory {
    pub fn new(n_agents: usize) -> Self {
        Self {
            prev_u_star: vec![Vec2::zeros(); n_agents],
            w_hat: vec![Vec2::zeros(); n_agents],
        }
    }
}

/// Joint QP seen by `host` for given disturbance estimates:
/// `min ‖u_ii - u0_i‖² + Σ_{j≠i} ‖u_ij‖²` subject to
/// `a_jk + b_jk (u_ij + ŵ_ij - u_ik - ŵ_ik) >= 0` for all `j < k`.
pub fn pcca_qp(
    host: usize,
    states: &[AgentState],
    u0_host: Vec2,
    w_hat: &[Vec2],
    p: &BarrierParams,
) -> Result<QpProblem> {
    let n = states.len();
    if w_hat.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: w_hat.len(),
        });
    }
    let mut u_ref = vec![Vec2::zeros(); n];
    u_ref[host] = u0_host;
    let mut rows = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 0..n {
        for k in j + 1..n {
            let terms = pair_barrier_at(states, j, k, p)?;
            let mut row = pair_row(&terms, j, k, n);
            row.offset += terms.b.dot(&(w_hat[j] - w_hat[k]));
            rows.push(row);
        }
    }
    Ok(QpProblem::new(stack(&u_ref), rows))
}

/// One PCCA sample for `host`.
///
/// `observed` holds every agent's acceleration over the previous interval
/// (the host's own entry is ignored). Returns the applied control `u*_ii`
/// and the memory for the next sample.
pub fn pcca_step(
    host: usize,
    states: &[AgentState],
    u0_host: Vec2,
    mem: &PccaMemory,
    observed: &[Vec2],
    p: &BarrierParams,
) -> Result<(Vec2, PccaMemory)> {
    let n = states.len();
    for len in [observed.len(), mem.prev_u_star.len(), mem.w_hat.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    let w_hat: Vec<Vec2> = (0..n)
        .map(|j| {
            if j == host {
                Vec2::zeros()
            } else {
                observed[j] - mem.prev_u_star[j]
            }
        })
        .collect();

    let problem = pcca_qp(host, states, u0_host, &w_hat, p)?;
    let opt = qp::solve(&problem, qp::DEFAULT_TOL)?.into_result()?;
    let u_star = unstack(&opt.u_star);
    let applied = u_star[host];
    Ok((
        applied,
        PccaMemory {
            prev_u_star: u_star,
            w_hat,
        },
    ))
}

/// Closed-form two-agent PCCA solution for the pair `(1, 2)` with
/// `terms` built from `ξ = X_1 - X_2`. Returns `(u*_host, u*_other)`.
///
/// Host first: `μ1 = a + b u01 - b ŵ2`, `u11 = u01 - min(0, μ1) c`,
/// `u12 = min(0, μ1) c`. Host second: `μ2 = a - b u02 + b ŵ1`,
/// `u22 = u02 + min(0, μ2) c`, `u21 = -min(0, μ2) c`; `c = bᵀ / (2 b bᵀ)`.
pub fn two_agent_closed_form(
    terms: &BarrierTerms,
    u0_host: Vec2,
    w_hat_other: Vec2,
    host_is_first: bool,
) -> Result<(Vec2, Vec2)> {
    let b = terms.b;
    let bb = b.dot(&b);
    if bb == 0.0 {
        return Err(Error::ZeroCoefficients);
    }
    let c = b / (2.0 * bb);
    if host_is_first {
        let mu = terms.a + b.dot(&u0_host) - b.dot(&w_hat_other);
        let m = mu.min(0.0);
        Ok((u0_host - c * m, c * m))
    } else {
        let mu = terms.a - b.dot(&u0_host) + b.dot(&w_hat_other);
        let m = mu.min(0.0);
        Ok((u0_host + c * m, -c * m))
    }
}
