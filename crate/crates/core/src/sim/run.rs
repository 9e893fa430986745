use crate::barrier::{pair_barrier_at, BarrierTerms};
use crate::controllers::{
    centralized_step, decentralized_step, lqr_baseline, pcca_step, pursuer_controller, LqrGains,
    PccaMemory,
};
use crate::error::{Error, Result};
use crate::scenario::{AccelObservation, ControllerKind, Scenario};
use crate::state::{AgentState, Vec2};

use super::dynamics::step_dynamics;

/// Time-indexed record of one closed-loop run. Every per-sample sequence
/// has `times.len()` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub dt: f64,
    /// Barrier radius used by the controllers.
    pub r: f64,
    pub radii: Vec<f64>,
    pub controllers: Vec<ControllerKind>,
    pub destinations: Vec<Vec2>,
    /// Unordered pairs `(i, j)`, `i < j`, in row-major order.
    pub pairs: Vec<(usize, usize)>,
    pub times: Vec<f64>,
    /// `[k][agent]`
    pub states: Vec<Vec<AgentState>>,
    /// Applied accelerations `[k][agent]`, held over `[t_k, t_k+1)`.
    pub controls: Vec<Vec<Vec2>>,
    /// Baseline accelerations `u0` `[k][agent]`.
    pub baselines: Vec<Vec<Vec2>>,
    /// Disturbance estimates `[k][host][agent]`; zero for non-PCCA hosts.
    pub w_hat: Vec<Vec<Vec<Vec2>>>,
    /// `ξᵀξ - r²` `[k][pair]`
    pub h: Vec<Vec<f64>>,
    /// `ξᵀξ - (r0_i + r0_j)²` `[k][pair]`
    pub h_r0: Vec<Vec<f64>>,
    /// `a + b (u_i - u_j)` with the applied controls `[k][pair]`
    pub constraint: Vec<Vec<f64>>,
    /// Decentralized braking fallback taken `[k][agent]`.
    pub braking: Vec<Vec<bool>>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_agents(&self) -> usize {
        self.radii.len()
    }

    pub fn contact_distance(&self, pair: usize) -> f64 {
        let (i, j) = self.pairs[pair];
        self.radii[i] + self.radii[j]
    }
}

pub(crate) fn agent_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// What every agent decided at one sample.
pub(crate) struct Decisions {
    pub baselines: Vec<Vec2>,
    pub controls: Vec<Vec2>,
    pub braking: Vec<bool>,
}

/// Per-agent policies plus their internal memories.
pub(crate) struct Policies<'a> {
    scenario: &'a Scenario,
    gains: LqrGains,
    memories: Vec<PccaMemory>,
}

impl<'a> Policies<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        let n = scenario.agents.len();
        Self {
            scenario,
            gains: LqrGains::from_weights(scenario.baseline),
            memories: vec![PccaMemory::new(n); n],
        }
    }

    pub fn w_hat(&self) -> Vec<Vec<Vec2>> {
        let n = self.memories.len();
        self.scenario
            .agents
            .iter()
            .zip(&self.memories)
            .map(|(a, m)| match a.config.controller {
                ControllerKind::Pcca => m.w_hat.clone(),
                _ => vec![Vec2::zeros(); n],
            })
            .collect()
    }

    fn pursued(&self, i: usize) -> usize {
        self.scenario.agents[i]
            .config
            .pursue
            .unwrap_or(if i == 0 { 1 } else { 0 })
    }

    /// Decisions for one sample from the current snapshot and the targets'
    /// observed accelerations over the previous interval.
    pub fn decide(&mut self, states: &[AgentState], observed: &[Vec2]) -> Result<Decisions> {
        let s = self.scenario;
        let n = states.len();
        let baselines: Vec<Vec2> = (0..n)
            .map(|i| {
                let cfg = &s.agents[i].config;
                match cfg.controller {
                    ControllerKind::Pursuer => {
                        pursuer_controller(&states[i], &states[self.pursued(i)].position, &self.gains)
                    }
                    _ => lqr_baseline(&states[i], &cfg.destination, &self.gains),
                }
            })
            .collect();

        let central = if s
            .agents
            .iter()
            .any(|a| a.config.controller == ControllerKind::CentralizedMember)
        {
            Some(centralized_step(states, &baselines, &s.barrier)?)
        } else {
            None
        };

        let mut controls = Vec::with_capacity(n);
        let mut braking = vec![false; n];
        for i in 0..n {
            let cfg = &s.agents[i].config;
            let u = match cfg.controller {
                ControllerKind::CentralizedMember => central.as_ref().map(|c| c[i]).unwrap_or(baselines[i]),
                ControllerKind::Decentralized => {
                    let out = decentralized_step(i, states, baselines[i], cfg.chi, &s.barrier, s.brake_accel)?;
                    braking[i] = out.braking;
                    out.accel
                }
                ControllerKind::Pcca => {
                    let (u, mem) = pcca_step(i, states, baselines[i], &self.memories[i], observed, &s.barrier)?;
                    self.memories[i] = mem;
                    u
                }
                ControllerKind::NonInteracting | ControllerKind::Pursuer => baselines[i],
            };
            controls.push(u);
        }
        Ok(Decisions {
            baselines,
            controls,
            braking,
        })
    }
}

/// Targets' accelerations over `[t_{k-1}, t_k)` as seen at sample `k`.
pub(crate) fn observe(
    mode: AccelObservation,
    dt: f64,
    prev_controls: Option<&[Vec2]>,
    prev_states: Option<&[AgentState]>,
    states: &[AgentState],
) -> Vec<Vec2> {
    match mode {
        AccelObservation::Exact => prev_controls
            .map(<[Vec2]>::to_vec)
            .unwrap_or_else(|| vec![Vec2::zeros(); states.len()]),
        AccelObservation::FiniteDifference => match prev_states {
            Some(prev) => prev
                .iter()
                .zip(states)
                .map(|(p, x)| (x.velocity - p.velocity) / dt)
                .collect(),
            None => vec![Vec2::zeros(); states.len()],
        },
    }
}

fn abort(step: usize, dt: f64, e: Error) -> Error {
    Error::SimulationAbort {
        step,
        time: step as f64 * dt,
        source: Box::new(e),
    }
}

fn pair_terms(states: &[AgentState], pairs: &[(usize, usize)], s: &Scenario) -> Result<Vec<BarrierTerms>> {
    pairs
        .iter()
        .map(|&(i, j)| pair_barrier_at(states, i, j, &s.barrier))
        .collect()
}

/// Runs the sampled-data closed loop: at each sample every agent decides
/// from the same snapshot, then all states advance by one exact ZOH step.
///
/// Agent-count and other scenario invariants are the caller's
/// responsibility (see [`crate::validate_scenario`]); a single agent runs
/// its baseline unconstrained.
pub fn run_scenario(s: &Scenario) -> Result<Trace> {
    let n = s.agents.len();
    let pairs = agent_pairs(n);
    let samples = s.sample_count();
    let radii: Vec<f64> = s.agents.iter().map(|a| a.config.radius).collect();

    let mut trace = Trace {
        dt: s.dt,
        r: s.barrier.r,
        radii: radii.clone(),
        controllers: s.agents.iter().map(|a| a.config.controller).collect(),
        destinations: s.agents.iter().map(|a| a.config.destination).collect(),
        pairs: pairs.clone(),
        times: Vec::with_capacity(samples),
        states: Vec::with_capacity(samples),
        controls: Vec::with_capacity(samples),
        baselines: Vec::with_capacity(samples),
        w_hat: Vec::with_capacity(samples),
        h: Vec::with_capacity(samples),
        h_r0: Vec::with_capacity(samples),
        constraint: Vec::with_capacity(samples),
        braking: Vec::with_capacity(samples),
    };

    let mut policies = Policies::new(s);
    let mut states = s.initial_states();
    for k in 0..samples {
        if !states.iter().all(AgentState::is_finite) {
            return Err(abort(k, s.dt, Error::NonFinite("agent state")));
        }
        let observed = observe(
            s.observation,
            s.dt,
            trace.controls.last().map(Vec::as_slice),
            trace.states.last().map(Vec::as_slice),
            &states,
        );
        let terms = pair_terms(&states, &pairs, s).map_err(|e| abort(k, s.dt, e))?;
        let d = policies.decide(&states, &observed).map_err(|e| abort(k, s.dt, e))?;

        trace.times.push(k as f64 * s.dt);
        trace.h.push(terms.iter().map(|t| t.h).collect());
        trace.h_r0.push(
            pairs
                .iter()
                .map(|&(i, j)| {
                    let xi = states[i].position - states[j].position;
                    let contact = radii[i] + radii[j];
                    xi.dot(&xi) - contact * contact
                })
                .collect(),
        );
        trace.constraint.push(
            terms
                .iter()
                .zip(&pairs)
                .map(|(t, &(i, j))| t.residual(&d.controls[i], &d.controls[j]))
                .collect(),
        );
        trace.w_hat.push(policies.w_hat());
        trace.baselines.push(d.baselines);
        trace.braking.push(d.braking);

        let next: Vec<AgentState> = states
            .iter()
            .zip(&d.controls)
            .map(|(x, u)| step_dynamics(x, u, s.dt))
            .collect();
        trace.states.push(std::mem::replace(&mut states, next));
        trace.controls.push(d.controls);
    }
    Ok(trace)
}

/// Recomputes every applied control from the recorded trace, feeding each
/// sample only the recorded states up to that sample and the recorded
/// controls before it.
pub fn replay_controls(s: &Scenario, trace: &Trace) -> Result<Vec<Vec<Vec2>>> {
    let mut policies = Policies::new(s);
    let mut out = Vec::with_capacity(trace.len());
    for k in 0..trace.len() {
        let prev_c = k.checked_sub(1).map(|p| trace.controls[p].as_slice());
        let prev_s = k.checked_sub(1).map(|p| trace.states[p].as_slice());
        let observed = observe(s.observation, s.dt, prev_c, prev_s, &trace.states[k]);
        let d = policies
            .decide(&trace.states[k], &observed)
            .map_err(|e| abort(k, s.dt, e))?;
        out.push(d.controls);
    }
    Ok(out)
}
