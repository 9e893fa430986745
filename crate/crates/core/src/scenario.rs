//! Scenario configuration, validation and the TOML scenario format.
//!
//! A scenario file looks like this (defaults shown in comments):
//!
//! ```toml
//! dt = 0.05                      # default 0.05 s
//! horizon = 30.0
//! accel_observation = "exact"    # or "finite-difference"
//! symmetry_perturbation = 0.0    # offset added to agent 0's initial y
//! brake_accel = 10.0             # decentralized braking deceleration
//!
//! [barrier]
//! r = 4.0
//! l0 = 6.0
//! l1 = 5.0
//! # lambda1 is derived when omitted
//!
//! [baseline]                     # LQR weights, default Q = 4 I, R = I
//! q_position = 4.0
//! q_velocity = 4.0
//! r = 1.0
//!
//! [[agents]]
//! radius = 2.0
//! position = [-10.0, 0.0]
//! velocity = [0.0, 0.0]
//! destination = [10.0, 0.0]
//! controller = "pcca"            # centralized-member | decentralized | pcca
//!                                # | non-interacting | pursuer
//! chi = 1.0                      # decentralized only, 1 or 0.5
//! pursue = 1                     # pursuer only, index of the chased agent
//! ```

use serde::{Deserialize, Serialize};

use crate::controllers::lqr::LqrWeights;
use crate::error::{Error, Result};
use crate::state::{AgentState, Vec2};

pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_BRAKE_ACCEL: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKind {
    CentralizedMember,
    Decentralized,
    Pcca,
    NonInteracting,
    Pursuer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccelObservation {
    /// The targets' applied controls from the previous interval.
    #[default]
    Exact,
    /// `(v(k) - v(k-1)) / dt`.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentConfig {
    pub radius: f64,
    pub destination: Vec2,
    pub controller: ControllerKind,
    /// Responsibility share for the decentralized policy: 1 or 1/2.
    pub chi: f64,
    /// Agent chased by a pursuer. `None` chases the lowest-index other agent.
    pub pursue: Option<usize>,
}

impl AgentConfig {
    pub fn new(radius: f64, destination: Vec2, controller: ControllerKind) -> Self {
        Self {
            radius,
            destination,
            controller,
            chi: 1.0,
            pursue: None,
        }
    }
}

/// Parameters of the relative-degree-two pair barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierParams {
    /// Separation radius, including any margin over the contact distance.
    pub r: f64,
    pub l0: f64,
    pub l1: f64,
    /// More negative root of `s^2 + l1 s + l0`.
    pub lambda1: f64,
}

impl BarrierParams {
    pub fn new(r: f64, l0: f64, l1: f64) -> Self {
        Self {
            r,
            l0,
            l1,
            lambda1: more_negative_root(l0, l1),
        }
    }

    pub fn with_radius(self, r: f64) -> Self {
        Self { r, ..self }
    }
}

fn more_negative_root(l0: f64, l1: f64) -> f64 {
    (-l1 - (l1 * l1 - 4.0 * l0).sqrt()) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioAgent {
    pub config: AgentConfig,
    pub initial: AgentState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub agents: Vec<ScenarioAgent>,
    pub barrier: BarrierParams,
    pub dt: f64,
    pub horizon: f64,
    pub observation: AccelObservation,
    pub symmetry_perturbation: f64,
    pub baseline: LqrWeights,
    pub brake_accel: f64,
}

impl Scenario {
    pub fn new(agents: Vec<ScenarioAgent>, barrier: BarrierParams, horizon: f64) -> Self {
        Self {
            agents,
            barrier,
            dt: DEFAULT_DT,
            horizon,
            observation: AccelObservation::Exact,
            symmetry_perturbation: 0.0,
            baseline: LqrWeights::default(),
            brake_accel: DEFAULT_BRAKE_ACCEL,
        }
    }

    /// Initial states with the symmetry perturbation applied to agent 0.
    pub fn initial_states(&self) -> Vec<AgentState> {
        let mut states: Vec<AgentState> = self.agents.iter().map(|a| a.initial).collect();
        if let Some(first) = states.first_mut() {
            first.position.y += self.symmetry_perturbation;
        }
        states
    }

    /// Number of recorded samples, `floor(horizon / dt) + 1`.
    pub fn sample_count(&self) -> usize {
        // guard against 30.0 / 0.05 = 599.999...
        let steps = (self.horizon / self.dt * (1.0 + 4.0 * f64::EPSILON)).floor();
        steps as usize + 1
    }

    pub fn max_radius(&self) -> f64 {
        self.agents.iter().map(|a| a.config.radius).fold(0.0, f64::max)
    }
}

/// Checks every scenario invariant. An empty list means the scenario is valid.
pub fn validate_scenario(s: &Scenario) -> Vec<String> {
    let mut v = Vec::new();
    let n = s.agents.len();
    if n < 2 {
        v.push(format!("scenario needs at least 2 agents, has {n}"));
    }
    if !(s.dt.is_finite() && s.dt > 0.0) {
        v.push(format!("dt must be finite and > 0 (got {})", s.dt));
    }
    if !s.horizon.is_finite() || s.dt >= s.horizon {
        v.push(format!("dt ({}) must be < horizon ({})", s.dt, s.horizon));
    }
    if !(s.symmetry_perturbation.is_finite() && s.symmetry_perturbation >= 0.0) {
        v.push(format!(
            "symmetry_perturbation must be finite and >= 0 (got {})",
            s.symmetry_perturbation
        ));
    }
    if !(s.brake_accel.is_finite() && s.brake_accel > 0.0) {
        v.push(format!("brake_accel must be > 0 (got {})", s.brake_accel));
    }
    let w = s.baseline;
    if !(w.q_position > 0.0 && w.q_velocity >= 0.0 && w.r > 0.0) {
        v.push("baseline weights need q_position > 0, q_velocity >= 0, r > 0".to_string());
    }

    for (i, a) in s.agents.iter().enumerate() {
        let c = &a.config;
        if !a.initial.is_finite() {
            v.push(format!("agent {i}: non-finite initial state"));
        }
        if !c.destination.iter().all(|x| x.is_finite()) {
            v.push(format!("agent {i}: non-finite destination"));
        }
        if !(c.radius.is_finite() && c.radius > 0.0) {
            v.push(format!("agent {i}: radius r0 must be > 0 (got {})", c.radius));
        }
        if c.chi != 1.0 && c.chi != 0.5 {
            v.push(format!("agent {i}: chi must be 1 or 0.5 (got {})", c.chi));
        }
        if let Some(t) = c.pursue {
            if t >= n || t == i {
                v.push(format!("agent {i}: pursue index {t} is not another agent"));
            }
        }
    }

    let b = &s.barrier;
    let max_r0 = s.max_radius();
    if !(b.r.is_finite() && b.r >= 2.0 * max_r0) {
        v.push(format!("r ({}) must be >= 2·max(r0) ({})", b.r, 2.0 * max_r0));
    }
    if !(b.l0 > 0.0 && b.l1 > 0.0) {
        v.push(format!("l0 and l1 must be > 0 (got {}, {})", b.l0, b.l1));
    }
    let disc = b.l1 * b.l1;
    if disc < 4.0 * b.l0 {
        v.push(format!("l1² < 4·l0 ({} < {})", disc, 4.0 * b.l0));
    } else if b.l0 > 0.0 && b.l1 > 0.0 {
        let root = more_negative_root(b.l0, b.l1);
        if (b.lambda1 - root).abs() > 1e-12 * root.abs().max(1.0) {
            v.push(format!(
                "lambda1 ({}) is not the more negative root {} of s² + l1·s + l0",
                b.lambda1, root
            ));
        }
    }

    let states = s.initial_states();
    for i in 0..n {
        for j in i + 1..n {
            let d = (states[i].position - states[j].position).norm();
            if d.is_nan() || d <= b.r {
                v.push(format!(
                    "initial distance not > r: agents {i} and {j} are {d} apart, r = {}",
                    b.r
                ));
            }
        }
    }
    v
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default = "default_dt")]
    dt: f64,
    horizon: f64,
    #[serde(default)]
    accel_observation: AccelObservation,
    #[serde(default)]
    symmetry_perturbation: f64,
    #[serde(default = "default_brake")]
    brake_accel: f64,
    barrier: BarrierFile,
    #[serde(default)]
    baseline: BaselineFile,
    agents: Vec<AgentFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BarrierFile {
    r: f64,
    l0: f64,
    l1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda1: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaselineFile {
    q_position: f64,
    q_velocity: f64,
    r: f64,
}

impl Default for BaselineFile {
    fn default() -> Self {
        let w = LqrWeights::default();
        Self {
            q_position: w.q_position,
            q_velocity: w.q_velocity,
            r: w.r,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentFile {
    radius: f64,
    position: [f64; 2],
    #[serde(default)]
    velocity: [f64; 2],
    destination: [f64; 2],
    controller: ControllerKind,
    #[serde(default = "default_chi")]
    chi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pursue: Option<usize>,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_brake() -> f64 {
    DEFAULT_BRAKE_ACCEL
}

fn default_chi() -> f64 {
    1.0
}

fn v2(a: [f64; 2]) -> Vec2 {
    Vec2::new(a[0], a[1])
}

impl From<ScenarioFile> for Scenario {
    fn from(f: ScenarioFile) -> Self {
        let mut barrier = BarrierParams::new(f.barrier.r, f.barrier.l0, f.barrier.l1);
        if let Some(l) = f.barrier.lambda1 {
            barrier.lambda1 = l;
        }
        Scenario {
            agents: f
                .agents
                .into_iter()
                .map(|a| ScenarioAgent {
                    config: AgentConfig {
                        radius: a.radius,
                        destination: v2(a.destination),
                        controller: a.controller,
                        chi: a.chi,
                        pursue: a.pursue,
                    },
                    initial: AgentState::new(v2(a.position), v2(a.velocity)),
                })
                .collect(),
            barrier,
            dt: f.dt,
            horizon: f.horizon,
            observation: f.accel_observation,
            symmetry_perturbation: f.symmetry_perturbation,
            baseline: LqrWeights {
                q_position: f.baseline.q_position,
                q_velocity: f.baseline.q_velocity,
                r: f.baseline.r,
            },
            brake_accel: f.brake_accel,
        }
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            dt: s.dt,
            horizon: s.horizon,
            accel_observation: s.observation,
            symmetry_perturbation: s.symmetry_perturbation,
            brake_accel: s.brake_accel,
            barrier: BarrierFile {
                r: s.barrier.r,
                l0: s.barrier.l0,
                l1: s.barrier.l1,
                lambda1: Some(s.barrier.lambda1),
            },
            baseline: BaselineFile {
                q_position: s.baseline.q_position,
                q_velocity: s.baseline.q_velocity,
                r: s.baseline.r,
            },
            agents: s
                .agents
                .iter()
                .map(|a| AgentFile {
                    radius: a.config.radius,
                    position: [a.initial.position.x, a.initial.position.y],
                    velocity: [a.initial.velocity.x, a.initial.velocity.y],
                    destination: [a.config.destination.x, a.config.destination.y],
                    controller: a.config.controller,
                    chi: a.config.chi,
                    pursue: a.config.pursue,
                })
                .collect(),
        }
    }
}

/// Parses without validating.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(file.into())
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let s = parse_scenario(text)?;
    let violations = validate_scenario(&s);
    if violations.is_empty() {
        Ok(s)
    } else {
        Err(Error::InvalidScenario(violations))
    }
}

/// Writes the scenario in the format read by [`load_scenario`], with every
/// field explicit.
pub fn save_scenario(s: &Scenario) -> String {
    toml::to_string(&ScenarioFile::from(s)).expect("scenario fields are always serializable")
}

/// Scenario library.
pub mod library {
    use super::*;

    /// Two PCCA agents approaching head-on from (±10, 0) with swapped
    /// destinations, `r0 = 2`, `r = 4`, `l0 = 6`, `l1 = 5`, 50 ms sampling.
    pub fn head_on() -> Scenario {
        let agent = |x: f64| ScenarioAgent {
            config: AgentConfig::new(2.0, Vec2::new(-x, 0.0), ControllerKind::Pcca),
            initial: AgentState::at_rest(Vec2::new(x, 0.0)),
        };
        Scenario::new(vec![agent(-10.0), agent(10.0)], BarrierParams::new(4.0, 6.0, 5.0), 30.0)
    }

    /// Agent 0 runs PCCA towards its destination while agent 1 chases it
    /// with the pure LQR law. The controller radius is `2 r0 (1 + margin_frac)`.
    pub fn pursuer_evader(margin_frac: f64) -> Scenario {
        let r0 = 2.0;
        let evader = ScenarioAgent {
            config: AgentConfig::new(r0, Vec2::new(20.0, 0.0), ControllerKind::Pcca),
            initial: AgentState::at_rest(Vec2::new(0.0, 0.0)),
        };
        let mut chase = AgentConfig::new(r0, Vec2::new(0.0, 0.0), ControllerKind::Pursuer);
        chase.pursue = Some(0);
        let pursuer = ScenarioAgent {
            config: chase,
            initial: AgentState::at_rest(Vec2::new(-10.0, 2.0)),
        };
        Scenario::new(
            vec![evader, pursuer],
            BarrierParams::new(2.0 * r0 * (1.0 + margin_frac), 6.0, 5.0),
            20.0,
        )
    }
}
