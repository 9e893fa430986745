//! Collision avoidance for planar double-integrator agents using robust
//! control barrier functions and quadratic programs.
//!
//! Three policies are provided: a centralized QP over all agents, a
//! decentralized QP over the host's own control, and the predictor-corrector
//! policy in which every agent solves the joint QP with disturbance estimates
//! for the targets and applies only its own component. The [`sim`] module
//! runs them in a deterministic sampled-data loop.

pub mod barrier;
pub mod controllers;
mod error;
pub mod qp;
pub mod scenario;
pub mod sim;
mod state;

pub use error::{Error, Result};
pub use scenario::{
    load_scenario, save_scenario, validate_scenario, AccelObservation, AgentConfig, BarrierParams,
    ControllerKind, Scenario, ScenarioAgent,
};
pub use state::{AgentState, Vec2};
