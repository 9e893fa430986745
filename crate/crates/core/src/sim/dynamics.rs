use crate::state::{AgentState, Vec2};

/// Exact zero-order-hold update of the planar double integrator.
pub fn step_dynamics(x: &AgentState, u: &Vec2, dt: f64) -> AgentState {
    AgentState {
        position: x.position + x.velocity * dt + u * (0.5 * dt * dt),
        velocity: x.velocity + u * dt,
    }
}
