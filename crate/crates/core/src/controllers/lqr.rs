//! LQR baseline for a planar double integrator.
//!
//! Each axis is the decoupled system `p' = v, v' = u`. With diagonal state
//! weight `diag(q_position, q_velocity)` and control weight `r` the Riccati
//! solution has closed form, so the gains are computed directly.

use crate::state::{AgentState, Vec2};

/// Per-axis LQR weights; `Q = diag(q_position, q_velocity)` on each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqrWeights {
    pub q_position: f64,
    pub q_velocity: f64,
    pub r: f64,
}

impl Default for LqrWeights {
    /// `Q = 4 I_4`, `R = I_2`.
    fn default() -> Self {
        Self {
            q_position: 4.0,
            q_velocity: 4.0,
            r: 1.0,
        }
    }
}

/// State-feedback gains `u = -kp (p - p_dest) - kv v`, applied per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqrGains {
    pub kp: f64,
    pub kv: f64,
}

impl LqrGains {
    /// Solves the per-axis continuous algebraic Riccati equation.
    ///
    /// Writing `P = [[p1, p2], [p2, p3]]`, the equation reduces to
    /// `p2^2 = q_p r` and `p3^2 = r (q_v + 2 p2)`; `K = [p2, p3] / r`.
    pub fn from_weights(w: LqrWeights) -> Self {
        let p2 = (w.q_position * w.r).sqrt();
        let p3 = (w.r * (w.q_velocity + 2.0 * p2)).sqrt();
        Self {
            kp: p2 / w.r,
            kv: p3 / w.r,
        }
    }
}

impl Default for LqrGains {
    fn default() -> Self {
        Self::from_weights(LqrWeights::default())
    }
}

pub fn lqr_baseline(x: &AgentState, destination: &Vec2, gains: &LqrGains) -> Vec2 {
    -(x.position - destination) * gains.kp - x.velocity * gains.kv
}

/// Chases `evader_position` with the LQR law and no avoidance term. The
/// pursuer's velocity is regulated to zero at the moving target.
pub fn pursuer_controller(pursuer: &AgentState, evader_position: &Vec2, gains: &LqrGains) -> Vec2 {
    lqr_baseline(pursuer, evader_position, gains)
}
