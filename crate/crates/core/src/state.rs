use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

/// Planar position and velocity of one agent's center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub position: Vec2,
    pub velocity: Vec2,
}

impl AgentState {
    pub fn new(position: Vec2, velocity: Vec2) -> Self {
        Self { position, velocity }
    }

    pub fn at_rest(position: Vec2) -> Self {
        Self::new(position, Vec2::zeros())
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().chain(self.velocity.iter()).all(|c| c.is_finite())
    }
}
