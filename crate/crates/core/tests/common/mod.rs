#![allow(dead_code)]

use nalgebra::DVector;
use pcca_core::barrier::ConstraintRow;
use pcca_core::qp::QpProblem;
use pcca_core::scenario::library;
use pcca_core::{AgentState, BarrierParams, ControllerKind, Scenario, Vec2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn nominal_params() -> BarrierParams {
    BarrierParams::new(4.0, 6.0, 5.0)
}

pub fn vec2(rng: &mut TestRng, half_width: f64) -> Vec2 {
    Vec2::new(
        rng.gen_range(-half_width..half_width),
        rng.gen_range(-half_width..half_width),
    )
}

/// Least-distance QP with entries drawn from U[-10, 10].
pub fn random_qp(rng: &mut TestRng, max_dim: usize, max_rows: usize) -> QpProblem {
    let n = rng.gen_range(1..=max_dim);
    let m = rng.gen_range(0..=max_rows);
    let mut entry = || rng.gen_range(-10.0..10.0);
    let u_ref = DVector::from_fn(n, |_, _| entry());
    let rows = (0..m)
        .map(|_| ConstraintRow::new(DVector::from_fn(n, |_, _| entry()), entry()))
        .collect();
    QpProblem::new(u_ref, rows)
}

/// Agents at least `min_gap` apart inside a square of the given half width.
pub fn random_states(rng: &mut TestRng, n: usize, half_width: f64, min_gap: f64, speed: f64) -> Vec<AgentState> {
    loop {
        let states: Vec<AgentState> = (0..n)
            .map(|_| AgentState::new(vec2(rng, half_width), vec2(rng, speed)))
            .collect();
        let ok = (0..n).all(|i| {
            (i + 1..n).all(|j| (states[i].position - states[j].position).norm() > min_gap)
        });
        if ok {
            return states;
        }
    }
}

/// Two PCCA agents with random initial states and destinations.
pub fn random_two_pcca(rng: &mut TestRng) -> Scenario {
    let mut s = library::head_on();
    s.horizon = 15.0;
    let states = random_states(rng, 2, 15.0, s.barrier.r + 1.0, 2.0);
    for (agent, x) in s.agents.iter_mut().zip(states) {
        agent.initial = x;
        agent.config.destination = vec2(rng, 15.0);
        agent.config.controller = ControllerKind::Pcca;
    }
    s
}
