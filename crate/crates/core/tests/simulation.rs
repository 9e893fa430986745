mod common;

use common::*;
use pcca_core::scenario::library;
use pcca_core::sim::{
    dt_sweep, linear_fit, margin_required, metrics, replay_controls, run_scenario, step_dynamics,
    MARGIN_RESOLUTION,
};
use pcca_core::{
    AccelObservation, AgentConfig, AgentState, BarrierParams, ControllerKind, Error, Scenario, ScenarioAgent,
    Vec2,
};
use proptest::prelude::*;
use rand::Rng;

fn mixed_scenario(rng: &mut TestRng) -> Scenario {
    let kinds = [
        ControllerKind::Pcca,
        ControllerKind::CentralizedMember,
        ControllerKind::Decentralized,
        ControllerKind::NonInteracting,
    ];
    let n = rng.gen_range(2..=4);
    let states = random_states(rng, n, 12.0, 5.0, 1.0);
    let agents = states
        .into_iter()
        .map(|x| {
            let mut c = AgentConfig::new(2.0, vec2(rng, 12.0), kinds[rng.gen_range(0..kinds.len())]);
            if c.controller == ControllerKind::Decentralized && rng.gen_bool(0.5) {
                c.chi = 0.5;
            }
            ScenarioAgent { config: c, initial: x }
        })
        .collect();
    Scenario::new(agents, BarrierParams::new(4.0, 6.0, 5.0), 6.0)
}

#[test]
fn replay_is_bit_exact() {
    let mut rng = rng(11);
    let mut scenarios = vec![library::head_on(), library::pursuer_evader(0.02)];
    for _ in 0..10 {
        scenarios.push(mixed_scenario(&mut rng));
    }
    let mut fd = library::head_on();
    fd.observation = AccelObservation::FiniteDifference;
    fd.symmetry_perturbation = 1e-3;
    scenarios.push(fd);
    for s in scenarios {
        let trace = run_scenario(&s).unwrap();
        assert_eq!(replay_controls(&s, &trace).unwrap(), trace.controls);
    }
}

#[test]
fn runs_are_deterministic() {
    let mut rng = rng(12);
    let s = mixed_scenario(&mut rng);
    assert_eq!(run_scenario(&s).unwrap(), run_scenario(&s).unwrap());
}

#[test]
fn trace_shapes_and_barrier_values() {
    let s = library::head_on();
    let t = run_scenario(&s).unwrap();
    assert_eq!(t.len(), s.sample_count());
    assert_eq!(t.controls.len(), t.len());
    assert_eq!(t.pairs, vec![(0, 1)]);
    for (k, states) in t.states.iter().enumerate() {
        let d2 = (states[0].position - states[1].position).norm_squared();
        assert_eq!(t.h[k][0], d2 - s.barrier.r * s.barrier.r);
        assert_eq!(t.h_r0[k][0], d2 - 16.0);
        assert!((t.times[k] - k as f64 * s.dt).abs() < 1e-12);
    }
    for k in 1..t.len() {
        for i in 0..2 {
            let x = step_dynamics(&t.states[k - 1][i], &t.controls[k - 1][i], s.dt);
            assert_eq!(x, t.states[k][i]);
        }
    }
}

#[test]
fn unperturbed_head_on_stays_symmetric() {
    let t = run_scenario(&library::head_on()).unwrap();
    for s in &t.states {
        assert_eq!(s[0].position, -s[1].position);
        assert_eq!(s[0].position.y, 0.0);
    }
}

#[test]
fn perturbed_head_on_passes() {
    let mut s = library::head_on();
    s.symmetry_perturbation = 1e-3;
    let t = run_scenario(&s).unwrap();
    let m = metrics(&t, &s.barrier);
    assert!(m.collision_free());
    assert!(m.agents.iter().all(|a| a.final_distance_to_destination < 0.1));
    // the agents swap sides
    assert!(t.states.last().unwrap()[0].position.x > 9.9);
}

#[test]
fn single_agent_converges_with_lqr() {
    let agent = ScenarioAgent {
        config: AgentConfig::new(1.0, Vec2::new(5.0, 5.0), ControllerKind::NonInteracting),
        initial: AgentState::at_rest(Vec2::new(-5.0, 0.0)),
    };
    let s = Scenario::new(vec![agent], BarrierParams::new(2.0, 6.0, 5.0), 20.0);
    let t = run_scenario(&s).unwrap();
    let m = metrics(&t, &s.barrier);
    assert!(m.pairs.is_empty());
    assert!(m.agents[0].final_distance_to_destination < 1e-6);
}

#[test]
fn non_interacting_agents_collide() {
    let mut s = library::head_on();
    for a in &mut s.agents {
        a.config.controller = ControllerKind::NonInteracting;
    }
    s.symmetry_perturbation = 1e-3;
    let m = metrics(&run_scenario(&s).unwrap(), &s.barrier);
    assert!(m.min_h_r0() < 0.0);
}

#[test]
fn centralized_and_reciprocal_head_on_are_safe() {
    for (kind, chi) in [(ControllerKind::CentralizedMember, 1.0), (ControllerKind::Decentralized, 0.5)] {
        let mut s = library::head_on();
        s.symmetry_perturbation = 1e-3;
        for a in &mut s.agents {
            a.config.controller = kind;
            a.config.chi = chi;
        }
        let m = metrics(&run_scenario(&s).unwrap(), &s.barrier);
        assert!(m.min_h_r0() >= 0.0, "{kind:?} chi {chi}: {}", m.min_h_r0());
    }
}

#[test]
fn coincident_agents_abort_with_location() {
    let mut s = library::head_on();
    s.agents[1].initial = s.agents[0].initial;
    match run_scenario(&s) {
        Err(Error::SimulationAbort { step, source, .. }) => {
            assert_eq!(step, 0);
            assert_eq!(*source, Error::DegenerateGeometry { i: 0, j: 1 });
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn overflowing_state_aborts() {
    let mut s = library::head_on();
    for a in &mut s.agents {
        a.config.controller = ControllerKind::NonInteracting;
    }
    s.agents[0].initial.velocity = Vec2::new(f64::MAX, 0.0);
    match run_scenario(&s) {
        Err(Error::SimulationAbort { source, .. }) => assert_eq!(*source, Error::NonFinite("agent state")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn finite_difference_matches_exact_observation() {
    // with the exact ZOH update, velocity differences recover the applied
    // accelerations up to rounding
    let mut exact = library::head_on();
    exact.symmetry_perturbation = 1e-3;
    let mut fd = exact.clone();
    fd.observation = AccelObservation::FiniteDifference;
    let a = run_scenario(&exact).unwrap();
    let b = run_scenario(&fd).unwrap();
    let worst = a
        .states
        .iter()
        .zip(&b.states)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p.position - q.position).norm()))
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn cooperating_pair_needs_no_margin() {
    let s = library::head_on();
    assert_eq!(margin_required(&s, 0.05).unwrap(), 0.0);
    let rows = dt_sweep(&s, &[0.05, 0.01]).unwrap();
    assert!(rows.iter().all(|r| r.margin <= MARGIN_RESOLUTION * 2.0));
}

#[test]
fn pursuer_sweep_is_linear() {
    let rows = dt_sweep(&library::pursuer_evader(0.0), &[0.05, 0.025, 0.01, 0.005]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].margin <= w[0].margin));
    let (slope, intercept) = linear_fit(&rows);
    assert!(slope >= 0.0);
    assert!(intercept.abs() <= MARGIN_RESOLUTION * 2.0, "intercept {intercept}");
}

#[test]
fn single_dt_sweep_has_one_row() {
    let rows = dt_sweep(&library::pursuer_evader(0.0), &[0.05]).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(dt_sweep(&library::head_on(), &[]), Err(Error::EmptySweep));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn zoh_semigroup(
        px in -10.0..10.0f64, py in -10.0..10.0f64,
        vx in -5.0..5.0f64, vy in -5.0..5.0f64,
        ux in -5.0..5.0f64, uy in -5.0..5.0f64,
        t1 in 0.0..1.0f64, t2 in 0.0..1.0f64,
    ) {
        let x = AgentState::new(Vec2::new(px, py), Vec2::new(vx, vy));
        let u = Vec2::new(ux, uy);
        let once = step_dynamics(&x, &u, t1 + t2);
        let twice = step_dynamics(&step_dynamics(&x, &u, t1), &u, t2);
        prop_assert!((once.position - twice.position).norm() < 1e-12);
        prop_assert!((once.velocity - twice.velocity).norm() < 1e-12);
    }

    #[test]
    fn two_pcca_identity_holds(seed in any::<u64>()) {
        let s = random_two_pcca(&mut rng(seed));
        let m = metrics(&run_scenario(&s).unwrap(), &s.barrier);
        let pair = &m.pairs[0];
        prop_assert!(pair.estimate_identity_residual.unwrap() <= 1e-9 * (1.0 + pair.max_baseline_norm));
        prop_assert!(pair.min_constraint >= pair.sampling_bound - 1e-6);
    }
}
