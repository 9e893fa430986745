//! One test per acceptance criterion. Each prints a single
//! `ACCEPTANCE <id> PASS|FAIL <detail>` line; run with `--nocapture` to see
//! them all.

mod common;

use std::time::{Duration, Instant};

use common::*;
use pcca_core::barrier::pair_barrier;
use pcca_core::controllers::{
    centralized_qp, centralized_step, decentralized_qp, decentralized_step, pcca_qp, pcca_step,
    two_agent_closed_form, PccaMemory,
};
use pcca_core::qp::{self, brute_force_oracle, QpProblem, QpSolution};
use pcca_core::scenario::library;
use pcca_core::sim::{dt_sweep, margin_required, metrics, run_scenario, MetricsReport};
use pcca_core::{AgentState, Scenario, Vec2};
use rand::Rng;

const QP_TOL: f64 = 1e-9;
const QP_ORACLE_DIFF: f64 = 1e-7;
const QP_RUNTIME: Duration = Duration::from_secs(10);
const CLOSED_FORM_DIFF: f64 = 1e-9;
const IDENTITY_REL: f64 = 1e-9;
const BOUND_SLACK: f64 = 1e-6;
const STOP_SPEED: f64 = 1e-3;
const ARRIVAL_DISTANCE: f64 = 0.1;
const EXAMPLE1_PERTURBATION: f64 = 1e-3;
const EXAMPLE1_RUNTIME: Duration = Duration::from_secs(5);
const EXAMPLE2_NOMINAL_FACTOR: f64 = 1.011;
const EXAMPLE2_BAND: (f64, f64) = (1.005, 1.05);
const EXAMPLE2_BAND_STEP: f64 = 0.001;
const SCALING_RATIO: f64 = 4.0;
const SWEEP_DTS: [f64; 4] = [0.05, 0.025, 0.01, 0.005];
const SWEEP_RUNTIME: Duration = Duration::from_secs(120);
const FINE_DT: f64 = 1e-3;
const FINE_FLOOR: f64 = -1e-6;
const RANDOM_CASES: usize = 1000;
const RANDOM_RUNS: usize = 100;

fn report(id: &str, name: &str, ok: bool, detail: String) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {id} {verdict} {name}: {detail}");
    assert!(ok, "{id} {name}: {detail}");
}

fn max_diff(a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>) -> f64 {
    (a - b).norm()
}

#[test]
fn c01_qp_oracle_equivalence() {
    let mut rng = rng(101);
    let problems: Vec<QpProblem> = (0..RANDOM_CASES).map(|_| random_qp(&mut rng, 8, 6)).collect();
    let start = Instant::now();
    let solved: Vec<QpSolution> = problems.iter().map(|p| qp::solve(p, QP_TOL).unwrap()).collect();
    let elapsed = start.elapsed();

    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    let mut infeasible = 0;
    for (p, s) in problems.iter().zip(&solved) {
        let o = brute_force_oracle(p, QP_TOL).unwrap();
        match (s, &o) {
            (QpSolution::Optimal(a), QpSolution::Optimal(b)) => {
                worst = worst.max(max_diff(&a.u_star, &b.u_star));
            }
            (QpSolution::Infeasible(c), QpSolution::Infeasible(_)) => {
                infeasible += 1;
                assert!(c.verify(p, QP_TOL));
            }
            _ => mismatches += 1,
        }
    }
    report(
        "C1",
        "QP oracle equivalence",
        mismatches == 0 && worst <= QP_ORACLE_DIFF && elapsed < QP_RUNTIME,
        format!(
            "{RANDOM_CASES} problems ({infeasible} infeasible), status mismatches {mismatches}, \
             max ‖Δu*‖ {worst:.2e} (≤ {QP_ORACLE_DIFF:.0e}), solve time {elapsed:.2?} (< {QP_RUNTIME:?})"
        ),
    );
}

#[test]
fn c02_closed_form_equivalence() {
    let p = nominal_params();
    let mut rng = rng(202);
    let mut worst: f64 = 0.0;
    let mut active = 0;
    for _ in 0..RANDOM_CASES {
        let states = random_states(&mut rng, 2, 8.0, p.r + 0.1, 6.0);
        let host = rng.gen_range(0..2);
        let other = 1 - host;
        let u0 = vec2(&mut rng, 10.0);
        let mem = PccaMemory {
            prev_u_star: vec![vec2(&mut rng, 5.0), vec2(&mut rng, 5.0)],
            w_hat: vec![Vec2::zeros(); 2],
        };
        let observed = vec![vec2(&mut rng, 5.0), vec2(&mut rng, 5.0)];
        let (applied, next) = pcca_step(host, &states, u0, &mem, &observed, &p).unwrap();

        let terms = pair_barrier(&states[0], &states[1], &p).unwrap();
        let w_other = observed[other] - mem.prev_u_star[other];
        let (cf_host, cf_other) = two_agent_closed_form(&terms, u0, w_other, host == 0).unwrap();
        if cf_host != u0 {
            active += 1;
        }
        worst = worst
            .max((applied - cf_host).norm())
            .max((next.prev_u_star[other] - cf_other).norm());
    }
    report(
        "C2",
        "closed-form equivalence",
        worst <= CLOSED_FORM_DIFF,
        format!("{RANDOM_CASES} states ({active} with an active constraint), max difference {worst:.2e} (≤ {CLOSED_FORM_DIFF:.0e})"),
    );
}

fn two_pcca_runs() -> Vec<(String, MetricsReport)> {
    let mut scenarios = vec![("example 1".to_string(), library::head_on())];
    let mut rng = rng(303);
    for n in 0..RANDOM_RUNS {
        scenarios.push((format!("random #{n}"), random_two_pcca(&mut rng)));
    }
    scenarios
        .into_iter()
        .map(|(name, s)| {
            let trace = run_scenario(&s).unwrap();
            (name, metrics(&trace, &s.barrier))
        })
        .collect()
}

#[test]
fn c03_estimate_identity() {
    let mut failures = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    let runs = two_pcca_runs();
    for (name, m) in &runs {
        let pair = &m.pairs[0];
        let residual = pair.estimate_identity_residual.unwrap();
        let limit = IDENTITY_REL * (1.0 + pair.max_baseline_norm);
        worst_ratio = worst_ratio.max(residual / limit);
        if residual > limit {
            failures.push(format!("{name}: {residual:.2e} > {limit:.2e}"));
        }
    }
    report(
        "C3",
        "estimate identity",
        failures.is_empty(),
        format!(
            "{} runs, worst residual/limit {worst_ratio:.2e}, failures {failures:?}",
            runs.len()
        ),
    );
}

#[test]
fn c04_sampling_bound() {
    let mut failures = Vec::new();
    let mut tightest = f64::INFINITY;
    let runs = two_pcca_runs();
    for (name, m) in &runs {
        let pair = &m.pairs[0];
        let margin = pair.min_constraint - (pair.sampling_bound - BOUND_SLACK);
        tightest = tightest.min(margin);
        if margin < 0.0 {
            failures.push(format!(
                "{name}: {:.4} < {:.4}",
                pair.min_constraint, pair.sampling_bound
            ));
        }
    }
    report(
        "C4",
        "sampling bound on constraint residual",
        failures.is_empty(),
        format!(
            "{} runs, smallest slack to bound {tightest:.3e}, failures {failures:?}",
            runs.len()
        ),
    );
}

#[test]
fn c05_example1() {
    let start = Instant::now();
    let s = library::head_on();
    let m = metrics(&run_scenario(&s).unwrap(), &s.barrier);
    let mut perturbed = library::head_on();
    perturbed.symmetry_perturbation = EXAMPLE1_PERTURBATION;
    let mp = metrics(&run_scenario(&perturbed).unwrap(), &perturbed.barrier);
    let elapsed = start.elapsed();

    let stops: Vec<f64> = m
        .agents
        .iter()
        .map(|a| a.min_speed_after_start.map(|(v, _)| v).unwrap_or(f64::INFINITY))
        .collect();
    let arrivals: Vec<f64> = mp.agents.iter().map(|a| a.final_distance_to_destination).collect();
    let ok = m.min_h_r0() >= 0.0
        && stops.iter().all(|&v| v < STOP_SPEED)
        && mp.min_h_r0() >= 0.0
        && arrivals.iter().all(|&d| d < ARRIVAL_DISTANCE)
        && elapsed < EXAMPLE1_RUNTIME;
    report(
        "C5",
        "head-on example",
        ok,
        format!(
            "min h_r0 {:.4} m², speed at stop {stops:?} m/s; perturbed min h_r0 {:.4} m², \
             final distances {arrivals:?} m; runtime {elapsed:.2?}",
            m.min_h_r0(),
            mp.min_h_r0()
        ),
    );
}

#[test]
fn c06_example2() {
    let base = library::pursuer_evader(0.0);
    let r0 = base.agents[0].config.radius;
    let margin = margin_required(&base, base.dt).unwrap();
    let f_star = 1.0 + margin / (2.0 * r0);

    let min_h_r0 = |frac: f64| {
        let s = library::pursuer_evader(frac);
        metrics(&run_scenario(&s).unwrap(), &s.barrier).min_h_r0()
    };
    let unprotected = min_h_r0(0.0);
    let at_threshold = min_h_r0(f_star - 1.0);
    let mut band_failures = Vec::new();
    let steps = ((EXAMPLE2_BAND.1 - EXAMPLE2_BAND.0) / EXAMPLE2_BAND_STEP).round() as usize;
    for n in 0..=steps {
        let f = EXAMPLE2_BAND.0 + n as f64 * EXAMPLE2_BAND_STEP;
        if f >= f_star {
            let v = min_h_r0(f - 1.0);
            if v < 0.0 {
                band_failures.push(format!("{f:.3}: {v:.4}"));
            }
        }
    }
    let nominal = min_h_r0(EXAMPLE2_NOMINAL_FACTOR - 1.0);

    let ok = (EXAMPLE2_BAND.0..=EXAMPLE2_BAND.1).contains(&f_star)
        && at_threshold >= 0.0
        && band_failures.is_empty()
        && unprotected < 0.0;
    report(
        "C6",
        "pursuer/evader example",
        ok,
        format!(
            "required margin {margin:.5} m = {:.2}% of r0, r/(2 r0) = {f_star:.5} in {EXAMPLE2_BAND:?}; \
             min h_r0 at that radius {at_threshold:.4}, band failures above it {band_failures:?}; \
             margin 0 gives min h_r0 {unprotected:.4}; r/(2 r0) = {EXAMPLE2_NOMINAL_FACTOR} gives {nominal:.4}",
            100.0 * margin / r0
        ),
    );
}

#[test]
fn c07_margin_scaling() {
    let base = library::pursuer_evader(0.0);
    let start = Instant::now();
    let rows = dt_sweep(&base, &SWEEP_DTS).unwrap();
    let elapsed = start.elapsed();
    let margin_at = |dt: f64| rows.iter().find(|r| r.dt == dt).unwrap().margin;
    let (m50, m10) = (margin_at(0.05), margin_at(0.01));
    let monotone = rows.windows(2).all(|w| w[1].margin <= w[0].margin);
    let table: Vec<String> = rows.iter().map(|r| format!("{}ms→{:.5}", r.dt * 1e3, r.margin)).collect();
    report(
        "C7",
        "margin scaling with sample time",
        m10 <= m50 / SCALING_RATIO && monotone && elapsed < SWEEP_RUNTIME,
        format!(
            "margins {table:?}, 50/10 ms ratio {:.2} (≥ {SCALING_RATIO}), sweep time {elapsed:.2?}",
            m50 / m10
        ),
    );
}

#[test]
fn c08_feasibility_equivalence() {
    let p = nominal_params();
    let mut rng = rng(808);
    let mut mismatches = 0;
    let mut infeasible = 0;
    for _ in 0..RANDOM_CASES {
        let n = rng.gen_range(2..=4);
        let states = random_states(&mut rng, n, 6.0, 1e-3, 8.0);
        let u0: Vec<Vec2> = (0..n).map(|_| vec2(&mut rng, 10.0)).collect();
        let mut w_hat: Vec<Vec2> = (0..n).map(|_| vec2(&mut rng, 10.0)).collect();
        let host = rng.gen_range(0..n);
        w_hat[host] = Vec2::zeros();

        let central = qp::solve(&centralized_qp(&states, &u0, &p).unwrap(), QP_TOL).unwrap();
        let local = qp::solve(&pcca_qp(host, &states, u0[host], &w_hat, &p).unwrap(), QP_TOL).unwrap();
        if central.is_optimal() != local.is_optimal() {
            mismatches += 1;
        }
        if !central.is_optimal() {
            infeasible += 1;
        }
    }
    report(
        "C8",
        "feasibility equivalence",
        mismatches == 0,
        format!("{RANDOM_CASES} states, status mismatches {mismatches}, infeasible centralized problems {infeasible}"),
    );
}

fn slack_at_reference(p: &QpProblem) -> bool {
    p.rows.iter().all(|r| r.value(&p.u_ref) > 0.0)
}

#[test]
fn c09_inactive_passthrough() {
    let p = nominal_params();
    let mut rng = rng(909);
    let mut checked = 0;
    let mut failures = Vec::new();
    while checked < RANDOM_CASES {
        let n = rng.gen_range(2..=4);
        let states = random_states(&mut rng, n, 40.0, 20.0, 1.0);
        let u0: Vec<Vec2> = (0..n).map(|_| vec2(&mut rng, 2.0)).collect();
        let host = rng.gen_range(0..n);
        let mem = PccaMemory {
            prev_u_star: (0..n).map(|_| vec2(&mut rng, 1.0)).collect(),
            w_hat: vec![Vec2::zeros(); n],
        };
        let observed: Vec<Vec2> = (0..n).map(|_| vec2(&mut rng, 1.0)).collect();
        let mut w_hat: Vec<Vec2> = observed.iter().zip(&mem.prev_u_star).map(|(o, u)| o - u).collect();
        w_hat[host] = Vec2::zeros();

        let all_slack = slack_at_reference(&centralized_qp(&states, &u0, &p).unwrap())
            && slack_at_reference(&decentralized_qp(host, &states, u0[host], 1.0, &p).unwrap())
            && slack_at_reference(&decentralized_qp(host, &states, u0[host], 0.5, &p).unwrap())
            && slack_at_reference(&pcca_qp(host, &states, u0[host], &w_hat, &p).unwrap());
        if !all_slack {
            continue;
        }
        checked += 1;

        if centralized_step(&states, &u0, &p).unwrap() != u0 {
            failures.push("centralized");
        }
        for chi in [1.0, 0.5] {
            let out = decentralized_step(host, &states, u0[host], chi, &p, 10.0).unwrap();
            if out.accel != u0[host] || out.braking {
                failures.push("decentralized");
            }
        }
        let (applied, _) = pcca_step(host, &states, u0[host], &mem, &observed, &p).unwrap();
        if applied != u0[host] {
            failures.push("pcca");
        }
    }
    report(
        "C9",
        "inactive-constraint passthrough",
        failures.is_empty(),
        format!("{checked} slack states × 4 policies, exact mismatches {failures:?}"),
    );
}

#[test]
fn c10_fine_sampling_invariance() {
    let mut s: Scenario = library::head_on();
    s.dt = FINE_DT;
    let trace = run_scenario(&s).unwrap();
    let min_h = trace.h.iter().map(|row| row[0]).fold(f64::INFINITY, f64::min);
    let initial: AgentState = trace.states[0][0];
    report(
        "C10",
        "forward invariance at 1 ms",
        min_h >= FINE_FLOOR,
        format!(
            "{} samples from x0 = {:?}, min h {min_h:.3e} m² (≥ {FINE_FLOOR:.0e})",
            trace.len(),
            initial.position.as_slice()
        ),
    );
}
