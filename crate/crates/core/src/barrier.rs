//! Barrier values and linear constraint rows.
//!
//! Agent pairs use `h(ξ) = ξᵀξ - r²`, which has relative degree two with
//! respect to both agents' accelerations. The constraint
//! `ḧ + l1 ḣ + l0 h = a + b (u_i - u_j) >= 0` is expressed as a
//! [`ConstraintRow`] over the stacked control vector.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scenario::BarrierParams;
use crate::state::{AgentState, Vec2};

/// `(h, ḣ, a, b)` for one ordered agent pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierTerms {
    pub h: f64,
    pub hdot: f64,
    pub a: f64,
    /// Row vector `2 ξᵀ`, stored as a column.
    pub b: Vec2,
}

impl BarrierTerms {
    /// Builds the terms from relative position `xi = X_i - X_j` and
    /// relative velocity `v = V_i - V_j`.
    pub fn from_relative(xi: &Vec2, v: &Vec2, p: &BarrierParams) -> Result<Self> {
        if xi.x == 0.0 && xi.y == 0.0 {
            return Err(Error::DegenerateGeometry { i: 0, j: 1 });
        }
        let h = xi.dot(xi) - p.r * p.r;
        let xv = xi.dot(v);
        Ok(Self {
            h,
            hdot: 2.0 * xv,
            a: 2.0 * v.dot(v) + 2.0 * p.l1 * xv + p.l0 * h,
            b: 2.0 * xi,
        })
    }

    /// Constraint value `a + b·(u_i - u_j)`.
    pub fn residual(&self, ui: &Vec2, uj: &Vec2) -> f64 {
        self.a + self.b.dot(&(ui - uj))
    }
}

pub fn pair_barrier(xi: &AgentState, xj: &AgentState, p: &BarrierParams) -> Result<BarrierTerms> {
    BarrierTerms::from_relative(&(xi.position - xj.position), &(xi.velocity - xj.velocity), p)
}

/// [`pair_barrier`] for agents `i` and `j` of a snapshot, reporting the pair
/// indices on degenerate geometry.
pub fn pair_barrier_at(
    states: &[AgentState],
    i: usize,
    j: usize,
    p: &BarrierParams,
) -> Result<BarrierTerms> {
    pair_barrier(&states[i], &states[j], p).map_err(|e| match e {
        Error::DegenerateGeometry { .. } => Error::DegenerateGeometry { i, j },
        e => e,
    })
}

/// Half-space `coeffs · u + offset >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    pub coeffs: DVector<f64>,
    pub offset: f64,
}

impl ConstraintRow {
    pub fn new(coeffs: DVector<f64>, offset: f64) -> Self {
        Self { coeffs, offset }
    }

    pub fn value(&self, u: &DVector<f64>) -> f64 {
        self.coeffs.dot(u) + self.offset
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }
}

/// Pair constraint over `n_slots` stacked 2-vectors: `+b` in slot `i`,
/// `-b` in slot `j`, offset `a`.
pub fn pair_row(terms: &BarrierTerms, i: usize, j: usize, n_slots: usize) -> ConstraintRow {
    let mut coeffs = DVector::zeros(2 * n_slots);
    coeffs[2 * i] = terms.b.x;
    coeffs[2 * i + 1] = terms.b.y;
    coeffs[2 * j] = -terms.b.x;
    coeffs[2 * j + 1] = -terms.b.y;
    ConstraintRow::new(coeffs, terms.a)
}

/// Disturbance information entering a robust barrier row.
#[derive(Debug, Clone, PartialEq)]
pub enum Disturbance {
    /// Unknown disturbance with `‖w‖ <= bound`.
    WorstCase(f64),
    /// Known or estimated disturbance.
    Known(DVector<f64>),
}

impl Disturbance {
    /// Contribution `‑‖l‖ w̄` or `l·ŵ` of the disturbance channel `l`.
    fn term(&self, channel: &DVector<f64>) -> f64 {
        match self {
            Disturbance::WorstCase(bound) => -channel.norm() * bound,
            Disturbance::Known(w) => channel.dot(w),
        }
    }
}

/// Relative-degree-one robust barrier row with linear class-K term
/// `alpha_gain · h`:
/// `L_f h + {‑‖L_p h‖ w̄ | L_p h ŵ} + L_g h u + alpha_gain h >= 0`.
pub fn rcbf_row_rel1(
    lfh: f64,
    lgh: &DVector<f64>,
    lph: &DVector<f64>,
    h: f64,
    alpha_gain: f64,
    dist: &Disturbance,
) -> ConstraintRow {
    ConstraintRow::new(lgh.clone(), lfh + dist.term(lph) + alpha_gain * h)
}

/// Relative-degree-two robust barrier row:
/// `L_f² h + {‑‖L_p L_f h‖ w̄ | L_p L_f h ŵ} + L_g L_f h u + l1 L_f h + l0 h >= 0`.
#[allow(clippy::too_many_arguments)]
pub fn rcbf_row_rel2(
    lf2h: f64,
    lglfh: &DVector<f64>,
    lplfh: &DVector<f64>,
    lfh: f64,
    h: f64,
    l0: f64,
    l1: f64,
    dist: &Disturbance,
) -> ConstraintRow {
    ConstraintRow::new(lglfh.clone(), lf2h + dist.term(lplfh) + l1 * lfh + l0 * h)
}

/// Membership in `C* = {h >= 0, h >= ḣ / λ1}`, written as `ḣ - λ1 h >= 0`
/// so that no division by the negative root is needed.
pub fn in_reduced_admissible_set(t: &BarrierTerms, p: &BarrierParams) -> bool {
    t.h >= 0.0 && t.hdot - p.lambda1 * t.h >= 0.0
}
