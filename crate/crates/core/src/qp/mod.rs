//! Least-distance quadratic programs
//!
//! ```text
//! min ‖u - u_ref‖²   s.t.   coeffs_k · u + offset_k >= 0
//! ```
//!
//! [`solve`] is a dual active-set method; [`brute_force_oracle`] enumerates
//! active sets and is kept as an independent check for small problems.

mod active_set;
mod oracle;

use nalgebra::DVector;

pub use active_set::solve;
pub use oracle::{brute_force_oracle, ORACLE_MAX_ROWS};

use crate::barrier::ConstraintRow;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    pub u_ref: DVector<f64>,
    pub rows: Vec<ConstraintRow>,
}

impl QpProblem {
    pub fn new(u_ref: DVector<f64>, rows: Vec<ConstraintRow>) -> Self {
        Self { u_ref, rows }
    }

    pub fn dim(&self) -> usize {
        self.u_ref.len()
    }

    pub(crate) fn check(&self) -> Result<()> {
        let n = self.dim();
        if !self.u_ref.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("u_ref"));
        }
        for row in &self.rows {
            if row.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.dim(),
                });
            }
            if !row.offset.is_finite() || !row.coeffs.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite("constraint row"));
            }
        }
        Ok(())
    }

    pub fn objective(&self, u: &DVector<f64>) -> f64 {
        (u - &self.u_ref).norm_squared()
    }
}

/// Optimal point with its active rows and multipliers.
///
/// Multipliers follow `2 (u* - u_ref) = Σ μ_k coeffs_k`, one per entry of
/// `active_set` (sorted by row index).
#[derive(Debug, Clone, PartialEq)]
pub struct QpOptimum {
    pub u_star: DVector<f64>,
    pub active_set: Vec<usize>,
    pub multipliers: Vec<f64>,
}

/// Nonnegative row weights `y` with `yᵀG = 0` and `yᵀd < 0`, normalised so
/// that `Σ y = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub y: DVector<f64>,
}

impl FarkasCertificate {
    /// Returns `(‖yᵀG‖, yᵀd)`.
    pub fn residuals(&self, p: &QpProblem) -> (f64, f64) {
        let mut combo = DVector::zeros(p.dim());
        let mut offset = 0.0;
        for (yk, row) in self.y.iter().zip(&p.rows) {
            combo += &row.coeffs * *yk;
            offset += yk * row.offset;
        }
        (combo.norm(), offset)
    }

    pub fn verify(&self, p: &QpProblem, tol: f64) -> bool {
        if self.y.len() != p.rows.len() || self.y.iter().any(|&v| v < 0.0) {
            return false;
        }
        let scale = p.rows.iter().map(|r| r.coeffs.norm()).fold(1.0, f64::max);
        let (g, d) = self.residuals(p);
        g <= tol.sqrt() * scale && d < 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QpSolution {
    Optimal(QpOptimum),
    Infeasible(FarkasCertificate),
}

impl QpSolution {
    pub fn is_optimal(&self) -> bool {
        matches!(self, QpSolution::Optimal(_))
    }

    pub fn optimum(&self) -> Option<&QpOptimum> {
        match self {
            QpSolution::Optimal(o) => Some(o),
            QpSolution::Infeasible(_) => None,
        }
    }

    pub fn into_result(self) -> Result<QpOptimum> {
        match self {
            QpSolution::Optimal(o) => Ok(o),
            QpSolution::Infeasible(c) => Err(Error::Infeasible(c)),
        }
    }
}

/// Largest violation of the KKT conditions at `opt`, scaled by the problem
/// magnitude: primal feasibility, stationarity, dual sign and complementary
/// slackness.
pub fn kkt_residual(p: &QpProblem, opt: &QpOptimum) -> f64 {
    let mut worst: f64 = 0.0;
    for row in &p.rows {
        worst = worst.max(-row.value(&opt.u_star) / row.coeffs.norm().max(1.0));
    }
    let mut grad = (&opt.u_star - &p.u_ref) * 2.0;
    for (&k, &mu) in opt.active_set.iter().zip(&opt.multipliers) {
        worst = worst.max(-mu);
        grad -= &p.rows[k].coeffs * mu;
        let slack = p.rows[k].value(&opt.u_star);
        worst = worst.max((mu * slack).abs() / (1.0 + mu.abs()));
    }
    let scale = 1.0 + opt.u_star.amax() + p.u_ref.amax();
    worst.max(grad.amax() / scale)
}

/// Projection of `u_ref` onto the half-space of a single row:
/// `u* = u_ref - min(0, μ) cᵀ / (c cᵀ)` with `μ = c · u_ref + offset`.
pub fn solve_single_row_closed_form(u_ref: &DVector<f64>, row: &ConstraintRow) -> Result<DVector<f64>> {
    if row.dim() != u_ref.len() {
        return Err(Error::DimensionMismatch {
            expected: u_ref.len(),
            got: row.dim(),
        });
    }
    let cc = row.coeffs.norm_squared();
    if cc == 0.0 {
        return Err(Error::ZeroCoefficients);
    }
    let mu = row.value(u_ref);
    Ok(u_ref - &row.coeffs * (mu.min(0.0) / cc))
}
