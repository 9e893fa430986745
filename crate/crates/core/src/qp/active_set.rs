// Dual active-set method specialised to the identity Hessian.
//
// Starts from the unconstrained minimiser u_ref and repeatedly adds the most
// violated row (distance to its half-space, lowest index on ties). Rows whose
// multipliers would turn negative are dropped on the way. Failure to add a
// row while no active multiplier can absorb the step yields a Farkas
// certificate directly from the dual step direction.

use nalgebra::{DMatrix, DVector};

use super::{FarkasCertificate, QpOptimum, QpProblem, QpSolution};
use crate::error::{Error, Result};

/// Relative size of the primal step direction below which the entering
/// normal is treated as lying in the span of the working set.
const DEPENDENCE_TOL: f64 = 1e-10;

struct WorkingSet {
    rows: Vec<usize>,
    // multipliers for the ½‖u - u_ref‖² objective
    lambda: Vec<f64>,
}

impl WorkingSet {
    fn drop(&mut self, pos: usize) {
        self.rows.remove(pos);
        self.lambda.remove(pos);
    }
}

/// Returns `(z, r)`: the component of `n_p` orthogonal to the working-set
/// normals and the coefficients of its projection onto them.
fn step_directions(
    p: &QpProblem,
    ws: &WorkingSet,
    n_p: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let q = ws.rows.len();
    if q == 0 {
        return Ok((n_p.clone(), DVector::zeros(0)));
    }
    let n = p.dim();
    let normals = DMatrix::from_fn(n, q, |i, k| p.rows[ws.rows[k]].coeffs[i]);
    let gram = normals.transpose() * &normals;
    let chol = gram
        .cholesky()
        .ok_or(Error::NumericalDegeneracy { size: q })?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    if lo.is_nan() || lo <= 1e-7 * hi {
        return Err(Error::NumericalDegeneracy { size: q });
    }
    let r = chol.solve(&(normals.transpose() * n_p));
    let z = n_p - &normals * &r;
    Ok((z, r))
}

/// Position in the working set of the row that blocks a dual step, with the
/// step length `λ_k / r_k`. Ties go to the lowest row index.
fn dual_block(ws: &WorkingSet, r: &DVector<f64>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (pos, (&lam, &rk)) in ws.lambda.iter().zip(r.iter()).enumerate() {
        if rk > 0.0 {
            let t = lam / rk;
            let better = match best {
                None => true,
                Some((bp, bt)) => t < bt || (t == bt && ws.rows[pos] < ws.rows[bp]),
            };
            if better {
                best = Some((pos, t));
            }
        }
    }
    best
}

fn certificate(m: usize, ws: &WorkingSet, entering: usize, r: &DVector<f64>) -> FarkasCertificate {
    let mut y = DVector::zeros(m);
    y[entering] = 1.0;
    for (pos, &k) in ws.rows.iter().enumerate() {
        y[k] = (-r[pos]).max(0.0);
    }
    let total = y.sum();
    FarkasCertificate { y: y / total }
}

/// Solves the least-distance QP. Deterministic for identical inputs.
pub fn solve(p: &QpProblem, tol: f64) -> Result<QpSolution> {
    p.check()?;
    let m = p.rows.len();

    for (k, row) in p.rows.iter().enumerate() {
        if row.coeffs.iter().all(|&c| c == 0.0) && row.offset < 0.0 {
            let mut y = DVector::zeros(m);
            y[k] = 1.0;
            return Ok(QpSolution::Infeasible(FarkasCertificate { y }));
        }
    }
    let norms: Vec<f64> = p.rows.iter().map(|r| r.coeffs.norm()).collect();

    let mut x = p.u_ref.clone();
    let mut ws = WorkingSet {
        rows: Vec::new(),
        lambda: Vec::new(),
    };
    let max_iter = 50 * (m + 1) * (m + 1);
    let mut iter = 0;

    loop {
        // most violated row, measured as distance to its half-space
        let mut entering: Option<(usize, f64)> = None;
        for (k, row) in p.rows.iter().enumerate() {
            if norms[k] == 0.0 || ws.rows.contains(&k) {
                continue;
            }
            let s = row.value(&x);
            if s < -tol * norms[k].max(1.0) {
                let dist = s / norms[k];
                if entering.is_none_or(|(_, d)| dist < d) {
                    entering = Some((k, dist));
                }
            }
        }
        let Some((pk, _)) = entering else { break };
        let n_p = &p.rows[pk].coeffs;
        let mut lambda_p = 0.0;

        loop {
            iter += 1;
            if iter > max_iter {
                return Err(Error::NumericalDegeneracy { size: ws.rows.len() });
            }
            let (z, r) = step_directions(p, &ws, n_p)?;
            let block = dual_block(&ws, &r);

            if z.norm() <= DEPENDENCE_TOL * norms[pk] {
                let Some((pos, t)) = block else {
                    return Ok(QpSolution::Infeasible(certificate(m, &ws, pk, &r)));
                };
                for (lam, rk) in ws.lambda.iter_mut().zip(r.iter()) {
                    *lam -= t * rk;
                }
                lambda_p += t;
                ws.drop(pos);
                continue;
            }

            let s_p = p.rows[pk].value(&x);
            let full = -s_p / z.dot(n_p);
            let t = match block {
                Some((_, t1)) if t1 < full => t1,
                _ => full,
            };
            x += &z * t;
            for (lam, rk) in ws.lambda.iter_mut().zip(r.iter()) {
                *lam -= t * rk;
            }
            lambda_p += t;

            match block {
                Some((pos, t1)) if t1 < full => ws.drop(pos),
                _ => {
                    ws.rows.push(pk);
                    ws.lambda.push(lambda_p);
                    break;
                }
            }
        }
    }

    let mut pairs: Vec<(usize, f64)> = ws
        .rows
        .iter()
        .zip(&ws.lambda)
        .map(|(&k, &l)| (k, 2.0 * l.max(0.0)))
        .collect();
    pairs.sort_by_key(|&(k, _)| k);
    Ok(QpSolution::Optimal(QpOptimum {
        u_star: x,
        active_set: pairs.iter().map(|&(k, _)| k).collect(),
        multipliers: pairs.iter().map(|&(_, mu)| mu).collect(),
    }))
}
