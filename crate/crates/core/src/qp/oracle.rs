// Exhaustive reference solver for small problems.
//
// Every subset of rows is tried as an equality-constrained active set; the
// feasible stationary point with nonnegative multipliers is the optimum.
// When none exists, infeasibility is confirmed by enumerating basic
// solutions of { y >= 0, yᵀG = 0, Σy = 1 } and keeping the one with the
// most negative yᵀd.

use nalgebra::{DMatrix, DVector};

use super::{FarkasCertificate, QpOptimum, QpProblem, QpSolution};
use crate::error::{Error, Result};

pub const ORACLE_MAX_ROWS: usize = 12;

fn subset(mask: usize, m: usize) -> Vec<usize> {
    (0..m).filter(|k| mask & (1 << k) != 0).collect()
}

/// Solves `A x = rhs` when `A` has full column rank and the system is
/// consistent; `None` otherwise.
fn exact_solve(a: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 || svd.singular_values.min() <= 1e-10 * smax {
        return None;
    }
    let x = svd.solve(rhs, 0.0).ok()?;
    let resid = (a * &x - rhs).amax();
    (resid <= 1e-9 * (1.0 + rhs.amax())).then_some(x)
}

pub fn brute_force_oracle(p: &QpProblem, tol: f64) -> Result<QpSolution> {
    p.check()?;
    let m = p.rows.len();
    if m > ORACLE_MAX_ROWS {
        return Err(Error::TooManyRows {
            max: ORACLE_MAX_ROWS,
            got: m,
        });
    }
    let n = p.dim();
    let slack_tol = |k: usize| 1e3 * tol * p.rows[k].coeffs.norm().max(1.0);

    let mut best: Option<(f64, QpOptimum)> = None;
    for mask in 0..(1usize << m) {
        let set = subset(mask, m);
        if set.len() > n {
            continue;
        }
        let (x, lambda) = if set.is_empty() {
            (p.u_ref.clone(), DVector::zeros(0))
        } else {
            // x = u_ref + N λ with N^T x + d_S = 0
            let normals = DMatrix::from_fn(n, set.len(), |i, k| p.rows[set[k]].coeffs[i]);
            let gram = normals.transpose() * &normals;
            let d = DVector::from_iterator(set.len(), set.iter().map(|&k| p.rows[k].offset));
            let rhs = -(normals.transpose() * &p.u_ref + d);
            let Some(lambda) = exact_solve(&gram, &rhs) else {
                continue;
            };
            (&p.u_ref + &normals * &lambda, lambda)
        };
        let scale = 1.0 + lambda.amax();
        if lambda.iter().any(|&l| l < -1e3 * tol * scale) {
            continue;
        }
        if (0..m).any(|k| p.rows[k].value(&x) < -slack_tol(k)) {
            continue;
        }
        let f = p.objective(&x);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((
                f,
                QpOptimum {
                    u_star: x,
                    active_set: set,
                    multipliers: lambda.iter().map(|l| 2.0 * l.max(0.0)).collect(),
                },
            ));
        }
    }
    if let Some((_, opt)) = best {
        return Ok(QpSolution::Optimal(opt));
    }

    let mut cert: Option<(f64, DVector<f64>)> = None;
    for mask in 1..(1usize << m) {
        let set = subset(mask, m);
        if set.len() > n + 1 {
            continue;
        }
        let a = DMatrix::from_fn(n + 1, set.len(), |i, k| {
            if i < n {
                p.rows[set[k]].coeffs[i]
            } else {
                1.0
            }
        });
        let mut rhs = DVector::zeros(n + 1);
        rhs[n] = 1.0;
        let Some(ys) = exact_solve(&a, &rhs) else {
            continue;
        };
        if ys.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let mut y = DVector::zeros(m);
        for (k, &v) in set.iter().zip(ys.iter()) {
            y[*k] = v.max(0.0);
        }
        let yd: f64 = set.iter().map(|&k| y[k] * p.rows[k].offset).sum();
        if yd < 0.0 && cert.as_ref().is_none_or(|(bd, _)| yd < *bd) {
            cert = Some((yd, y));
        }
    }
    match cert {
        Some((_, y)) => Ok(QpSolution::Infeasible(FarkasCertificate { y })),
        None => Err(Error::OracleInconclusive),
    }
}
