//! Dense phase-one simplex for `A x = b, x >= 0`.
//!
//! Only feasibility is needed here, so there is no phase two. Pivoting
//! follows Bland's rule (smallest eligible index for both the entering and
//! the leaving variable), which rules out cycling.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOne {
    /// A nonnegative point with `A x` closest to `b` in the sense of the
    /// phase-one objective.
    pub x: Vec<f64>,
    /// Optimal sum of artificial variables; zero iff the system is feasible.
    pub infeasibility: f64,
    pub pivots: usize,
}

impl PhaseOne {
    pub fn feasible(&self, tol: f64) -> bool {
        self.infeasibility <= tol
    }
}

/// Minimizes the total artificial slack of `A x + s = b` over `x, s >= 0`
/// (rows of `b < 0` are negated first). `a` is given row-major as `rows`.
pub fn phase_one(rows: &[Vec<f64>], b: &[f64]) -> Result<PhaseOne> {
    let m = rows.len();
    if m != b.len() {
        return Err(Error::Input(format!(
            "{m} constraint rows but {} right-hand sides",
            b.len()
        )));
    }
    let nvar = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != nvar) {
        return Err(Error::Input("ragged constraint matrix".into()));
    }
    let width = nvar + m + 1;
    let rhs = width - 1;

    // Tableau rows: [A | I | b] with b >= 0.
    let mut t: Vec<Vec<f64>> = rows
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, &bi))| {
            let sign = if bi < 0.0 { -1.0 } else { 1.0 };
            let mut r = vec![0.0; width];
            for (dst, v) in r.iter_mut().zip(row) {
                *dst = sign * v;
            }
            r[nvar + i] = 1.0;
            r[rhs] = sign * bi;
            r
        })
        .collect();
    let mut basis: Vec<usize> = (nvar..nvar + m).collect();

    // Reduced costs of the phase-one objective (minimize sum of artificials).
    let mut cost = vec![0.0; width];
    for r in &t {
        for j in 0..nvar {
            cost[j] -= r[j];
        }
        cost[rhs] -= r[rhs];
    }

    let mut pivots = 0;
    while let Some(enter) = (0..nvar + m).find(|&j| cost[j] < -PIVOT_EPS) {
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for (i, r) in t.iter().enumerate() {
            if r[enter] > PIVOT_EPS {
                let ratio = r[rhs] / r[enter];
                let better = ratio < best_ratio - PIVOT_EPS
                    || (ratio <= best_ratio + PIVOT_EPS && leave.is_some_and(|l| basis[i] < basis[l]));
                if leave.is_none() || better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            // Unbounded direction in a phase-one problem cannot occur; the
            // objective is bounded below by zero.
            break;
        };

        let p = t[leave][enter];
        t[leave].iter_mut().for_each(|v| *v /= p);
        let pivot_row = t[leave].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != leave && r[enter] != 0.0 {
                let f = r[enter];
                r.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
            }
        }
        let f = cost[enter];
        cost.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
        basis[leave] = enter;

        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::Resource(format!("simplex exceeded {MAX_PIVOTS} pivots")));
        }
    }

    let mut x = vec![0.0; nvar];
    let mut infeasibility = 0.0;
    for (i, &bv) in basis.iter().enumerate() {
        let v = t[i][rhs].max(0.0);
        if bv < nvar {
            x[bv] = v;
        } else {
            infeasibility += v;
        }
    }
    Ok(PhaseOne {
        x,
        infeasibility,
        pivots,
    })
}
