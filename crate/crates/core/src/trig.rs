//! The entrywise maps `f(x) = (2/pi) arcsin x`, its inverse
//! `f^-1(y) = sin(pi y / 2)` and `f_lambda(x) = sin(lambda arcsin x)`,
//! together with the TA membership oracle and the scans built on it.
//!
//! TA is the image of the elliptope under `f`. Membership of a unit-diagonal
//! matrix `Y` reduces to a PSD test on `f^-1(Y)`.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use rayon::prelude::*;

use crate::error::{input, Error, Result};
use crate::matrix::{psd_check, ElliptopePoint, SymMatrix, UNIT_SLACK};
use crate::report::CertificateReport;

/// Number of points in the default lambda grid.
pub const DEFAULT_GRID: usize = 101;

#[inline]
pub fn f(x: f64) -> f64 {
    match x {
        v if v == 1.0 || v == -1.0 || v == 0.0 => v,
        v => FRAC_2_PI * v.asin(),
    }
}

#[inline]
pub fn f_inv(y: f64) -> f64 {
    match y {
        v if v == 1.0 || v == -1.0 || v == 0.0 => v,
        v => (FRAC_PI_2 * v).sin(),
    }
}

#[inline]
pub fn f_lambda(x: f64, lambda: f64) -> f64 {
    (lambda * x.asin()).sin()
}

/// `f_lambda(1) = sin(pi lambda / 2)`, the value `f_lambda` would put on a
/// unit diagonal.
#[inline]
pub fn diagonal_value(lambda: f64) -> f64 {
    (FRAC_PI_2 * lambda).sin()
}

/// Uniform grid on `[0, 1]` with both endpoints exact.
pub fn uniform_grid(size: usize) -> Result<Vec<f64>> {
    if size < 2 {
        return input(format!("grid needs at least 2 points, got {size}"));
    }
    let last = (size - 1) as f64;
    Ok((0..size).map(|k| k as f64 / last).collect())
}

fn clamp_unit(v: f64, i: usize, j: usize) -> Result<f64> {
    if v.abs() > 1.0 + UNIT_SLACK {
        return input(format!("entry ({i}, {j}) = {v} lies outside [-1, 1]"));
    }
    Ok(v.clamp(-1.0, 1.0))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return input(format!("lambda must lie in [0, 1], got {lambda}"));
    }
    Ok(())
}

/// Applies `f` to every entry. Entries at `+-1` (and hence a unit diagonal)
/// map to themselves exactly.
pub fn f_entrywise(m: &SymMatrix) -> Result<SymMatrix> {
    check_unit_range(m)?;
    m.map_entries(|_, _, v| f(v.clamp(-1.0, 1.0)))
}

/// Applies `f^-1` to every entry, with the same fixed points as [`f_entrywise`].
pub fn f_inverse_entrywise(m: &SymMatrix) -> Result<SymMatrix> {
    check_unit_range(m)?;
    m.map_entries(|_, _, v| f_inv(v.clamp(-1.0, 1.0)))
}

/// Applies `f_lambda` to every entry, diagonal included. A unit diagonal
/// becomes `sin(pi lambda / 2)`; callers that need the TA diagonal must
/// add the correction themselves.
pub fn f_lambda_entrywise(m: &SymMatrix, lambda: f64) -> Result<SymMatrix> {
    check_lambda(lambda)?;
    check_unit_range(m)?;
    m.map_entries(|_, _, v| f_lambda(v.clamp(-1.0, 1.0), lambda))
}

fn check_unit_range(m: &SymMatrix) -> Result<()> {
    for i in 0..m.n() {
        for j in i..m.n() {
            clamp_unit(m.get(i, j), i, j)?;
        }
    }
    Ok(())
}

/// A unit-diagonal matrix with entries in `[-1, 1]`, the candidate shape for TA.
#[derive(Debug, Clone, PartialEq)]
pub struct TaCandidate {
    matrix: SymMatrix,
    clamped: usize,
}

impl TaCandidate {
    /// Accepts diagonal entries within `1e-12` of 1 (pinned to 1) and
    /// off-diagonal entries within `1e-12` of `[-1, 1]` (clamped, counted).
    pub fn new(m: SymMatrix) -> Result<Self> {
        for i in 0..m.n() {
            let d = m.get(i, i);
            if (d - 1.0).abs() > UNIT_SLACK {
                return input(format!("diagonal entry ({i}, {i}) = {d} is not 1"));
            }
        }
        check_unit_range(&m)?;
        let mut clamped = 0;
        let matrix = m.map_entries(|i, j, v| {
            if i == j {
                1.0
            } else {
                if v.abs() > 1.0 {
                    clamped += 1;
                }
                v.clamp(-1.0, 1.0)
            }
        })?;
        Ok(Self { matrix, clamped })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: SymMatrix::identity(n),
            clamped: 0,
        }
    }

    /// `f(X)` for `X` in the elliptope; always a member of TA.
    pub fn from_elliptope(x: &ElliptopePoint) -> Self {
        Self {
            matrix: f_entrywise(x.matrix()).expect("elliptope entries lie in [-1, 1]"),
            clamped: 0,
        }
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    /// Number of off-diagonal entries (upper triangle) clamped into `[-1, 1]`.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// `lambda Y + (1 - lambda) I` with the diagonal pinned to 1.
    pub fn toward_identity(&self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let matrix = self
            .matrix
            .map_entries(|i, j, v| if i == j { 1.0 } else { (lambda * v).clamp(-1.0, 1.0) })?;
        Ok(Self { matrix, clamped: 0 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVerdict {
    pub in_ta: bool,
    pub preimage_min_eigenvalue: f64,
    /// `f^-1` of the candidate; unit diagonal.
    pub preimage: SymMatrix,
}

/// Decides `c in TA` by testing `f^-1(c)` for positive semidefiniteness.
pub fn ta_membership(c: &TaCandidate, tol: f64) -> Result<MembershipVerdict> {
    let preimage = f_inverse_entrywise(c.matrix())?;
    let verdict = psd_check(&preimage, tol)?;
    Ok(MembershipVerdict {
        in_ta: verdict.is_psd,
        preimage_min_eigenvalue: verdict.min_eigenvalue,
        preimage,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayScanReport {
    pub lambda_grid: Vec<f64>,
    pub verdicts: Vec<MembershipVerdict>,
    pub all_pass: bool,
    pub central_point: SymMatrix,
}

impl RayScanReport {
    pub fn min_eigenvalue(&self) -> f64 {
        self.verdicts
            .iter()
            .map(|v| v.preimage_min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }

    /// Appends one point per lambda to `report`.
    pub fn record_into(&self, report: &mut CertificateReport, label: &str) {
        for (lambda, v) in self.lambda_grid.iter().zip(&self.verdicts) {
            report.push_point(label, *lambda, v.preimage_min_eigenvalue, v.in_ta);
        }
    }
}

/// Walks the segment from `c` to the identity on a uniform `grid_size`-point
/// lambda grid and tests every point for TA membership.
pub fn starlike_ray_scan(c: &TaCandidate, grid_size: usize, tol: f64) -> Result<RayScanReport> {
    let lambda_grid = uniform_grid(grid_size)?;
    let start = ta_membership(c, tol)?;
    if !start.in_ta {
        return Err(Error::NotInTa {
            min_eigenvalue: start.preimage_min_eigenvalue,
        });
    }
    let verdicts = lambda_grid
        .par_iter()
        .map(|&lambda| ta_membership(&c.toward_identity(lambda)?, tol))
        .collect::<Result<Vec<_>>>()?;
    let all_pass = verdicts.iter().all(|v| v.in_ta);
    Ok(RayScanReport {
        lambda_grid,
        verdicts,
        all_pass,
        central_point: SymMatrix::identity(c.n()),
    })
}

/// Tests `f_lambda(X) >= 0` for every lambda in `lambda_grid`; the report
/// carries one point per lambda with the minimum eigenvalue as its value.
pub fn lemma_pospres_scan(x: &ElliptopePoint, lambda_grid: &[f64], tol: f64) -> Result<CertificateReport> {
    lambda_grid.iter().try_for_each(|&l| check_lambda(l))?;
    let mut report = CertificateReport::new("lemma");
    report.grid = lambda_grid.to_vec();
    let verdicts = lambda_grid
        .par_iter()
        .map(|&l| psd_check(&f_lambda_entrywise(x.matrix(), l)?, tol))
        .collect::<Result<Vec<_>>>()?;
    for (l, v) in lambda_grid.iter().zip(verdicts) {
        report.push_point("x", *l, v.min_eigenvalue, v.is_psd);
    }
    Ok(report)
}

/// The preimage `f^-1(lambda f(X) + (1 - lambda) I)` of a point on the ray
/// from `f(X)` to the identity.
pub fn ray_preimage(x: &ElliptopePoint, lambda: f64) -> Result<SymMatrix> {
    let c = TaCandidate::from_elliptope(x).toward_identity(lambda)?;
    f_inverse_entrywise(c.matrix())
}

/// `f_lambda(X) + (1 - sin(pi lambda / 2)) I`, the same matrix written as an
/// entrywise map plus a diagonal shift.
pub fn shifted_f_lambda(x: &ElliptopePoint, lambda: f64) -> Result<SymMatrix> {
    let shift = 1.0 - diagonal_value(lambda);
    let m = f_lambda_entrywise(x.matrix(), lambda)?;
    m.map_entries(|i, j, v| if i == j { v + shift } else { v })
}

/// Largest entrywise gap between [`ray_preimage`] and [`shifted_f_lambda`].
pub fn decomposition_gap(x: &ElliptopePoint, lambda: f64) -> Result<f64> {
    Ok(ray_preimage(x, lambda)?.max_abs_diff(&shifted_f_lambda(x, lambda)?))
}
