//! Taylor coefficients of `f_lambda(x) = sin(lambda arcsin x)`.
//!
//! `f_lambda` solves `(1 - x^2) y'' - x y' + lambda^2 y = 0` on `(-1, 1)`,
//! which gives the two-step recurrence
//!
//! ```text
//! a_{n+2} = (n^2 - lambda^2) / ((n + 2)(n + 1)) * a_n,   a_0 = 0, a_1 = lambda.
//! ```
//!
//! For `lambda` in `[0, 1]` every factor is nonnegative, so all coefficients
//! are nonnegative and `f_lambda` is positivity preserving entrywise.

use rayon::prelude::*;

use crate::error::{input, Error, Result};
use crate::report::CertificateReport;
use crate::trig;

pub const MAX_ORDER_LIMIT: usize = 1_000_000;
pub const DEFAULT_MAX_ORDER: usize = 400;
pub const DEFAULT_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    lambda: f64,
    coeffs: Vec<f64>,
}

/// The multiplier `(n^2 - lambda^2) / ((n + 2)(n + 1))` taking `a_n` to `a_{n+2}`.
#[inline]
pub fn step_factor(n: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    (nf * nf - lambda * lambda) / ((nf + 2.0) * (nf + 1.0))
}

/// Runs the recurrence up to `a_{max_order}`.
pub fn taylor_coeffs(lambda: f64, max_order: usize) -> Result<CoefficientTable> {
    if !lambda.is_finite() {
        return input(format!("lambda must be finite, got {lambda}"));
    }
    if max_order < 1 {
        return input("max_order must be at least 1");
    }
    if max_order > MAX_ORDER_LIMIT {
        return Err(Error::Resource(format!(
            "max_order {max_order} exceeds the limit of {MAX_ORDER_LIMIT}"
        )));
    }
    let mut coeffs = vec![0.0; max_order + 1];
    coeffs[1] = lambda;
    for n in 1..max_order.saturating_sub(1) {
        // Even indices stay at +0.0: a_0 = 0 propagates.
        if n % 2 == 1 {
            coeffs[n + 2] = step_factor(n, lambda) * coeffs[n];
        }
    }
    Ok(CoefficientTable { lambda, coeffs })
}

impl CoefficientTable {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn max_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, n: usize) -> f64 {
        self.coeffs[n]
    }

    /// Smallest coefficient and its index (first occurrence).
    pub fn min_coefficient(&self) -> (usize, f64) {
        self.coeffs.iter().copied().enumerate().fold(
            (0, f64::INFINITY),
            |best, (i, v)| if v < best.1 { (i, v) } else { best },
        )
    }
}

/// Partial sum `sum_n a_n x^n` by Horner's rule; requires `|x| <= 1 - 0.05`.
pub fn series_eval(t: &CoefficientTable, x: f64) -> Result<f64> {
    series_eval_with_margin(t, x, DEFAULT_MARGIN)
}

pub fn series_eval_with_margin(t: &CoefficientTable, x: f64, margin: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&margin) {
        return input(format!("margin must lie in [0, 1), got {margin}"));
    }
    if x.is_nan() || x.abs() > 1.0 - margin {
        return input(format!("|x| = {} exceeds 1 - margin = {}", x.abs(), 1.0 - margin));
    }
    Ok(t.coeffs.iter().rev().fold(0.0, |acc, a| acc * x + a))
}

/// Checks `a_n(lambda) >= 0` for every `lambda` in the grid and every
/// `n <= max_order`, using exact float comparison. One report point per
/// lambda carries the smallest coefficient.
pub fn nonnegativity_certificate(lambda_grid: &[f64], max_order: usize) -> Result<CertificateReport> {
    if let Some(bad) = lambda_grid.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return input(format!("lambda must lie in [0, 1], got {bad}"));
    }
    let tables = lambda_grid
        .par_iter()
        .map(|&l| taylor_coeffs(l, max_order))
        .collect::<Result<Vec<_>>>()?;
    let mut report = CertificateReport::new("coeffs-nonneg");
    report.grid = lambda_grid.to_vec();
    for t in &tables {
        let (idx, min) = t.min_coefficient();
        report.push_point(format!("n={idx}"), t.lambda, min, min >= 0.0);
    }
    report.note("max_order", max_order);
    report.note_f64("min_coefficient", report.min_value().unwrap_or(0.0));
    Ok(report)
}

/// For odd `m`, `f_m` is a polynomial of degree `m` (Chebyshev-like), so
/// `a_n(m)` vanishes for every `n > m`. Also checks `a_n(0) = 0` for all `n`.
pub fn root_structure_check(odd_m: u32, max_order: usize) -> Result<CertificateReport> {
    if odd_m.is_multiple_of(2) {
        return input(format!("m must be an odd positive integer, got {odd_m}"));
    }
    let m = odd_m as usize;
    let mut report = CertificateReport::new("coeffs-roots");
    report.grid = vec![0.0, f64::from(odd_m)];

    let at_m = taylor_coeffs(f64::from(odd_m), max_order)?;
    for (n, &a) in at_m.coeffs().iter().enumerate().skip(m + 1) {
        if a != 0.0 {
            report.push_point(format!("n={n}"), f64::from(odd_m), a, false);
        }
    }
    let tail_max = at_m.coeffs().iter().skip(m + 1).fold(0.0f64, |acc, a| acc.max(a.abs()));
    report.push_point(format!("tail>{m}"), f64::from(odd_m), tail_max, tail_max == 0.0);

    let at_zero = taylor_coeffs(0.0, max_order)?;
    let zero_max = at_zero.coeffs().iter().fold(0.0f64, |acc, a| acc.max(a.abs()));
    report.push_point("all", 0.0, zero_max, zero_max == 0.0);

    let poly: Vec<String> = at_m.coeffs()[..=m.min(max_order)]
        .iter()
        .map(|v| v.to_string())
        .collect();
    report.note("polynomial", poly.join(" "));
    Ok(report)
}

/// Closed forms used to check the differential equation behind the recurrence.
pub mod closed_form {
    /// `f_lambda(x)`.
    pub fn value(x: f64, lambda: f64) -> f64 {
        super::trig::f_lambda(x, lambda)
    }

    /// `f_lambda'(x) = lambda cos(lambda arcsin x) / sqrt(1 - x^2)`.
    pub fn first_derivative(x: f64, lambda: f64) -> f64 {
        lambda * (lambda * x.asin()).cos() / (1.0 - x * x).sqrt()
    }

    /// `f_lambda''(x) = x/(1-x^2) * lambda cos(lambda arcsin x)/sqrt(1-x^2)
    ///                 - lambda^2/(1-x^2) * sin(lambda arcsin x)`.
    pub fn second_derivative(x: f64, lambda: f64) -> f64 {
        let s = 1.0 - x * x;
        let t = lambda * x.asin();
        x / s * lambda * t.cos() / s.sqrt() - lambda * lambda / s * t.sin()
    }

    /// `(1 - x^2) f'' - x f' + lambda^2 f`.
    pub fn ode_residual(x: f64, lambda: f64) -> f64 {
        (1.0 - x * x) * second_derivative(x, lambda) - x * first_derivative(x, lambda)
            + lambda * lambda * value(x, lambda)
    }
}
