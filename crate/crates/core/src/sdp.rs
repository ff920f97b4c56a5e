//! Maximization of `<A, X>` over the elliptope, random-hyperplane rounding
//! and the `2/pi` sandwich
//!
//! ```text
//! (2/pi) max_S <A, X>  <=  max_MC <A, X>  <=  max_S <A, X>     (A >= 0)
//! ```
//!
//! The elliptope is parametrized as `X = V V^T` with unit-norm rows of `V`
//! (`n x r`). Ascent steps move along the gradient projected onto the
//! tangent space of the product of spheres and then renormalize the rows.

use std::f64::consts::FRAC_2_PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{input, Error, Result};
use crate::matrix::{default_psd_tol, dot, psd_check, sample_gram_factor, ElliptopePoint, GramFactor, SymMatrix};
use crate::maxcut::{brute_force_opt, CutInstance};
use crate::seed;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;
/// Samples per independently seeded rounding chunk.
const ROUNDING_CHUNK: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    /// Columns of the Gram factor; `None` means `n`.
    pub rank: Option<usize>,
    /// Stop when `||projected gradient|| <= tol * (1 + |value|)`. Much below
    /// `1e-7` the Armijo test drowns in the rounding error of the objective.
    pub tol: f64,
    pub max_iterations: usize,
    pub restarts: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            rank: None,
            tol: 1e-7,
            max_iterations: 100_000,
            restarts: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub iterations: usize,
    pub gradient_norm: f64,
    pub restarts_used: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    /// `constant + <A, X>` at the returned point.
    pub value: f64,
    pub gram_factor: GramFactor,
    pub x_matrix: ElliptopePoint,
    pub convergence: Convergence,
}

struct Run {
    value: f64,
    factor: Vec<f64>,
    iterations: usize,
    gradient_norm: f64,
    converged: bool,
}

fn objective(a: &SymMatrix, v: &[f64], r: usize) -> f64 {
    let n = a.n();
    let mut s = 0.0;
    for i in 0..n {
        let vi = &v[i * r..(i + 1) * r];
        s += a.get(i, i) * dot(vi, vi);
        for j in (i + 1)..n {
            s += 2.0 * a.get(i, j) * dot(vi, &v[j * r..(j + 1) * r]);
        }
    }
    s
}

/// Riemannian gradient of `<A, V V^T>` on the product of unit spheres.
fn projected_gradient(a: &SymMatrix, v: &[f64], r: usize) -> Vec<f64> {
    let n = a.n();
    let mut g = vec![0.0; n * r];
    for i in 0..n {
        let gi = &mut g[i * r..(i + 1) * r];
        for j in 0..n {
            let aij = 2.0 * a.get(i, j);
            if aij != 0.0 {
                gi.iter_mut()
                    .zip(&v[j * r..(j + 1) * r])
                    .for_each(|(d, s)| *d += aij * s);
            }
        }
        let vi = &v[i * r..(i + 1) * r];
        let radial = dot(gi, vi);
        gi.iter_mut().zip(vi).for_each(|(d, s)| *d -= radial * s);
    }
    g
}

fn normalize_rows(v: &mut [f64], r: usize) {
    for row in v.chunks_mut(r) {
        let norm = dot(row, row).sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|x| *x /= norm);
        }
    }
}

fn ascend(a: &SymMatrix, start: GramFactor, opts: &SdpOptions) -> Run {
    let r = start.rank();
    let mut v = start.as_slice().to_vec();
    let mut value = objective(a, &v, r);
    let mut trial = vec![0.0; v.len()];
    let mut iterations = 0;
    let mut gradient_norm = f64::INFINITY;
    let mut converged = false;

    while iterations < opts.max_iterations {
        let g = projected_gradient(a, &v, r);
        let g2 = dot(&g, &g);
        gradient_norm = g2.sqrt();
        if gradient_norm <= opts.tol * (1.0 + value.abs()) {
            converged = true;
            break;
        }
        let mut step = 1.0;
        let accepted = loop {
            trial
                .iter_mut()
                .zip(v.iter().zip(&g))
                .for_each(|(t, (x, d))| *t = x + step * d);
            normalize_rows(&mut trial, r);
            let tv = objective(a, &trial, r);
            if tv >= value + ARMIJO * step * g2 {
                break Some(tv);
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        iterations += 1;
        match accepted {
            Some(tv) => {
                std::mem::swap(&mut v, &mut trial);
                value = tv;
            }
            // No ascent is possible at working precision.
            None => break,
        }
    }
    Run {
        value,
        factor: v,
        iterations,
        gradient_norm,
        converged,
    }
}

/// Maximizes `constant + <A, X>` over the elliptope with `opts.restarts`
/// independently seeded starts; returns the best one. A run that hits the
/// iteration limit is returned with `converged = false`, in which case
/// `value` is only a lower bound on the true maximum.
pub fn elliptope_maximize(inst: &CutInstance, opts: &SdpOptions, seed: u64) -> Result<SdpSolution> {
    let n = inst.n();
    let rank = opts.rank.unwrap_or(n);
    if rank == 0 || rank > n {
        return input(format!("rank must satisfy 1 <= rank <= n = {n}, got {rank}"));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return input(format!("tolerance must be positive, got {}", opts.tol));
    }
    if opts.restarts == 0 {
        return input("at least one restart is required");
    }
    let runs = (0..opts.restarts as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed::rng(seed::derive(seed, k));
            let start = sample_gram_factor(n, rank, &mut rng)?;
            Ok(ascend(&inst.a, start, opts))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.value > runs[best].value {
            best = k;
        }
    }
    let run = &runs[best];
    let gram_factor = GramFactor::from_rows_normalized(n, rank, run.factor.clone())?;
    let x_matrix = gram_factor.gram();
    Ok(SdpSolution {
        value: inst.evaluate_matrix(x_matrix.matrix()),
        gram_factor,
        x_matrix,
        convergence: Convergence {
            iterations: run.iterations,
            gradient_norm: run.gradient_norm,
            restarts_used: opts.restarts,
            converged: run.converged,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundingResult {
    /// Best cut found, normalized to `x[0] = +1`; `None` without an objective.
    pub best_cut: Option<Vec<i8>>,
    pub best_value: Option<f64>,
    /// Sample mean of `x x^T`.
    pub empirical_mean_matrix: SymMatrix,
    pub samples: usize,
}

/// Random-hyperplane rounding: `x = sign(V g)` for `g ~ N(0, I)`, with
/// `sign(0) = +1`. Tracks the mean of `x x^T`, which tends to
/// `(2/pi) arcsin(V V^T)` entrywise, and the best objective value.
///
/// Samples are drawn in fixed-size chunks, each with its own derived seed,
/// and reduced in chunk order, so the result depends only on `seed`.
pub fn hyperplane_rounding(
    factor: &GramFactor,
    objective: Option<&CutInstance>,
    samples: usize,
    seed: u64,
) -> Result<RoundingResult> {
    if samples == 0 {
        return input("at least one rounding sample is required");
    }
    let n = factor.n();
    if let Some(inst) = objective {
        if inst.n() != n {
            return input(format!("objective has n = {}, factor has n = {n}", inst.n()));
        }
    }
    let r = factor.rank();
    let chunks = samples.div_ceil(ROUNDING_CHUNK);
    let npairs = n * (n - 1) / 2;

    struct Chunk {
        agree: Vec<i64>,
        best: Option<(f64, Vec<i8>)>,
    }

    let parts: Vec<Chunk> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = ROUNDING_CHUNK.min(samples - c * ROUNDING_CHUNK);
            let mut rng = seed::rng(seed::derive(seed, c as u64));
            let mut g = vec![0.0; r];
            let mut x = vec![1i8; n];
            let mut agree = vec![0i64; npairs];
            let mut best: Option<(f64, Vec<i8>)> = None;
            for _ in 0..count {
                g.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi = if dot(factor.row(i), &g) >= 0.0 { 1 } else { -1 };
                }
                let mut p = 0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        agree[p] += i64::from(x[i] * x[j]);
                        p += 1;
                    }
                }
                if let Some(inst) = objective {
                    let val = inst.evaluate(&x);
                    if best.as_ref().is_none_or(|(b, _)| val > *b) {
                        let mut cut = x.clone();
                        if cut[0] < 0 {
                            cut.iter_mut().for_each(|s| *s = -*s);
                        }
                        best = Some((val, cut));
                    }
                }
            }
            Chunk { agree, best }
        })
        .collect();

    let mut agree = vec![0i64; npairs];
    let mut best: Option<(f64, Vec<i8>)> = None;
    for part in parts {
        agree.iter_mut().zip(&part.agree).for_each(|(a, b)| *a += b);
        if let Some((v, cut)) = part.best {
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, cut));
            }
        }
    }
    let total = samples as f64;
    let mut p = 0;
    let mut mean = vec![0.0; n * n];
    for i in 0..n {
        mean[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v = agree[p] as f64 / total;
            mean[i * n + j] = v;
            mean[j * n + i] = v;
            p += 1;
        }
    }
    let (best_value, best_cut) = match best {
        Some((v, c)) => (Some(v), Some(c)),
        None => (None, None),
    };
    Ok(RoundingResult {
        best_cut,
        best_value,
        empirical_mean_matrix: SymMatrix::new(n, mean)?,
        samples,
    })
}

impl SdpSolution {
    pub fn round(&self, inst: &CutInstance, samples: usize, seed: u64) -> Result<RoundingResult> {
        hyperplane_rounding(&self.gram_factor, Some(inst), samples, seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub sdp_value: f64,
    pub brute_value: f64,
    /// `(2/pi) * sdp_value`.
    pub lower_bound: f64,
    pub ratio: f64,
    pub tol: f64,
    pub converged: bool,
    /// `brute <= sdp + tol`.
    pub upper_holds: bool,
    /// `lower_bound <= brute + tol`; `None` when the solver did not converge,
    /// since a non-optimal `sdp_value` cannot certify this leg.
    pub lower_holds: Option<bool>,
    pub holds: bool,
}

/// Solves both sides of the sandwich for a PSD objective. Cut-value
/// instances are first rewritten with their constant folded into the
/// diagonal (the Laplacian form), which is PSD for nonnegative weights.
pub fn sandwich_report(inst: &CutInstance, opts: &SdpOptions, seed: u64) -> Result<SandwichReport> {
    let folded = if inst.constant != 0.0 {
        inst.fold_constant()
    } else {
        inst.clone()
    };
    let psd = psd_check(&folded.a, default_psd_tol(&folded.a))?;
    if !psd.is_psd {
        return Err(Error::NotPsd {
            min_eigenvalue: psd.min_eigenvalue,
        });
    }
    let brute_value = brute_force_opt(&folded)?.optimum;
    let sol = elliptope_maximize(&folded, opts, seed)?;
    let sdp_value = sol.value;
    let tol = 1e-6 * (1.0 + sdp_value.abs());
    let lower_bound = FRAC_2_PI * sdp_value;
    let converged = sol.convergence.converged;
    let upper_holds = brute_value <= sdp_value + tol;
    let lower_holds = converged.then_some(lower_bound <= brute_value + tol);
    Ok(SandwichReport {
        sdp_value,
        brute_value,
        lower_bound,
        ratio: brute_value / sdp_value,
        tol,
        converged,
        upper_holds,
        lower_holds,
        holds: upper_holds && lower_holds.unwrap_or(true),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::sample_elliptope;
    use crate::maxcut::{graph_to_objective, Graph, ObjectiveForm};

    #[test]
    fn identity_objective_is_trace() {
        let sol = elliptope_maximize(&CutInstance::new(SymMatrix::identity(4)), &SdpOptions::default(), 1).unwrap();
        assert!((sol.value - 4.0).abs() < 1e-12);
        assert!(sol.convergence.converged);
    }

    #[test]
    fn two_by_two() {
        let a = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let sol = elliptope_maximize(&CutInstance::new(a), &SdpOptions::default(), 3).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-9);
        assert!((sol.x_matrix.matrix().get(0, 1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn triangle_bound() {
        let g = Graph::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let inst = graph_to_objective(&g, ObjectiveForm::CutValue).unwrap();
        let sol = elliptope_maximize(&inst, &SdpOptions::default(), 5).unwrap();
        assert!(sol.convergence.converged);
        assert!((sol.value - 2.25).abs() < 1e-8, "{}", sol.value);
        let x = sol.x_matrix.matrix();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((x.get(i, j) + 0.5).abs() < 1e-4);
        }
    }

    #[test]
    fn solution_is_feasible() {
        let inst = CutInstance::new(sample_elliptope(6, 6, 2).unwrap().into_matrix());
        let sol = elliptope_maximize(&inst, &SdpOptions::default(), 9).unwrap();
        let x = sol.x_matrix.matrix();
        assert!(x.diagonal().iter().all(|&d| d == 1.0));
        assert!(psd_check(x, 1e-9).unwrap().is_psd);
        assert!(sol.gram_factor.gram().matrix().max_abs_diff(x) <= 1e-10);
    }

    #[test]
    fn option_validation() {
        let inst = CutInstance::new(SymMatrix::identity(3));
        let bad_rank = SdpOptions {
            rank: Some(4),
            ..Default::default()
        };
        assert!(elliptope_maximize(&inst, &bad_rank, 0).is_err());
        let bad_tol = SdpOptions {
            tol: 0.0,
            ..Default::default()
        };
        assert!(elliptope_maximize(&inst, &bad_tol, 0).is_err());
    }

    #[test]
    fn rank_one_rounding() {
        let v = GramFactor::from_rows_normalized(3, 2, vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0]).unwrap();
        let r = hyperplane_rounding(&v, None, 1000, 4).unwrap();
        assert!(r.empirical_mean_matrix.as_slice().iter().all(|&e| e == 1.0));
        assert!(r.best_cut.is_none());
        assert!(hyperplane_rounding(&v, None, 0, 4).is_err());
    }

    #[test]
    fn rounding_is_deterministic() {
        let x = sample_elliptope(4, 4, 1).unwrap();
        let v = GramFactor::from_elliptope(&x);
        let inst = CutInstance::new(x.matrix().clone());
        let a = hyperplane_rounding(&v, Some(&inst), 100_000, 77).unwrap();
        let b = hyperplane_rounding(&v, Some(&inst), 100_000, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.best_cut.as_ref().unwrap()[0], 1);
    }

    #[test]
    fn sandwich_requires_psd() {
        let a = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            sandwich_report(&CutInstance::new(a), &SdpOptions::default(), 0),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn sandwich_identity() {
        let r = sandwich_report(&CutInstance::new(SymMatrix::identity(5)), &SdpOptions::default(), 0).unwrap();
        assert!(r.holds);
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }
}
