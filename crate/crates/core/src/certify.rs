//! Certification suites: seeded batches of the scans in [`crate::trig`],
//! [`crate::series`], [`crate::maxcut`] and [`crate::sdp`], each summarized in
//! a single [`CertificateReport`].
//!
//! Sample `k` of a suite run with global seed `s` uses the derived seed
//! `seed::derive(s, k)`; its dimension cycles through the suite's dimension
//! list and its factor rank is drawn uniformly from `1..=n`. Samples are
//! evaluated in parallel and reported in index order, so reports do not
//! depend on the thread count.

use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{input, Result};
use crate::matrix::{psd_check, rank1_cut_matrix, sample_elliptope, sample_gram_factor, SymMatrix};
use crate::maxcut::{cut_vertices, graph_to_objective, mc_membership, CutInstance, Graph, ObjectiveForm};
use crate::report::CertificateReport;
use crate::sdp::{hyperplane_rounding, sandwich_report, SdpOptions};
use crate::seed;
use crate::series::{closed_form, nonnegativity_certificate, root_structure_check, series_eval, taylor_coeffs};
use crate::trig::{
    decomposition_gap, f_entrywise, f_lambda_entrywise, starlike_ray_scan, ta_membership, uniform_grid, TaCandidate,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemma,
    Starlike,
    Coeffs,
    Sandwich,
    Hull,
    Rounding,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Lemma,
        Suite::Starlike,
        Suite::Coeffs,
        Suite::Sandwich,
        Suite::Hull,
        Suite::Rounding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma => "lemma",
            Suite::Starlike => "starlike",
            Suite::Coeffs => "coeffs",
            Suite::Sandwich => "sandwich",
            Suite::Hull => "hull",
            Suite::Rounding => "rounding",
        }
    }

    pub fn names() -> String {
        Self::ALL.map(Suite::name).join(", ")
    }

    pub fn run(self, cfg: &SuiteConfig) -> Result<CertificateReport> {
        match self {
            Suite::Lemma => {
                let mut r = lemma_suite(
                    cfg.seed,
                    cfg.samples.unwrap_or(500),
                    &dims(2, 12),
                    cfg.grid.unwrap_or(11),
                    cfg.tol.unwrap_or(1e-9),
                )?;
                let d = decomposition_suite(cfg.seed, cfg.samples.map_or(100, |s| s.min(100)), &dims(2, 12))?;
                merge(&mut r, d);
                Ok(r)
            }
            Suite::Starlike => starlike_suite(
                cfg.seed,
                cfg.samples.unwrap_or(200),
                &dims(2, 10),
                cfg.grid.unwrap_or(101),
                cfg.tol.unwrap_or(1e-9),
            ),
            Suite::Coeffs => coeffs_suite(cfg.grid.unwrap_or(101), cfg.max_order.unwrap_or(500)),
            Suite::Sandwich => sandwich_suite(cfg.seed, cfg.samples.unwrap_or(100), 12, &cfg.sdp),
            Suite::Hull => hull_suite(
                cfg.seed,
                cfg.samples.unwrap_or(200),
                &[3, 4, 5],
                cfg.tol.unwrap_or(1e-9),
            ),
            Suite::Rounding => rounding_suite(cfg.seed, 20, cfg.samples.unwrap_or(1_000_000), 6),
        }
    }
}

impl FromStr for Suite {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|suite| suite.name() == s).map_or_else(
            || input(format!("unknown suite {s:?}; valid suites: {}", Suite::names())),
            Ok,
        )
    }
}

/// Overrides for [`Suite::run`]; `None` keeps each suite's default.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub max_order: Option<usize>,
    pub sdp: SdpOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: None,
            grid: None,
            tol: None,
            max_order: None,
            sdp: SdpOptions::default(),
        }
    }
}

pub fn dims(lo: usize, hi: usize) -> Vec<usize> {
    (lo..=hi).collect()
}

fn merge(into: &mut CertificateReport, other: CertificateReport) {
    into.pass &= other.pass;
    into.points.extend(other.points);
    into.summary.extend(other.summary);
}

/// `(seed, n, rank)` for sample `k`.
pub fn sample_spec(global: u64, k: usize, dims: &[usize]) -> (u64, usize, usize) {
    let s = seed::derive(global, k as u64);
    let n = dims[k % dims.len()];
    let rank = 1 + (seed::mix(s ^ 0x5EED) % n as u64) as usize;
    (s, n, rank)
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return input("dimension list must be nonempty and positive");
    }
    Ok(())
}

const HISTOGRAM_EDGES: [f64; 4] = [0.0, 1e-12, 1e-6, 1e-3];

/// Counts of values in `(-inf, 0)`, `[0, 1e-12)`, `[1e-12, 1e-6)`,
/// `[1e-6, 1e-3)` and `[1e-3, inf)`.
pub fn histogram(values: impl Iterator<Item = f64>) -> [usize; 5] {
    let mut h = [0; 5];
    for v in values {
        h[HISTOGRAM_EDGES.iter().take_while(|&&e| v >= e).count()] += 1;
    }
    h
}

fn note_histogram(report: &mut CertificateReport, h: [usize; 5]) {
    report.note("hist_negative", h[0]);
    report.note("hist_0_1e-12", h[1]);
    report.note("hist_1e-12_1e-6", h[2]);
    report.note("hist_1e-6_1e-3", h[3]);
    report.note("hist_1e-3_inf", h[4]);
}

/// Positivity preservation of `sin(lambda arcsin x)`: for each sampled `X`
/// in the elliptope and each lambda on a uniform grid, `f_lambda[X] >= -tol`.
/// One point per sample carrying the worst lambda, plus a FAIL point for
/// every violating `(sample, lambda)`.
pub fn lemma_suite(global: u64, samples: usize, dims: &[usize], grid: usize, tol: f64) -> Result<CertificateReport> {
    check_dims(dims)?;
    let lambdas = uniform_grid(grid)?;
    let per_sample = (0..samples)
        .into_par_iter()
        .map(|k| {
            let (s, n, rank) = sample_spec(global, k, dims);
            let x = sample_elliptope(n, rank, s)?;
            let eigs = lambdas
                .iter()
                .map(|&l| Ok(psd_check(&f_lambda_entrywise(x.matrix(), l)?, tol)?.min_eigenvalue))
                .collect::<Result<Vec<f64>>>()?;
            Ok((n, rank, eigs))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = CertificateReport::new("lemma");
    report.seeds = vec![global];
    report.grid = lambdas.clone();
    for (k, (n, rank, eigs)) in per_sample.iter().enumerate() {
        let label = format!("x{k}:n={n}:r={rank}");
        let (arg, min) = argmin(eigs);
        report.push_point(&label, lambdas[arg], min, min >= -tol);
        for (l, e) in lambdas.iter().zip(eigs) {
            if *e < -tol && *l != lambdas[arg] {
                report.push_point(&label, *l, *e, false);
            }
        }
    }
    report.note("samples", samples);
    report.note_f64("tol", tol);
    report.note_f64("min_eigenvalue", report.min_value().unwrap_or(f64::INFINITY));
    note_histogram(&mut report, histogram(per_sample.iter().map(|(_, _, e)| argmin(e).1)));
    Ok(report)
}

fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, x)| if x < b.1 { (i, x) } else { b })
}

/// Entrywise agreement of `f^-1(lambda f(X) + (1 - lambda) I)` with
/// `f_lambda(X) + (1 - sin(pi lambda / 2)) I` on random `(X, lambda)`.
pub fn decomposition_suite(global: u64, samples: usize, dims: &[usize]) -> Result<CertificateReport> {
    check_dims(dims)?;
    const TOL: f64 = 1e-12;
    let gaps = (0..samples)
        .into_par_iter()
        .map(|k| {
            let (s, n, rank) = sample_spec(global ^ 0xDEC0, k, dims);
            let x = sample_elliptope(n, rank, s)?;
            let lambda: f64 = seed::rng(seed::mix(s)).random();
            Ok((lambda, decomposition_gap(&x, lambda)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = CertificateReport::new("decomposition");
    report.seeds = vec![global];
    for (k, (lambda, gap)) in gaps.iter().enumerate() {
        report.push_point(format!("decomp{k}"), *lambda, *gap, *gap <= TOL);
    }
    let worst = gaps.iter().map(|g| g.1).fold(0.0, f64::max);
    report.note_f64("decomposition_max_gap", worst);
    Ok(report)
}

/// Star-likeness of TA: for sampled `Y = f(X)`, every point of the segment
/// `lambda Y + (1 - lambda) I` on a uniform grid passes TA membership.
pub fn starlike_suite(global: u64, samples: usize, dims: &[usize], grid: usize, tol: f64) -> Result<CertificateReport> {
    check_dims(dims)?;
    let scans = (0..samples)
        .into_par_iter()
        .map(|k| {
            let (s, n, rank) = sample_spec(global, k, dims);
            let c = TaCandidate::from_elliptope(&sample_elliptope(n, rank, s)?);
            Ok((n, rank, starlike_ray_scan(&c, grid, tol)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = CertificateReport::new("starlike");
    report.seeds = vec![global];
    report.grid = uniform_grid(grid)?;
    let mut mins = Vec::with_capacity(samples);
    for (k, (n, rank, scan)) in scans.iter().enumerate() {
        let label = format!("y{k}:n={n}:r={rank}");
        let eigs: Vec<f64> = scan.verdicts.iter().map(|v| v.preimage_min_eigenvalue).collect();
        let (arg, min) = argmin(&eigs);
        mins.push(min);
        report.push_point(&label, scan.lambda_grid[arg], min, scan.all_pass);
        for (i, v) in scan.verdicts.iter().enumerate() {
            if !v.in_ta && i != arg {
                report.push_point(&label, scan.lambda_grid[i], v.preimage_min_eigenvalue, false);
            }
        }
    }
    report.note("samples", samples);
    report.note_f64("tol", tol);
    report.note_f64("min_eigenvalue", report.min_value().unwrap_or(f64::INFINITY));
    note_histogram(&mut report, histogram(mins.into_iter()));
    Ok(report)
}

/// `(-1)^((m-1)/2) T_m`, the polynomial `sin(m arcsin x)` for odd `m`, from
/// the Chebyshev recurrence `T_{k+1} = 2x T_k - T_{k-1}` in exact integers.
pub fn odd_multiple_angle_poly(m: u32) -> Vec<i64> {
    assert!(m % 2 == 1, "m must be odd");
    let m = m as usize;
    let mut prev = vec![1i64]; // T_0
    let mut cur = vec![0i64, 1]; // T_1
    for _ in 1..m {
        let mut next = vec![0i64; cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2 * c;
        }
        for (i, p) in prev.iter().enumerate() {
            next[i] -= p;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    let sign = if ((m - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    cur.iter().map(|c| sign * c).collect()
}

/// Coefficient checks: nonnegativity on a lambda grid, truncated series
/// against the closed form, the ODE residual of the closed-form
/// derivatives, and polynomial truncation at odd integer lambda.
pub fn coeffs_suite(grid: usize, max_order: usize) -> Result<CertificateReport> {
    let lambdas = uniform_grid(grid)?;
    let mut report = nonnegativity_certificate(&lambdas, max_order)?;
    report.kind = "coeffs".into();

    const SERIES_ORDER: usize = 400;
    const SERIES_TOL: f64 = 1e-9;
    let xs: Vec<f64> = (0..=38)
        .map(|k| -0.95 + 0.05 * k as f64)
        .map(|x: f64| x.clamp(-0.95, 0.95))
        .collect();
    let mut worst_series: f64 = 0.0;
    for &l in &lambdas {
        let t = taylor_coeffs(l, SERIES_ORDER)?;
        let err = xs
            .iter()
            .map(|&x| Ok((series_eval(&t, x)? - closed_form::value(x, l)).abs()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        worst_series = worst_series.max(err);
        report.push_point("series", l, err, err <= SERIES_TOL);
    }
    report.note_f64("series_max_error", worst_series);

    const ODE_TOL: f64 = 1e-10;
    let ode_xs: Vec<f64> = (0..=180)
        .map(|k| -0.9 + 0.01 * k as f64)
        .map(|x: f64| x.clamp(-0.9, 0.9))
        .collect();
    let mut worst_ode: f64 = 0.0;
    for &l in &lambdas {
        let res = ode_xs
            .iter()
            .map(|&x| closed_form::ode_residual(x, l).abs())
            .fold(0.0, f64::max);
        worst_ode = worst_ode.max(res);
        report.push_point("ode", l, res, res <= ODE_TOL);
    }
    report.note_f64("ode_max_residual", worst_ode);

    const POLY_TOL: f64 = 1e-12;
    for m in [1u32, 3, 5, 7] {
        let roots = root_structure_check(m, max_order)?;
        report.push_point(
            format!("truncation:m={m}"),
            f64::from(m),
            roots.points[0].value,
            roots.pass,
        );
        let t = taylor_coeffs(f64::from(m), max_order)?;
        let poly = odd_multiple_angle_poly(m);
        let gap = poly
            .iter()
            .enumerate()
            .map(|(i, &c)| (t.get(i) - c as f64).abs())
            .fold(0.0, f64::max);
        report.push_point(format!("polynomial:m={m}"), f64::from(m), gap, gap <= POLY_TOL);
    }
    Ok(report)
}

/// Random PSD objective `B B^T` with `B` an `n x k` standard normal matrix.
pub fn random_psd_instance(n: usize, k: usize, s: u64) -> Result<CutInstance> {
    let mut rng = seed::rng(s);
    let b: Vec<f64> = (0..n * k).map(|_| rng.sample(StandardNormal)).collect();
    let a = SymMatrix::from_upper_fn(n, |i, j| (0..k).map(|t| b[i * k + t] * b[j * k + t]).sum())?;
    Ok(CutInstance::new(a))
}

pub fn triangle_instance() -> CutInstance {
    let g = Graph::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).expect("valid graph");
    graph_to_objective(&g, ObjectiveForm::CutValue).expect("valid graph")
}

/// The 2/pi sandwich on random PSD objectives with `2 <= n <= max_n`, plus
/// the unit triangle (SDP 9/4 against max cut 2). One point per instance:
/// param is `brute / sdp`, value is the slack `brute - (2/pi) sdp`.
pub fn sandwich_suite(global: u64, instances: usize, max_n: usize, opts: &SdpOptions) -> Result<CertificateReport> {
    if max_n < 2 {
        return input("sandwich suite needs max_n >= 2");
    }
    let ns = dims(2, max_n);
    let results = (0..instances)
        .into_par_iter()
        .map(|k| {
            let (s, n, rank) = sample_spec(global, k, &ns);
            let inst = random_psd_instance(n, rank, s)?;
            Ok((n, rank, sandwich_report(&inst, opts, seed::mix(s))?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = CertificateReport::new("sandwich");
    report.seeds = vec![global];
    let mut converged = 0;
    for (k, (n, rank, r)) in results.iter().enumerate() {
        converged += usize::from(r.converged);
        let status = if r.converged { "" } else { ":unconverged" };
        report.push_point(
            format!("a{k}:n={n}:r={rank}{status}"),
            r.ratio,
            r.brute_value - r.lower_bound,
            r.holds,
        );
    }
    let min_converged = (instances * 95).div_ceil(100);
    report.note("converged", converged);
    report.note("instances", instances);
    report.note("required_converged", min_converged);
    report.pass &= converged >= min_converged;

    let tri = sandwich_report(&triangle_instance(), opts, global)?;
    let tri_ok = tri.holds && (tri.sdp_value - 2.25).abs() <= 1e-4 && (tri.brute_value - 2.0).abs() <= 1e-12;
    report.push_point("triangle", tri.ratio, tri.sdp_value, tri_ok);
    report.note_f64("triangle_sdp", tri.sdp_value);
    report.note_f64("triangle_brute", tri.brute_value);
    Ok(report)
}

/// TA inside MC: sampled TA points must be convex combinations of cut
/// matrices; every cut matrix must itself be in TA; the uniform `-1/2`
/// triangle must fail both tests.
pub fn hull_suite(global: u64, samples: usize, dims: &[usize], tol: f64) -> Result<CertificateReport> {
    check_dims(dims)?;
    let cap = dims.iter().copied().max().unwrap_or(0);
    let results = (0..samples)
        .into_par_iter()
        .map(|k| {
            let (s, n, rank) = sample_spec(global, k, dims);
            let c = TaCandidate::from_elliptope(&sample_elliptope(n, rank, s)?);
            let in_ta = ta_membership(&c, tol)?.in_ta;
            Ok((n, rank, in_ta, mc_membership(&c, cap)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = CertificateReport::new("hull");
    report.seeds = vec![global];
    for (k, (n, rank, in_ta, h)) in results.iter().enumerate() {
        report.push_point(
            format!("y{k}:n={n}:r={rank}"),
            f64::from(u8::from(*in_ta)),
            h.residual,
            *in_ta && h.in_hull,
        );
    }

    let mut cuts_in_ta = true;
    for &n in dims {
        for x in cut_vertices(n) {
            let c = TaCandidate::new(rank1_cut_matrix(&x)?.into_matrix())?;
            cuts_in_ta &= ta_membership(&c, tol)?.in_ta;
        }
    }
    report.push_point("cut_matrices_in_ta", 0.0, 0.0, cuts_in_ta);

    let bad = TaCandidate::new(SymMatrix::from_upper_fn(3, |i, j| if i == j { 1.0 } else { -0.5 })?)?;
    let bad_ta = ta_membership(&bad, tol)?;
    let bad_mc = mc_membership(&bad, 3)?;
    report.push_point(
        "negative_control_ta",
        0.0,
        bad_ta.preimage_min_eigenvalue,
        !bad_ta.in_ta,
    );
    report.push_point("negative_control_mc", 0.0, bad_mc.residual, !bad_mc.in_hull);
    report.note("samples", samples);
    Ok(report)
}

/// Monte Carlo check of `E[sign(v_i.g) sign(v_j.g)] = (2/pi) arcsin(X_ij)`:
/// entries further than `3e-3` (3 sigma at 10^6 samples) from `f(X)` are
/// counted, and each matrix may have at most one.
pub fn rounding_suite(global: u64, matrices: usize, samples: usize, max_n: usize) -> Result<CertificateReport> {
    if max_n < 2 {
        return input("rounding suite needs max_n >= 2");
    }
    const DEVIATION: f64 = 3e-3;
    const BUDGET: usize = 1;
    let ns = dims(2, max_n);
    let mut report = CertificateReport::new("rounding");
    report.seeds = vec![global];
    let mut exceed_total = 0;
    for k in 0..matrices {
        let (s, n, rank) = sample_spec(global, k, &ns);
        let factor = sample_gram_factor(n, rank, &mut seed::rng(s))?;
        let target = f_entrywise(factor.gram().matrix())?;
        let r = hyperplane_rounding(&factor, None, samples, seed::mix(s))?;
        let mean = &r.empirical_mean_matrix;
        let mut exceed = 0;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (mean.get(i, j) - target.get(i, j)).abs();
                worst = worst.max(d);
                exceed += usize::from(d > DEVIATION);
            }
        }
        exceed_total += exceed;
        report.push_point(format!("x{k}:n={n}:r={rank}"), exceed as f64, worst, exceed <= BUDGET);
    }
    report.note("samples", samples);
    report.note("entries_beyond_3sigma", exceed_total);
    Ok(report)
}
