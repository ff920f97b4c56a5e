//! Numerical certification of the trigonometric approximation
//! `TA = { (2/pi) arcsin[X] : X in S }` of the Max-Cut polytope, where `S`
//! is the elliptope of unit-diagonal PSD matrices.
//!
//! * [`matrix`]: symmetric matrices, PSD tests, elliptope sampling.
//! * [`trig`]: the entrywise maps, TA membership, star-like ray scans and
//!   the positivity-preservation scan for `sin(lambda arcsin x)`.
//! * [`series`]: Taylor coefficients of `sin(lambda arcsin x)` by recurrence.
//! * [`maxcut`]: brute-force optimum, graph objectives, cut-polytope membership.
//! * [`sdp`]: elliptope maximization, hyperplane rounding, the 2/pi sandwich.
//! * [`certify`]: the certification suites that tie these together.

pub mod certify;
pub mod error;
pub mod matrix;
pub mod maxcut;
pub mod report;
pub mod sdp;
pub mod seed;
pub mod series;
pub mod simplex;
pub mod trig;

pub use error::{Error, Result};
pub use matrix::{psd_check, rank1_cut_matrix, sample_elliptope, ElliptopePoint, GramFactor, PsdVerdict, SymMatrix};
pub use maxcut::{
    brute_force_opt, graph_to_objective, mc_membership, BruteForceResult, CutInstance, Graph, HullMembership,
    ObjectiveForm,
};
pub use report::{CertificateReport, ScanPoint};
pub use sdp::{elliptope_maximize, hyperplane_rounding, sandwich_report, SandwichReport, SdpOptions, SdpSolution};
pub use series::{nonnegativity_certificate, root_structure_check, series_eval, taylor_coeffs, CoefficientTable};
pub use trig::{
    f_entrywise, f_inverse_entrywise, f_lambda_entrywise, lemma_pospres_scan, starlike_ray_scan, ta_membership,
    MembershipVerdict, RayScanReport, TaCandidate,
};
