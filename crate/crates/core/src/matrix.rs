//! Dense symmetric matrices, PSD testing and the elliptope
//! `S = { X >= 0 | diag X = 1 }`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{input, Error, Result};
use crate::seed;

/// Largest dimension accepted anywhere in the crate.
pub const MAX_DIM: usize = 256;

/// Slack allowed on `|entry| <= 1` and `diag == 1` before clamping becomes an error.
pub const UNIT_SLACK: f64 = 1e-12;

/// Dense real symmetric matrix, stored row-major with both triangles present.
///
/// Construction symmetrizes by `(M + M^T) / 2`, so `get(i, j) == get(j, i)`
/// holds bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn new(n: usize, mut data: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if data.len() != n * n {
            return input(format!("expected {} entries for n = {n}, got {}", n * n, data.len()));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return input(format!("non-finite entry at ({}, {})", pos / n, pos % n));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        Ok(Self { n, data })
    }

    /// Builds a matrix from the upper triangle of `f(i, j)`, `i <= j`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dim(n)?;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if !v.is_finite() {
                    return input(format!("non-finite entry at ({i}, {j})"));
                }
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return input(format!("row {bad} has {} entries, expected {n}", rows[bad].len()));
        }
        Self::new(n, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_upper_fn(n, |i, j| if i == j { 1.0 } else { 0.0 }).expect("valid dimension")
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_upper_fn(n, |_, _| 0.0).expect("valid dimension")
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return input(format!("matrix is {}x{}, not square", m.nrows(), m.ncols()));
        }
        let n = m.nrows();
        Self::new(n, (0..n * n).map(|k| m[(k / n, k % n)]).collect())
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest off-diagonal `|entry|`; 0 for `n = 1`.
    pub fn max_abs_off_diagonal(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.max(self.get(i, j).abs());
            }
        }
        m
    }

    /// Frobenius inner product `<A, B> = tr(A B)`.
    pub fn inner(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// `x^T M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(self.n, x.len(), "dimension mismatch");
        (0..self.n)
            .map(|i| x[i] * self.row(i).iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }

    /// Applies `f` entrywise to the upper triangle and mirrors it.
    pub fn map_entries(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Result<Self> {
        Self::from_upper_fn(self.n, |i, j| f(i, j, self.get(i, j)))
    }

    /// `alpha * self + beta * other`.
    pub fn lin_comb(&self, alpha: f64, other: &SymMatrix, beta: f64) -> Result<Self> {
        if self.n != other.n {
            return input(format!("dimension mismatch: {} vs {}", self.n, other.n));
        }
        self.map_entries(|i, j, v| alpha * v + beta * other.get(i, j))
    }

    /// Largest entrywise `|self - other|`.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Ascending eigenvalues from a full symmetric eigendecomposition.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_dmatrix())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Parses the dense text format: a line holding `n`, then `n` rows of
    /// `n` whitespace-separated floats. Blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l))
            .filter(|(_, l)| !l.trim().is_empty());

        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            column: 1,
            message: "empty input, expected dimension".into(),
        })?;
        let mut htoks = tokens(header);
        let (hcol, htok) = htoks.next().expect("non-blank line has a token");
        let n: usize = htok.parse().map_err(|_| Error::Parse {
            line: hline,
            column: hcol,
            message: format!("expected dimension, found {htok:?}"),
        })?;
        if let Some((col, tok)) = htoks.next() {
            return Err(Error::Parse {
                line: hline,
                column: col,
                message: format!("unexpected token {tok:?} after dimension"),
            });
        }
        if n == 0 || n > MAX_DIM {
            return Err(Error::Parse {
                line: hline,
                column: hcol,
                message: format!("dimension {n} outside 1..={MAX_DIM}"),
            });
        }

        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            let (line, row) = lines.next().ok_or_else(|| Error::Parse {
                line: hline + r + 1,
                column: 1,
                message: format!("expected {n} rows, found {r}"),
            })?;
            let mut count = 0;
            for (col, tok) in tokens(row) {
                if count == n {
                    return Err(Error::Parse {
                        line,
                        column: col,
                        message: format!("row has more than {n} entries"),
                    });
                }
                let v: f64 = tok.parse().map_err(|_| Error::Parse {
                    line,
                    column: col,
                    message: format!("invalid number {tok:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        column: col,
                        message: format!("non-finite value {tok:?}"),
                    });
                }
                data.push(v);
                count += 1;
            }
            if count < n {
                return Err(Error::Parse {
                    line,
                    column: row.len() + 1,
                    message: format!("row has {count} entries, expected {n}"),
                });
            }
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                column: 1,
                message: format!("trailing content after {n} rows"),
            });
        }
        Self::new(n, data)
    }

    /// Inverse of [`SymMatrix::parse`]; floats carry 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| fmt_f64(*v)).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

/// Formats with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let tail = &rest[start..];
        let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
        let col = offset + start + 1;
        let tok = &tail[..len];
        offset += start + len;
        rest = &tail[len..];
        Some((col, tok))
    })
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return input("dimension must be at least 1");
    }
    if n > MAX_DIM {
        return Err(Error::Resource(format!("dimension {n} exceeds the limit of {MAX_DIM}")));
    }
    Ok(())
}

/// Default PSD tolerance `1e-9 * max(1, max |entry|)`.
pub fn default_psd_tol(m: &SymMatrix) -> f64 {
    1e-9 * m.max_abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdVerdict {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    pub tolerance_used: f64,
}

pub fn psd_check(m: &SymMatrix, tol: f64) -> Result<PsdVerdict> {
    if !tol.is_finite() || tol < 0.0 {
        return input(format!("tolerance must be finite and nonnegative, got {tol}"));
    }
    let min_eigenvalue = m.min_eigenvalue();
    Ok(PsdVerdict {
        is_psd: min_eigenvalue >= -tol,
        min_eigenvalue,
        tolerance_used: tol,
    })
}

/// A member of the elliptope: unit diagonal (exactly) and PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct ElliptopePoint {
    matrix: SymMatrix,
}

impl ElliptopePoint {
    /// Validates `m` as a member of S. The diagonal must be within
    /// [`UNIT_SLACK`] of 1 and is then pinned to 1; off-diagonal entries
    /// within the slack of +-1 are clamped.
    pub fn new(m: SymMatrix, psd_tol: f64) -> Result<Self> {
        let m = pin_unit_diagonal(&m)?;
        let verdict = psd_check(&m, psd_tol)?;
        if !verdict.is_psd {
            return input(format!(
                "matrix is not PSD: minimum eigenvalue {:e} < -{:e}",
                verdict.min_eigenvalue, psd_tol
            ));
        }
        Ok(Self { matrix: m })
    }

    pub(crate) fn from_trusted(matrix: SymMatrix) -> Self {
        debug_assert!(matrix.diagonal().iter().all(|&d| d == 1.0));
        Self { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: SymMatrix::identity(n),
        }
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SymMatrix {
        self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }
}

/// Checks `|diag - 1| <= UNIT_SLACK` and `|offdiag| <= 1 + UNIT_SLACK`, then
/// pins the diagonal to 1 and clamps off-diagonal entries into `[-1, 1]`.
/// Returns the cleaned matrix.
pub(crate) fn pin_unit_diagonal(m: &SymMatrix) -> Result<SymMatrix> {
    for i in 0..m.n() {
        let d = m.get(i, i);
        if (d - 1.0).abs() > UNIT_SLACK {
            return input(format!("diagonal entry ({i}, {i}) = {d} is not 1"));
        }
    }
    for i in 0..m.n() {
        for j in (i + 1)..m.n() {
            let v = m.get(i, j);
            if v.abs() > 1.0 + UNIT_SLACK {
                return input(format!("entry ({i}, {j}) = {v} lies outside [-1, 1]"));
            }
        }
    }
    m.map_entries(|i, j, v| if i == j { 1.0 } else { v.clamp(-1.0, 1.0) })
}

/// An `n x r` matrix with unit-norm rows; `V V^T` lies in the elliptope.
#[derive(Debug, Clone, PartialEq)]
pub struct GramFactor {
    n: usize,
    r: usize,
    data: Vec<f64>,
}

impl GramFactor {
    /// Normalizes every row of the row-major `n x r` array `data`.
    pub fn from_rows_normalized(n: usize, r: usize, mut data: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if r == 0 || data.len() != n * r {
            return input(format!("expected a {n}x{r} factor with r >= 1"));
        }
        for row in data.chunks_mut(r) {
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !norm.is_finite() || norm <= 0.0 {
                return input("factor row has zero or non-finite norm");
            }
            row.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(Self { n, r, data })
    }

    /// A factor of `x` from its eigendecomposition, `V = Q sqrt(max(L, 0))`,
    /// with rows renormalized to absorb rounding.
    pub fn from_elliptope(x: &ElliptopePoint) -> Self {
        let n = x.n();
        let eig = SymmetricEigen::new(x.matrix().to_dmatrix());
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                data[i * n + k] = eig.eigenvectors[(i, k)] * eig.eigenvalues[k].max(0.0).sqrt();
            }
        }
        Self::from_rows_normalized(n, n, data).expect("unit diagonal keeps rows nonzero")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.r..(i + 1) * self.r]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `V V^T` with the diagonal set to exactly 1.
    pub fn gram(&self) -> ElliptopePoint {
        let m = SymMatrix::from_upper_fn(self.n, |i, j| {
            if i == j {
                1.0
            } else {
                dot(self.row(i), self.row(j)).clamp(-1.0, 1.0)
            }
        })
        .expect("valid dimension");
        ElliptopePoint::from_trusted(m)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Draws a row-normalized Gaussian `n x rank` factor.
pub fn sample_gram_factor(n: usize, rank: usize, rng: &mut impl Rng) -> Result<GramFactor> {
    check_dim(n)?;
    if rank == 0 || rank > n {
        return input(format!("rank must satisfy 1 <= rank <= n = {n}, got {rank}"));
    }
    let mut data = Vec::with_capacity(n * rank);
    for _ in 0..n {
        loop {
            let row: Vec<f64> = (0..rank).map(|_| rng.sample(StandardNormal)).collect();
            if row.iter().any(|&v| v != 0.0) {
                data.extend(row);
                break;
            }
        }
    }
    GramFactor::from_rows_normalized(n, rank, data)
}

/// Samples `V V^T` where `V` is `n x rank` with i.i.d. standard normal
/// entries and unit-normalized rows. Deterministic in `(n, rank, seed)`.
pub fn sample_elliptope(n: usize, rank: usize, seed: u64) -> Result<ElliptopePoint> {
    let mut rng = seed::rng(seed);
    Ok(sample_gram_factor(n, rank, &mut rng)?.gram())
}

/// Validates a sign vector with entries in `{-1, +1}`.
pub fn check_signs(x: &[i8]) -> Result<()> {
    if x.is_empty() {
        return input("sign vector is empty");
    }
    if let Some(i) = x.iter().position(|&s| s != 1 && s != -1) {
        return input(format!("entry {i} of sign vector is {}, expected +-1", x[i]));
    }
    Ok(())
}

/// The cut matrix `x x^T` of a sign vector.
pub fn rank1_cut_matrix(x: &[i8]) -> Result<ElliptopePoint> {
    check_signs(x)?;
    let m = SymMatrix::from_upper_fn(x.len(), |i, j| f64::from(x[i] * x[j]))?;
    Ok(ElliptopePoint::from_trusted(m))
}
