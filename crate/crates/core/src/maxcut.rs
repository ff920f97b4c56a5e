//! Exact small-scale oracles for `max_{x in {-1,1}^n} x^T A x`: brute-force
//! enumeration, graph-to-objective conversion and LP membership in the
//! Max-Cut polytope `MC = conv { x x^T }`.

use crate::error::{input, Error, Result};
use crate::matrix::{check_signs, SymMatrix};
use crate::simplex::phase_one;
use crate::trig::TaCandidate;

/// Largest dimension accepted by [`brute_force_opt`] (2^23 evaluations).
pub const MAX_BRUTE_FORCE_N: usize = 24;
/// Default dimension cap for [`mc_membership`] (16 cut matrices).
pub const DEFAULT_HULL_CAP: usize = 5;
/// Hard cap for [`mc_membership`] regardless of the caller's cap.
pub const MAX_HULL_N: usize = 10;
/// Phase-one objective below which the hull LP counts as feasible.
pub const HULL_FEASIBILITY_TOL: f64 = 1e-9;

/// Undirected weighted graph on vertices `0..n` (1-based in files).
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    pub n: usize,
    /// `(i, j, w)` with `i != j`, 0-based.
    pub edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return input("graph must have at least one vertex");
        }
        for &(i, j, w) in &edges {
            if i >= n || j >= n {
                return input(format!(
                    "edge ({}, {}) references a vertex outside 1..={n}",
                    i + 1,
                    j + 1
                ));
            }
            if i == j {
                return input(format!("self-loop at vertex {}", i + 1));
            }
            if !w.is_finite() {
                return input(format!("edge ({}, {}) has non-finite weight", i + 1, j + 1));
            }
        }
        Ok(Self { n, edges })
    }

    /// Parses the Rudy format: a header `n m` then `m` lines `i j w` with
    /// 1-based vertices. Lines starting with `#` and blank lines are ignored.
    pub fn parse_rudy(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l)).filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        });
        let perr = |line: usize, column: usize, message: String| Error::Parse { line, column, message };

        let (hline, header) = lines.next().ok_or_else(|| perr(1, 1, "empty graph file".into()))?;
        let htoks = fields(header);
        if htoks.len() != 2 {
            return Err(perr(hline, 1, "header must be \"n m\"".into()));
        }
        let n: usize = htoks[0]
            .1
            .parse()
            .map_err(|_| perr(hline, htoks[0].0, "bad vertex count".into()))?;
        let m: usize = htoks[1]
            .1
            .parse()
            .map_err(|_| perr(hline, htoks[1].0, "bad edge count".into()))?;
        if n == 0 {
            return Err(perr(hline, htoks[0].0, "graph must have at least one vertex".into()));
        }

        let mut edges = Vec::with_capacity(m);
        for e in 0..m {
            let (line, text) = lines
                .next()
                .ok_or_else(|| perr(hline + e + 1, 1, format!("expected {m} edges, found {e}")))?;
            let toks = fields(text);
            if toks.len() != 3 {
                return Err(perr(
                    line,
                    1,
                    format!("edge line needs \"i j w\", found {} fields", toks.len()),
                ));
            }
            let vertex = |(col, tok): (usize, &str)| -> Result<usize> {
                let v: usize = tok
                    .parse()
                    .map_err(|_| perr(line, col, format!("bad vertex {tok:?}")))?;
                if v == 0 || v > n {
                    return Err(perr(line, col, format!("vertex {v} outside 1..={n}")));
                }
                Ok(v - 1)
            };
            let i = vertex(toks[0])?;
            let j = vertex(toks[1])?;
            if i == j {
                return Err(perr(line, toks[1].0, format!("self-loop at vertex {}", i + 1)));
            }
            let w: f64 = toks[2]
                .1
                .parse()
                .ok()
                .filter(|w: &f64| w.is_finite())
                .ok_or_else(|| perr(line, toks[2].0, format!("bad weight {:?}", toks[2].1)))?;
            edges.push((i, j, w));
        }
        if let Some((line, _)) = lines.next() {
            return Err(perr(line, 1, format!("more than the declared {m} edges")));
        }
        Ok(Self { n, edges })
    }

    pub fn to_rudy(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(i, j, w) in &self.edges {
            out.push_str(&format!("{} {} {}\n", i + 1, j + 1, w));
        }
        out
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Symmetric weight matrix; parallel edges add up.
    pub fn weight_matrix(&self) -> SymMatrix {
        let mut w = vec![0.0; self.n * self.n];
        for &(i, j, wt) in &self.edges {
            w[i * self.n + j] += wt;
            w[j * self.n + i] += wt;
        }
        SymMatrix::new(self.n, w).expect("finite weights")
    }

    /// `sum_{(i,j) in E} w_ij (1 - x_i x_j) / 2`.
    pub fn cut_value(&self, x: &[i8]) -> f64 {
        self.edges
            .iter()
            .map(|&(i, j, w)| w * (1.0 - f64::from(x[i] * x[j])) / 2.0)
            .sum()
    }
}

fn fields(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(k),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..k]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveForm {
    /// `x^T W x` with `W` the weight matrix.
    Quadratic,
    /// The cut weight, stored as `constant + x^T A x`.
    CutValue,
}

/// Objective `constant + x^T A x` over sign vectors, optionally tagged with
/// the graph it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CutInstance {
    pub a: SymMatrix,
    pub constant: f64,
    pub provenance: Option<Graph>,
}

impl CutInstance {
    pub fn new(a: SymMatrix) -> Self {
        Self {
            a,
            constant: 0.0,
            provenance: None,
        }
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// `constant + x^T A x`.
    pub fn evaluate(&self, x: &[i8]) -> f64 {
        let xf: Vec<f64> = x.iter().map(|&s| f64::from(s)).collect();
        self.constant + self.a.quadratic_form(&xf)
    }

    /// `constant + <A, X>`, the objective lifted to matrices.
    pub fn evaluate_matrix(&self, x: &SymMatrix) -> f64 {
        self.constant + self.a.inner(x)
    }

    /// Moves the constant onto the diagonal, which leaves the objective
    /// unchanged on unit-diagonal matrices. For cut-value instances with a
    /// graph the constant is split by weighted degree, giving `L / 4` with `L`
    /// the graph Laplacian; otherwise it is split evenly.
    pub fn fold_constant(&self) -> Self {
        let n = self.n();
        let shares: Vec<f64> = match &self.provenance {
            Some(g)
                if self.constant != 0.0
                    && (self.constant - g.total_weight() / 2.0).abs() <= 1e-12 * (1.0 + self.constant.abs()) =>
            {
                let mut deg = vec![0.0; n];
                for &(i, j, w) in &g.edges {
                    deg[i] += w / 4.0;
                    deg[j] += w / 4.0;
                }
                deg
            }
            _ => vec![self.constant / n as f64; n],
        };
        let a = self
            .a
            .map_entries(|i, j, v| if i == j { v + shares[i] } else { v })
            .expect("finite shift");
        Self {
            a,
            constant: 0.0,
            provenance: self.provenance.clone(),
        }
    }
}

/// Builds the objective of a graph.
///
/// `Quadratic` gives `A = W`. `CutValue` gives `constant = sum(w) / 2` and
/// `A = -W / 4`, so that `constant + x^T A x = sum(w)/2 - (1/2) sum_E w_ij x_i x_j`,
/// which is exactly the weight of the cut `x`.
pub fn graph_to_objective(graph: &Graph, form: ObjectiveForm) -> Result<CutInstance> {
    let graph = Graph::new(graph.n, graph.edges.clone())?;
    let w = graph.weight_matrix();
    let (a, constant) = match form {
        ObjectiveForm::Quadratic => (w, 0.0),
        ObjectiveForm::CutValue => (w.map_entries(|_, _, v| -v / 4.0)?, graph.total_weight() / 2.0),
    };
    Ok(CutInstance {
        a,
        constant,
        provenance: Some(graph),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub optimum: f64,
    /// Maximizer with `argmax[0] = +1`; ties go to the lexicographically
    /// smallest vector (`-1 < +1`).
    pub argmax: Vec<i8>,
    pub evaluations: u64,
}

/// Exact maximum of `constant + x^T A x` by Gray-code enumeration of the
/// `2^(n-1)` sign vectors with `x_0 = +1`, at `O(n)` per step.
pub fn brute_force_opt(inst: &CutInstance) -> Result<BruteForceResult> {
    let n = inst.n();
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::Resource(format!(
            "brute force is limited to n <= {MAX_BRUTE_FORCE_N}, got {n}"
        )));
    }
    let a = &inst.a;
    let mut x = vec![1i8; n];
    // field[i] = sum_{j != i} A_ij x_j
    let mut field: Vec<f64> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| a.get(i, j)).sum())
        .collect();
    let mut value = inst.evaluate(&x);
    let mut best_value = value;
    let mut best_x = x.clone();

    let total: u64 = 1 << (n - 1);
    for step in 1..total {
        let k = step.trailing_zeros() as usize + 1;
        let xk = f64::from(x[k]);
        value -= 4.0 * xk * field[k];
        for (j, fj) in field.iter_mut().enumerate() {
            if j != k {
                *fj -= 2.0 * a.get(j, k) * xk;
            }
        }
        x[k] = -x[k];
        if value > best_value || (value == best_value && x < best_x) {
            best_value = value;
            best_x.copy_from_slice(&x);
        }
    }

    Ok(BruteForceResult {
        optimum: inst.evaluate(&best_x),
        argmax: best_x,
        evaluations: total,
    })
}

/// All `2^(n-1)` sign vectors with `x_0 = +1`, in binary counting order
/// (bit `k - 1` of the index set means `x_k = -1`).
pub fn cut_vertices(n: usize) -> Vec<Vec<i8>> {
    assert!((1..=30).contains(&n), "vertex enumeration needs 1 <= n <= 30");
    (0..1u64 << (n - 1))
        .map(|idx| {
            (0..n)
                .map(|k| if k > 0 && (idx >> (k - 1)) & 1 == 1 { -1 } else { 1 })
                .collect()
        })
        .collect()
}

/// Result of testing `X in MC`.
#[derive(Debug, Clone, PartialEq)]
pub struct HullMembership {
    pub in_hull: bool,
    /// The cut vectors `x_k` whose matrices `x_k x_k^T` span the hull.
    pub vertices: Vec<Vec<i8>>,
    /// Convex weights on `vertices`, present iff `in_hull`.
    pub weights: Option<Vec<f64>>,
    /// Largest entrywise error of the weighted sum when `in_hull`; the
    /// phase-one infeasibility otherwise.
    pub residual: f64,
}

/// Decides whether `x` is a convex combination of cut matrices by solving
/// `sum_k theta_k V_k = X, theta >= 0, sum theta = 1` over the upper-triangular
/// coordinates.
pub fn mc_membership(x: &TaCandidate, n_cap: usize) -> Result<HullMembership> {
    let n = x.n();
    let cap = n_cap.min(MAX_HULL_N);
    if n > cap {
        return Err(Error::Resource(format!(
            "hull membership is limited to n <= {cap}, got {n}"
        )));
    }
    let vertices = cut_vertices(n);
    let mut rows = Vec::with_capacity(n * (n - 1) / 2 + 1);
    let mut rhs = Vec::with_capacity(rows.capacity());
    for i in 0..n {
        for j in (i + 1)..n {
            rows.push(vertices.iter().map(|v| f64::from(v[i] * v[j])).collect());
            rhs.push(x.matrix().get(i, j));
        }
    }
    rows.push(vec![1.0; vertices.len()]);
    rhs.push(1.0);

    let sol = phase_one(&rows, &rhs)?;
    if !sol.feasible(HULL_FEASIBILITY_TOL) {
        return Ok(HullMembership {
            in_hull: false,
            vertices,
            weights: None,
            residual: sol.infeasibility,
        });
    }
    let residual = rows
        .iter()
        .zip(&rhs)
        .map(|(row, b)| (row.iter().zip(&sol.x).map(|(a, t)| a * t).sum::<f64>() - b).abs())
        .fold(0.0, f64::max);
    Ok(HullMembership {
        in_hull: true,
        vertices,
        weights: Some(sol.x),
        residual,
    })
}

/// Triangle inequalities of the cut polytope for every triple; returns the
/// largest violation (0 if all hold). Used as a cross-check on [`mc_membership`].
pub fn max_triangle_violation(x: &SymMatrix) -> f64 {
    let n = x.n();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (a, b, c) = (x.get(i, j), x.get(i, k), x.get(j, k));
                for s in [a + b + c, a - b - c, -a + b - c, -a - b + c] {
                    worst = worst.max(-1.0 - s);
                }
            }
        }
    }
    worst
}

/// Sign vector validation re-exported for callers building cuts by hand.
pub fn validate_cut(x: &[i8], n: usize) -> Result<()> {
    check_signs(x)?;
    if x.len() != n {
        return input(format!("cut has {} entries, expected {n}", x.len()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rank1_cut_matrix;

    fn triangle() -> Graph {
        Graph::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn identity_objective() {
        let r = brute_force_opt(&CutInstance::new(SymMatrix::identity(3))).unwrap();
        assert_eq!(r.optimum, 3.0);
        assert_eq!(r.evaluations, 4);
        assert_eq!(r.argmax[0], 1);
    }

    #[test]
    fn two_by_two() {
        let a = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let r = brute_force_opt(&CutInstance::new(a)).unwrap();
        assert_eq!(r.optimum, 2.0);
        assert_eq!(r.argmax, vec![1, 1]);
    }

    #[test]
    fn single_vertex() {
        let r = brute_force_opt(&CutInstance::new(SymMatrix::identity(1))).unwrap();
        assert_eq!((r.optimum, r.evaluations), (1.0, 1));
    }

    #[test]
    fn cut_value_identity() {
        let g = triangle();
        let inst = graph_to_objective(&g, ObjectiveForm::CutValue).unwrap();
        assert_eq!(inst.evaluate(&[1, 1, -1]), 2.0);
        assert_eq!(inst.evaluate(&[1, 1, 1]), 0.0);
        for x in cut_vertices(3) {
            assert_eq!(inst.evaluate(&x), g.cut_value(&x));
        }
        let r = brute_force_opt(&inst).unwrap();
        assert_eq!(r.optimum, 2.0);
        // Ties broken toward the smallest vector: (1, -1, -1).
        assert_eq!(r.argmax, vec![1, -1, -1]);

        let edge = graph_to_objective(&Graph::new(2, vec![(0, 1, 1.0)]).unwrap(), ObjectiveForm::CutValue).unwrap();
        assert_eq!(edge.evaluate(&[1, -1]), 1.0);
    }

    #[test]
    fn quadratic_form() {
        let inst = graph_to_objective(&triangle(), ObjectiveForm::Quadratic).unwrap();
        assert_eq!(inst.constant, 0.0);
        assert_eq!(inst.evaluate(&[1, 1, 1]), 6.0);
    }

    #[test]
    fn folding_gives_laplacian() {
        let inst = graph_to_objective(&triangle(), ObjectiveForm::CutValue).unwrap();
        let folded = inst.fold_constant();
        assert_eq!(folded.constant, 0.0);
        assert_eq!(folded.a.diagonal(), vec![0.5; 3]);
        for x in cut_vertices(3) {
            assert_eq!(folded.evaluate(&x), inst.evaluate(&x));
        }
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(2, vec![(0, 0, 1.0)]).is_err());
        assert!(Graph::new(2, vec![(0, 2, 1.0)]).is_err());
        assert!(Graph::new(0, vec![]).is_err());
    }

    #[test]
    fn rudy_parsing() {
        let g = Graph::parse_rudy("# triangle\n3 3\n1 2 1\n1 3 1.5\n\n2 3 -2\n").unwrap();
        assert_eq!(g.edges, vec![(0, 1, 1.0), (0, 2, 1.5), (1, 2, -2.0)]);
        assert_eq!(Graph::parse_rudy(&g.to_rudy()).unwrap(), g);

        let e = Graph::parse_rudy("3 1\n1 1 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 3, .. }), "{e}");
        let e = Graph::parse_rudy("3 1\n1 4 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 3, .. }), "{e}");
        let e = Graph::parse_rudy("3 2\n1 2 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = Graph::parse_rudy("3 1\n1 2 x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 5, .. }), "{e}");
        assert!(Graph::parse_rudy("3\n").is_err());
        assert!(Graph::parse_rudy("3 1\n1 2 1\n2 3 1\n").is_err());
    }

    #[test]
    fn hull_vertex() {
        let x = rank1_cut_matrix(&[1, -1, -1, 1]).unwrap();
        let h = mc_membership(&TaCandidate::new(x.into_matrix()).unwrap(), 5).unwrap();
        assert!(h.in_hull);
        let w = h.weights.unwrap();
        let k = h.vertices.iter().position(|v| v == &vec![1, -1, -1, 1]).unwrap();
        assert!((w[k] - 1.0).abs() < 1e-12);
        assert!(h.residual < 1e-12);
    }

    #[test]
    fn hull_identity() {
        let h = mc_membership(&TaCandidate::identity(3), 5).unwrap();
        assert!(h.in_hull);
        let w = h.weights.unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(w.iter().all(|&t| t >= -1e-10));
        // Reassemble I from the weights.
        for i in 0..3 {
            for j in (i + 1)..3 {
                let s: f64 = h.vertices.iter().zip(&w).map(|(v, t)| t * f64::from(v[i] * v[j])).sum();
                assert!(s.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hull_rejects_triangle_violation() {
        let m = SymMatrix::from_upper_fn(3, |i, j| if i == j { 1.0 } else { -0.5 }).unwrap();
        assert!((max_triangle_violation(&m) - 0.5).abs() < 1e-15);
        let h = mc_membership(&TaCandidate::new(m).unwrap(), 5).unwrap();
        assert!(!h.in_hull);
        assert!(h.weights.is_none());
        assert!(h.residual > 1e-3);
    }

    #[test]
    fn hull_cap() {
        assert!(matches!(
            mc_membership(&TaCandidate::identity(6), 5),
            Err(Error::Resource(_))
        ));
        assert!(mc_membership(&TaCandidate::identity(6), 6).is_ok());
        assert!(matches!(
            brute_force_opt(&CutInstance::new(SymMatrix::identity(25))),
            Err(Error::Resource(_))
        ));
    }
}
