//! Pseudo-metrics on the vertex set and the conditions built on them:
//! intrinsic and strongly intrinsic metrics, path metrics, jump size,
//! cutoff sequences and degree bounds on balls.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Absolute tolerance for the intrinsic and completeness inequalities.
pub const METRIC_TOL: f64 = 1e-12;

/// A distance value, with `+∞` kept as its own variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    Finite(f64),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<f64> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Distance::Infinite)
    }

    fn add(self, other: Distance) -> Distance {
        match (self, other) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a + b),
            _ => Distance::Infinite,
        }
    }

    /// `self ≤ other + tol`
    fn le(self, other: Distance, tol: f64) -> bool {
        match (self, other) {
            (_, Distance::Infinite) => true,
            (Distance::Infinite, Distance::Finite(_)) => false,
            (Distance::Finite(a), Distance::Finite(b)) => a <= b + tol,
        }
    }
}

/// Symmetric distance matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoMetric {
    n: usize,
    d: Vec<Distance>,
}

impl PseudoMetric {
    /// Validates symmetry, zero diagonal, nonnegativity and the triangle
    /// inequality (to `1e-12`).
    pub fn new(rows: Vec<Vec<Distance>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::PreconditionViolated("distance matrix is not square".into()));
        }
        let metric = Self {
            n,
            d: rows.into_iter().flatten().collect(),
        };
        for x in 0..n {
            if metric.get(x, x) != Distance::Finite(0.0) {
                return Err(Error::PreconditionViolated(format!("d({x},{x}) is not 0")));
            }
            for y in 0..n {
                let dxy = metric.get(x, y);
                if dxy != metric.get(y, x) {
                    return Err(Error::PreconditionViolated(format!("d({x},{y}) ≠ d({y},{x})")));
                }
                if let Distance::Finite(v) = dxy {
                    if !(v >= 0.0) || !v.is_finite() {
                        return Err(Error::PreconditionViolated(format!("d({x},{y}) = {v}")));
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if !metric.get(x, z).le(metric.get(x, y).add(metric.get(y, z)), METRIC_TOL) {
                        return Err(Error::PreconditionViolated(format!(
                            "triangle inequality fails for ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        Ok(metric)
    }

    pub fn from_finite(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(Distance::Finite).collect())
                .collect(),
        )
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            d: vec![Distance::Finite(0.0); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize) -> Distance {
        self.d[x * self.n + y]
    }

    pub fn rows(&self) -> Vec<Vec<Distance>> {
        self.d.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }
}

/// Positive lengths on the edges of a graph, aligned with `graph.edges()`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeLengths {
    lengths: Vec<f64>,
}

impl EdgeLengths {
    pub fn new(graph: &WeightedGraph, lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() != graph.edges().len() {
            return Err(Error::DimensionMismatch {
                expected: graph.edges().len(),
                found: lengths.len(),
            });
        }
        if let Some(bad) = lengths.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::PreconditionViolated(format!("edge length {bad} is not positive")));
        }
        Ok(Self { lengths })
    }

    pub fn uniform(graph: &WeightedGraph, length: f64) -> Result<Self> {
        Self::new(graph, vec![length; graph.edges().len()])
    }

    /// `σ(x, y) = min(Deg(x)^{-1/2}, Deg(y)^{-1/2})`, so that `b(x,y)σ(x,y)²`
    /// is at most `b(x,y)/Deg` at both endpoints.
    pub fn degree_adapted(graph: &WeightedGraph) -> Self {
        let lengths = graph
            .edges()
            .iter()
            .map(|e| graph.weighted_degree(e.u).max(graph.weighted_degree(e.v)).powf(-0.5))
            .collect();
        Self { lengths }
    }

    /// Lengths given as a function of the edge endpoints `(u, v)`, `u < v`.
    pub fn from_fn(graph: &WeightedGraph, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::new(graph, graph.edges().iter().map(|e| f(e.u, e.v)).collect())
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntrinsicCheck {
    /// `1 − (1/m(x)) Σ_y b(x,y) ℓ(x,y)²` per vertex
    pub slacks: Vec<f64>,
    pub min_slack: f64,
    pub passed: bool,
}

fn intrinsic_from(graph: &WeightedGraph, sq_lengths: impl Iterator<Item = f64>) -> IntrinsicCheck {
    let mut energy = vec![0.0; graph.n()];
    for (e, l2) in graph.edges().iter().zip(sq_lengths) {
        energy[e.u] += e.weight * l2;
        energy[e.v] += e.weight * l2;
    }
    let slacks: Vec<f64> = energy.iter().zip(graph.measure()).map(|(s, m)| 1.0 - s / m).collect();
    let min_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    IntrinsicCheck {
        passed: min_slack >= -METRIC_TOL,
        slacks,
        min_slack,
    }
}

/// Whether `d` is intrinsic: `Σ_y b(x,y) d(x,y)² ≤ m(x)` at every vertex.
pub fn check_intrinsic(graph: &WeightedGraph, d: &PseudoMetric) -> Result<IntrinsicCheck> {
    if d.n() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            found: d.n(),
        });
    }
    let mut sq = Vec::with_capacity(graph.edges().len());
    for e in graph.edges() {
        match d.get(e.u, e.v) {
            Distance::Finite(v) => sq.push(v * v),
            Distance::Infinite => return Err(Error::InfiniteEdgeDistance { u: e.u, v: e.v }),
        }
    }
    Ok(intrinsic_from(graph, sq.into_iter()))
}

/// The same inequality with edge lengths in place of distances.
pub fn strongly_intrinsic_check(graph: &WeightedGraph, sigma: &EdgeLengths) -> IntrinsicCheck {
    intrinsic_from(graph, sigma.lengths.iter().map(|s| s * s))
}

/// All-pairs shortest paths over the edge lengths (Floyd–Warshall).
pub fn path_metric(graph: &WeightedGraph, sigma: &EdgeLengths) -> PseudoMetric {
    let n = graph.n();
    let mut d = vec![Distance::Infinite; n * n];
    for x in 0..n {
        d[x * n + x] = Distance::Finite(0.0);
    }
    for (e, &s) in graph.edges().iter().zip(&sigma.lengths) {
        if Distance::Finite(s).le(d[e.u * n + e.v], 0.0) {
            d[e.u * n + e.v] = Distance::Finite(s);
            d[e.v * n + e.u] = Distance::Finite(s);
        }
    }
    for k in 0..n {
        for x in 0..n {
            let dxk = d[x * n + k];
            if dxk.is_infinite() {
                continue;
            }
            for y in 0..n {
                let via = dxk.add(d[k * n + y]);
                if !d[x * n + y].le(via, 0.0) {
                    d[x * n + y] = via;
                }
            }
        }
    }
    // rounding can differ between the two orientations of a path
    for x in 0..n {
        for y in x + 1..n {
            d[y * n + x] = d[x * n + y];
        }
    }
    PseudoMetric { n, d }
}

/// `max_{b(x,y) > 0} d(x, y)`, and 0 on graphs without edges.
pub fn jump_size(graph: &WeightedGraph, d: &PseudoMetric) -> Distance {
    graph
        .edges()
        .iter()
        .map(|e| d.get(e.u, e.v))
        .fold(Distance::Finite(0.0), |acc, x| if acc.le(x, 0.0) { x } else { acc })
}

/// Nondecreasing functions `0 ≤ η_1 ≤ η_2 ≤ … ≤ 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffSequence {
    etas: Vec<Vec<f64>>,
}

impl CutoffSequence {
    pub fn new(etas: Vec<Vec<f64>>) -> Result<Self> {
        let n = etas.first().map_or(0, Vec::len);
        for (k, eta) in etas.iter().enumerate() {
            if eta.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: eta.len(),
                });
            }
            if let Some(x) = eta.iter().position(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::PreconditionViolated(format!(
                    "η_{}({x}) = {} is outside [0, 1]",
                    k + 1,
                    eta[x]
                )));
            }
            if k > 0 {
                if let Some(vertex) = (0..n).find(|&x| eta[x] < etas[k - 1][x]) {
                    return Err(Error::MonotonicityViolated { k: k + 1, vertex });
                }
            }
        }
        Ok(Self { etas })
    }

    /// `η_k(x) = (1 − d(base, x)/r_k)⁺` with `r_k = √k · max(1, R)`, where `R`
    /// is the largest finite distance from `base`. Each `η_k` has energy
    /// density at most `1/r_k² ≤ 1/k` when `d` is intrinsic.
    pub fn from_distance(d: &PseudoMetric, base: usize, count: usize) -> Self {
        let n = d.n();
        let radius = (0..n)
            .filter_map(|x| d.get(base, x).finite())
            .fold(1.0, f64::max);
        let etas = (1..=count)
            .map(|k| {
                let r = (k as f64).sqrt() * radius;
                (0..n)
                    .map(|x| match d.get(base, x) {
                        Distance::Finite(v) => (1.0 - v / r).max(0.0),
                        Distance::Infinite => 0.0,
                    })
                    .collect()
            })
            .collect();
        Self { etas }
    }

    pub fn etas(&self) -> &[Vec<f64>] {
        &self.etas
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    /// `max_x (1/m(x)) Σ_y b(x,y)|η_k(x) − η_k(y)|² − 1/k`, indexed by `k − 1`
    pub violations: Vec<f64>,
    /// `min_x η_K(x)`
    pub min_final: f64,
    pub complete: bool,
}

pub fn completeness_check(graph: &WeightedGraph, cutoffs: &CutoffSequence) -> Result<CompletenessReport> {
    let mut violations = Vec::with_capacity(cutoffs.etas.len());
    for (k, eta) in cutoffs.etas.iter().enumerate() {
        if eta.len() != graph.n() {
            return Err(Error::DimensionMismatch {
                expected: graph.n(),
                found: eta.len(),
            });
        }
        let mut energy = vec![0.0; graph.n()];
        for e in graph.edges() {
            let diff = eta[e.u] - eta[e.v];
            energy[e.u] += e.weight * diff * diff;
            energy[e.v] += e.weight * diff * diff;
        }
        let worst = energy
            .iter()
            .zip(graph.measure())
            .map(|(s, m)| s / m)
            .fold(f64::NEG_INFINITY, f64::max);
        violations.push(worst - 1.0 / (k + 1) as f64);
    }
    let min_final = cutoffs
        .etas
        .last()
        .map_or(1.0, |eta| eta.iter().copied().fold(1.0, f64::min));
    Ok(CompletenessReport {
        complete: violations.iter().all(|&v| v <= METRIC_TOL),
        violations,
        min_final,
    })
}

/// For each radius `r`: the largest weighted degree over the ball
/// `{x : d(0, x) ≤ r}` together with its graph neighbors.
pub fn degree_bound_on_balls(graph: &WeightedGraph, d: &PseudoMetric, r_list: &[f64]) -> Vec<f64> {
    r_list
        .iter()
        .map(|&r| {
            let mut hood = vec![false; graph.n()];
            for x in 0..graph.n() {
                if d.get(0, x).le(Distance::Finite(r), 0.0) {
                    hood[x] = true;
                    for (y, _) in graph.neighbors(x) {
                        hood[y] = true;
                    }
                }
            }
            (0..graph.n())
                .filter(|&x| hood[x])
                .map(|x| graph.weighted_degree(x))
                .fold(0.0, f64::max)
        })
        .collect()
}
