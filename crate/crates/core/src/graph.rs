//! Finite weighted graphs `(X, b, c, m)`.
//!
//! Edge weights are stored once per unordered pair, so `b(x, y)` and
//! `b(y, x)` read the same stored value. Row sums `Σ_y b(x, y)` are cached
//! at construction.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, InvariantError, Result};

/// An undirected edge with `u < v` and weight `b(u, v) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Weighted graph with symmetric edge weights, killing term and measure.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    // (neighbor, edge index), sorted by neighbor
    adjacency: Vec<Vec<(usize, usize)>>,
    killing: Vec<f64>,
    measure: Vec<f64>,
    row_sums: Vec<f64>,
}

impl WeightedGraph {
    /// Builds a graph from an edge list, checking every axiom.
    ///
    /// Zero-weight edges are accepted and dropped; they carry no edge.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        killing: Vec<f64>,
        measure: Vec<f64>,
    ) -> Result<Self, InvariantError> {
        if n == 0 {
            return Err(InvariantError::Empty);
        }
        assert_eq!(killing.len(), n, "killing term length must equal n");
        assert_eq!(measure.len(), n, "measure length must equal n");

        for (vertex, &value) in measure.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(InvariantError::MeasurePositivity { vertex, value });
            }
        }
        for (vertex, &value) in killing.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(InvariantError::KillingSign { vertex, value });
            }
        }

        let mut stored: Vec<Edge> = Vec::new();
        for (u, v, weight) in edges {
            if u >= n || v >= n {
                return Err(InvariantError::VertexOutOfRange { u, v, n });
            }
            if u == v {
                return Err(InvariantError::Loop { vertex: u });
            }
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(InvariantError::EdgeWeight { u, v, weight });
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            stored.push(Edge { u, v, weight });
        }
        stored.sort_by_key(|e| (e.u, e.v));
        if let Some(w) = stored.windows(2).find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(InvariantError::DuplicateEdge { u: w[0].u, v: w[0].v });
        }
        stored.retain(|e| e.weight > 0.0);

        let mut adjacency = vec![Vec::new(); n];
        let mut row_sums = vec![0.0; n];
        for (idx, e) in stored.iter().enumerate() {
            adjacency[e.u].push((e.v, idx));
            adjacency[e.v].push((e.u, idx));
            row_sums[e.u] += e.weight;
            row_sums[e.v] += e.weight;
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        Ok(Self {
            n,
            edges: stored,
            adjacency,
            killing,
            measure,
            row_sums,
        })
    }

    /// Graph with unit measure and no killing term.
    pub fn unweighted_vertices(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, InvariantError> {
        Self::new(n, edges, vec![0.0; n], vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `x` together with `b(x, y) > 0`.
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adjacency[x]
            .iter()
            .map(move |&(y, idx)| (y, self.edges[idx].weight))
    }

    /// Index into [`edges`](Self::edges) of the edge `{x, y}`, if present.
    pub fn edge_index(&self, x: usize, y: usize) -> Option<usize> {
        let list = &self.adjacency[x];
        list.binary_search_by_key(&y, |&(nb, _)| nb)
            .ok()
            .map(|pos| list[pos].1)
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.edge_index(x, y)
            .map_or(0.0, |idx| self.edges[idx].weight)
    }

    pub fn killing(&self) -> &[f64] {
        &self.killing
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    /// Cached `Σ_y b(x, y)`.
    pub fn row_sum(&self, x: usize) -> f64 {
        self.row_sums[x]
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    /// Weighted degree `Deg(x) = (Σ_y b(x, y) + c(x)) / m(x)`.
    pub fn weighted_degree(&self, x: usize) -> f64 {
        (self.row_sums[x] + self.killing[x]) / self.measure[x]
    }

    /// Same vertex data with every edge weight multiplied by `factor`.
    pub fn scale_weights(&self, factor: f64) -> Result<Self, InvariantError> {
        Self::new(
            self.n,
            self.edges.iter().map(|e| (e.u, e.v, e.weight * factor)),
            self.killing.clone(),
            self.measure.clone(),
        )
    }

    /// Same edges and measure with a different killing term.
    pub fn with_killing(&self, killing: Vec<f64>) -> Result<Self, InvariantError> {
        Self::new(
            self.n,
            self.edges.iter().map(|e| (e.u, e.v, e.weight)),
            killing,
            self.measure.clone(),
        )
    }

    /// Restriction to functions supported in `subset`: boundary edges are
    /// folded into the killing term, `c_Ω(x) = c(x) + Σ_{y∉Ω} b(x, y)`.
    pub fn restrict_dirichlet(&self, subset: &VertexSubset) -> WeightedGraph {
        self.restrict(subset, true)
    }

    /// Induced subgraph on `subset`; boundary edges are dropped.
    pub fn restrict_neumann(&self, subset: &VertexSubset) -> WeightedGraph {
        self.restrict(subset, false)
    }

    fn restrict(&self, subset: &VertexSubset, fold_boundary: bool) -> WeightedGraph {
        assert_eq!(subset.host_size(), self.n, "subset belongs to another graph");
        let local = subset.local_indices();
        let members = subset.members();

        let mut killing: Vec<f64> = members.iter().map(|&x| self.killing[x]).collect();
        let measure: Vec<f64> = members.iter().map(|&x| self.measure[x]).collect();
        let mut edges = Vec::new();
        for e in &self.edges {
            match (local[e.u], local[e.v]) {
                (Some(a), Some(b)) => edges.push((a, b, e.weight)),
                (Some(a), None) if fold_boundary => killing[a] += e.weight,
                (None, Some(b)) if fold_boundary => killing[b] += e.weight,
                _ => {}
            }
        }
        WeightedGraph::new(members.len(), edges, killing, measure)
            .expect("restriction of a valid graph is valid")
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    u: e.u,
                    v: e.v,
                    b: e.weight,
                })
                .collect(),
            killing: Some(self.killing.clone()),
            measure: Some(self.measure.clone()),
        }
    }
}

/// Sorted, duplicate-free, nonempty set of vertices of a host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSubset {
    host_size: usize,
    members: Vec<usize>,
}

impl VertexSubset {
    pub fn new(graph: &WeightedGraph, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::with_host_size(graph.n(), members)
    }

    pub fn with_host_size(host_size: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        if let Some(&bad) = members.iter().find(|&&x| x >= host_size) {
            return Err(Error::InvalidSubset(format!(
                "vertex {bad} out of range for a graph on {host_size} vertices"
            )));
        }
        Ok(Self { host_size, members })
    }

    /// The first `k` vertices `{0, …, k-1}`.
    pub fn prefix(graph: &WeightedGraph, k: usize) -> Result<Self> {
        if k > graph.n() {
            return Err(Error::InvalidSubset(format!("prefix {k} exceeds n = {}", graph.n())));
        }
        Self::new(graph, 0..k)
    }

    pub fn all(graph: &WeightedGraph) -> Self {
        Self {
            host_size: graph.n(),
            members: (0..graph.n()).collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn host_size(&self) -> usize {
        self.host_size
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &VertexSubset) -> bool {
        self.host_size == other.host_size && self.members.iter().all(|&x| other.contains(x))
    }

    /// Host index → position in the subset.
    pub fn local_indices(&self) -> Vec<Option<usize>> {
        let mut local = vec![None; self.host_size];
        for (i, &x) in self.members.iter().enumerate() {
            local[x] = Some(i);
        }
        local
    }
}

/// JSON graph document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub n: usize,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub killing: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub u: usize,
    pub v: usize,
    pub b: f64,
}

impl GraphSpec {
    pub fn build(&self) -> Result<WeightedGraph> {
        let killing = self.killing.clone().unwrap_or_else(|| vec![0.0; self.n]);
        let measure = self.measure.clone().unwrap_or_else(|| vec![1.0; self.n]);
        for (name, len) in [("killing", killing.len()), ("measure", measure.len())] {
            if len != self.n {
                return Err(Error::Schema(format!(
                    "\"{name}\" has {len} entries but n = {}",
                    self.n
                )));
            }
        }
        Ok(WeightedGraph::new(
            self.n,
            self.edges.iter().map(|e| (e.u, e.v, e.b)),
            killing,
            measure,
        )?)
    }
}

/// Parses and validates a graph document.
pub fn load_graph(json: &str) -> Result<WeightedGraph> {
    let spec: GraphSpec = serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    spec.build()
}

pub fn load_graph_file(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    load_graph(&text)
}
