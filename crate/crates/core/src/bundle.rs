//! Hermitian vector bundles over a weighted graph.
//!
//! Every fiber is `ℂ^d` with the standard inner product. The connection is
//! stored once per edge `{x, y}` with `x < y` as the unitary `Φ_{x,y}: F_y → F_x`;
//! the reverse direction is its adjoint. `W` is a field of Hermitian positive
//! semidefinite endomorphisms.
//!
//! The symmetrization `S` is the pointwise fiber norm, `(Su)(x) = |u(x)|`, and
//! [`pair`] builds the partner `g · sgn u` used throughout the domination
//! machinery.

use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSubset, WeightedGraph};
use crate::section::{block_inner, block_norm, ScalarFunction, Section};

pub type CMatrix = DMatrix<Complex64>;

/// Max-norm tolerance for unitarity and positivity of bundle data.
pub const BUNDLE_TOL: f64 = 1e-10;

/// Tolerance used by [`check_paired`].
pub const PAIRING_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HermitianBundle {
    graph: Arc<WeightedGraph>,
    rank: usize,
    // aligned with graph.edges(): Φ_{u,v} for u < v
    connection: Vec<CMatrix>,
    endo: Vec<CMatrix>,
}

impl HermitianBundle {
    /// Checks shapes only; use [`validate_bundle`] for unitarity and positivity.
    pub fn new(
        graph: Arc<WeightedGraph>,
        rank: usize,
        connection: Vec<CMatrix>,
        endo: Vec<CMatrix>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Schema("bundle rank must be positive".into()));
        }
        if connection.len() != graph.edges().len() {
            return Err(Error::DimensionMismatch {
                expected: graph.edges().len(),
                found: connection.len(),
            });
        }
        if endo.len() != graph.n() {
            return Err(Error::DimensionMismatch {
                expected: graph.n(),
                found: endo.len(),
            });
        }
        for m in connection.iter().chain(&endo) {
            if m.shape() != (rank, rank) {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: if m.nrows() != rank { m.nrows() } else { m.ncols() },
                });
            }
        }
        Ok(Self {
            graph,
            rank,
            connection,
            endo,
        })
    }

    /// Identity connection and zero endomorphism.
    pub fn trivial(graph: Arc<WeightedGraph>, rank: usize) -> Self {
        let connection = vec![CMatrix::identity(rank, rank); graph.edges().len()];
        let endo = vec![CMatrix::zeros(rank, rank); graph.n()];
        Self {
            graph,
            rank,
            connection,
            endo,
        }
    }

    /// Rank-1 bundle with `Φ = 1` and `W(x) = c(x)`: the scalar form in bundle clothing.
    pub fn scalar(graph: Arc<WeightedGraph>) -> Self {
        let endo = graph
            .killing()
            .iter()
            .map(|&c| CMatrix::from_element(1, 1, Complex64::new(c, 0.0)))
            .collect();
        Self {
            connection: vec![CMatrix::identity(1, 1); graph.edges().len()],
            graph,
            rank: 1,
            endo,
        }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<WeightedGraph> {
        &self.graph
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Stored connection matrices, aligned with `graph().edges()`.
    pub fn connections(&self) -> &[CMatrix] {
        &self.connection
    }

    pub fn endo(&self, x: usize) -> &CMatrix {
        &self.endo[x]
    }

    pub fn endos(&self) -> &[CMatrix] {
        &self.endo
    }

    /// `Φ_{x,y}: F_y → F_x` for an edge `{x, y}`, `None` on non-edges.
    pub fn connection(&self, x: usize, y: usize) -> Option<CMatrix> {
        let idx = self.graph.edge_index(x, y)?;
        let phi = &self.connection[idx];
        Some(if x < y { phi.clone() } else { phi.adjoint() })
    }

    pub fn set_connection(&mut self, x: usize, y: usize, phi: CMatrix) -> Result<()> {
        let idx = self
            .graph
            .edge_index(x, y)
            .ok_or_else(|| Error::Schema(format!("connection given on non-edge ({x}, {y})")))?;
        if phi.shape() != (self.rank, self.rank) {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: phi.nrows(),
            });
        }
        self.connection[idx] = if x < y { phi } else { phi.adjoint() };
        Ok(())
    }

    pub fn set_endo(&mut self, x: usize, w: CMatrix) -> Result<()> {
        if w.shape() != (self.rank, self.rank) {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: w.nrows(),
            });
        }
        self.endo[x] = w;
        Ok(())
    }

    /// Gauge transform: `Φ_{x,y} ↦ U(x) Φ_{x,y} U(y)*`, `W(x) ↦ U(x) W(x) U(x)*`.
    pub fn gauge_transform(&self, unitaries: &[CMatrix]) -> HermitianBundle {
        assert_eq!(unitaries.len(), self.graph.n());
        let connection = self
            .graph
            .edges()
            .iter()
            .zip(&self.connection)
            .map(|(e, phi)| &unitaries[e.u] * phi * unitaries[e.v].adjoint())
            .collect();
        let endo = self
            .endo
            .iter()
            .zip(unitaries)
            .map(|(w, u)| u * w * u.adjoint())
            .collect();
        HermitianBundle {
            graph: self.graph.clone(),
            rank: self.rank,
            connection,
            endo,
        }
    }

    /// Bundle over the Dirichlet restriction: boundary edge weights are
    /// added to `W`, mirroring the killing-term folding on the graph.
    pub fn restrict_dirichlet(&self, subset: &VertexSubset) -> HermitianBundle {
        self.restrict(subset, true)
    }

    pub fn restrict_neumann(&self, subset: &VertexSubset) -> HermitianBundle {
        self.restrict(subset, false)
    }

    fn restrict(&self, subset: &VertexSubset, dirichlet: bool) -> HermitianBundle {
        let graph = if dirichlet {
            self.graph.restrict_dirichlet(subset)
        } else {
            self.graph.restrict_neumann(subset)
        };
        let local = subset.local_indices();
        let mut endo: Vec<CMatrix> = subset.members().iter().map(|&x| self.endo[x].clone()).collect();
        let mut connection = vec![CMatrix::identity(self.rank, self.rank); graph.edges().len()];
        for (e, phi) in self.graph.edges().iter().zip(&self.connection) {
            match (local[e.u], local[e.v]) {
                (Some(a), Some(b)) => {
                    // local order preserves host order, so a < b
                    let idx = graph.edge_index(a, b).expect("restricted edge");
                    connection[idx] = phi.clone();
                }
                (Some(a), None) | (None, Some(a)) if dirichlet => {
                    for i in 0..self.rank {
                        endo[a][(i, i)] += Complex64::new(e.weight, 0.0);
                    }
                }
                _ => {}
            }
        }
        HermitianBundle {
            graph: Arc::new(graph),
            rank: self.rank,
            connection,
            endo,
        }
    }

    pub fn to_spec(&self) -> BundleSpec {
        BundleSpec {
            rank: self.rank,
            connection: self
                .graph
                .edges()
                .iter()
                .zip(&self.connection)
                .map(|(e, phi)| ConnectionSpec {
                    u: e.u,
                    v: e.v,
                    matrix: matrix_to_pairs(phi),
                })
                .collect(),
            endo: Some(self.endo.iter().map(matrix_to_pairs).collect()),
        }
    }
}

/// Per-edge unitarity defect.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeDefect {
    pub u: usize,
    pub v: usize,
    pub unitarity_defect: f64,
}

/// Per-vertex spectral data of `W(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexDefect {
    pub vertex: usize,
    pub hermitian_defect: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BundleReport {
    pub passed: bool,
    pub edges: Vec<EdgeDefect>,
    pub vertices: Vec<VertexDefect>,
}

impl BundleReport {
    pub fn worst_unitarity_defect(&self) -> f64 {
        self.edges.iter().map(|e| e.unitarity_defect).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in &self.edges {
            if !(e.unitarity_defect <= BUNDLE_TOL) {
                out.push(format!(
                    "connection on edge ({}, {}) is not unitary: ‖Φ*Φ − I‖_max = {:e}",
                    e.u, e.v, e.unitarity_defect
                ));
            }
        }
        for v in &self.vertices {
            if !(v.hermitian_defect <= BUNDLE_TOL) {
                out.push(format!(
                    "W({}) is not Hermitian: ‖W − W*‖_max = {:e}",
                    v.vertex, v.hermitian_defect
                ));
            }
            if !(v.min_eigenvalue >= -BUNDLE_TOL) {
                out.push(format!(
                    "W({}) is not positive semidefinite: min eigenvalue {}",
                    v.vertex, v.min_eigenvalue
                ));
            }
        }
        out
    }
}

/// Unitarity of every stored `Φ` and positivity of every `W(x)`.
///
/// Always returns a report; `passed` is false when any check fails.
pub fn validate_bundle(bundle: &HermitianBundle) -> BundleReport {
    let d = bundle.rank;
    let identity = CMatrix::identity(d, d);
    let edges: Vec<EdgeDefect> = bundle
        .graph
        .edges()
        .iter()
        .zip(&bundle.connection)
        .map(|(e, phi)| EdgeDefect {
            u: e.u,
            v: e.v,
            unitarity_defect: max_abs(&(phi.adjoint() * phi - &identity)),
        })
        .collect();
    let vertices: Vec<VertexDefect> = bundle
        .endo
        .iter()
        .enumerate()
        .map(|(vertex, w)| VertexDefect {
            vertex,
            hermitian_defect: max_abs(&(w - w.adjoint())),
            min_eigenvalue: min_eigenvalue(w),
        })
        .collect();
    let mut report = BundleReport {
        passed: true,
        edges,
        vertices,
    };
    report.passed = report.failures().is_empty();
    report
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    let herm = (m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn check_conforms(u: &Section, bundle: &HermitianBundle) -> Result<()> {
    if u.rank() != bundle.rank {
        return Err(Error::DimensionMismatch {
            expected: bundle.rank,
            found: u.rank(),
        });
    }
    if u.n() != bundle.graph.n() {
        return Err(Error::DimensionMismatch {
            expected: bundle.graph.n(),
            found: u.n(),
        });
    }
    Ok(())
}

/// The symmetrization `(Su)(x) = |u(x)|`.
pub fn symmetrize(u: &Section, bundle: &HermitianBundle) -> Result<ScalarFunction> {
    check_conforms(u, bundle)?;
    Ok(ScalarFunction::real(u.pointwise_norms()))
}

/// `g · sgn f1`, with `sgn` fixed to `e_1` where `f1` vanishes.
///
/// The result is paired with `f1` and has `S(f2) = g`.
pub fn pair(f1: &Section, g: &ScalarFunction, bundle: &HermitianBundle) -> Result<Section> {
    check_conforms(f1, bundle)?;
    if g.len() != f1.n() {
        return Err(Error::DimensionMismatch {
            expected: f1.n(),
            found: g.len(),
        });
    }
    let g = g.to_real()?;
    if let Some((vertex, &value)) = g.iter().enumerate().find(|(_, &v)| !(v >= 0.0)) {
        return Err(Error::NegativeG { vertex, value });
    }
    Ok(pair_unchecked(f1, &g))
}

pub(crate) fn pair_unchecked(f1: &Section, g: &[f64]) -> Section {
    let d = f1.rank();
    let mut f2 = Section::zeros(f1.n(), d);
    for (x, &gx) in g.iter().enumerate() {
        if gx == 0.0 {
            continue;
        }
        let block = f1.block(x);
        let norm = block_norm(block);
        let out = f2.block_mut(x);
        if norm > 0.0 {
            let scale = gx / norm;
            for (o, z) in out.iter_mut().zip(block) {
                *o = z * scale;
            }
        } else {
            out[0] = Complex64::new(gx, 0.0);
        }
    }
    f2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingCheck {
    pub paired: bool,
    pub worst_vertex: usize,
    /// `max_x |f1(x)||f2(x)| − Re⟨f1(x), f2(x)⟩`
    pub defect: f64,
}

/// Pointwise alignment test `⟨f1(x), f2(x)⟩ = |f1(x)||f2(x)|`.
pub fn check_paired(f1: &Section, f2: &Section) -> Result<PairingCheck> {
    if f1.values().len() != f2.values().len() || f1.rank() != f2.rank() {
        return Err(Error::DimensionMismatch {
            expected: f1.values().len(),
            found: f2.values().len(),
        });
    }
    let mut worst_vertex = 0;
    let mut defect = 0.0;
    for (x, (a, b)) in f1.blocks().zip(f2.blocks()).enumerate() {
        let gap = block_norm(a) * block_norm(b) - block_inner(a, b).re;
        if gap > defect {
            defect = gap;
            worst_vertex = x;
        }
    }
    Ok(PairingCheck {
        paired: defect <= PAIRING_TOL,
        worst_vertex,
        defect,
    })
}

/// JSON bundle document. Missing connection entries default to the identity,
/// a missing `endo` to zero matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    pub rank: usize,
    #[serde(default)]
    pub connection: Vec<ConnectionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endo: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    pub u: usize,
    pub v: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

fn matrix_from_pairs(rows: &[Vec<[f64; 2]>], rank: usize) -> Result<CMatrix> {
    if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
        return Err(Error::Schema(format!("expected a {rank}×{rank} matrix")));
    }
    Ok(CMatrix::from_fn(rank, rank, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

fn matrix_to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl BundleSpec {
    pub fn build(&self, graph: Arc<WeightedGraph>) -> Result<HermitianBundle> {
        if self.rank == 0 {
            return Err(Error::Schema("bundle rank must be positive".into()));
        }
        let n = graph.n();
        let mut bundle = HermitianBundle::trivial(graph, self.rank);
        let mut seen = std::collections::HashSet::new();
        for entry in &self.connection {
            if entry.u >= n || entry.v >= n {
                return Err(Error::Schema(format!(
                    "connection entry ({}, {}) out of range",
                    entry.u, entry.v
                )));
            }
            if !seen.insert((entry.u.min(entry.v), entry.u.max(entry.v))) {
                return Err(Error::Schema(format!(
                    "connection on ({}, {}) given twice",
                    entry.u, entry.v
                )));
            }
            let phi = matrix_from_pairs(&entry.matrix, self.rank)?;
            bundle.set_connection(entry.u, entry.v, phi)?;
        }
        if let Some(endo) = &self.endo {
            if endo.len() != n {
                return Err(Error::Schema(format!(
                    "\"endo\" has {} entries but n = {n}",
                    endo.len()
                )));
            }
            for (x, rows) in endo.iter().enumerate() {
                bundle.set_endo(x, matrix_from_pairs(rows, self.rank)?)?;
            }
        }
        Ok(bundle)
    }
}

pub fn load_bundle(json: &str, graph: Arc<WeightedGraph>) -> Result<HermitianBundle> {
    let spec: BundleSpec = serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    spec.build(graph)
}

pub fn load_bundle_file(path: impl AsRef<Path>, graph: Arc<WeightedGraph>) -> Result<HermitianBundle> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    load_bundle(&text, graph)
}
