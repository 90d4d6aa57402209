//! Named graphs and bundles used by tests, examples and the CLI.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::bundle::{CMatrix, HermitianBundle};
use crate::form::{assemble_scalar_form, FormOperator};
use crate::graph::{VertexSubset, WeightedGraph};
use crate::random;

/// Unit path on two vertices.
pub fn p2() -> WeightedGraph {
    WeightedGraph::unweighted_vertices(2, [(0, 1, 1.0)]).unwrap()
}

/// Unit path on three vertices.
pub fn p3() -> WeightedGraph {
    WeightedGraph::unweighted_vertices(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
}

/// One vertex, no edges, killing `c`.
pub fn single_vertex(c: f64) -> WeightedGraph {
    WeightedGraph::new(1, [], vec![c], vec![1.0]).unwrap()
}

/// Rank-one bundle over P2 with `Φ_{0,1} = e^{iθ}` and `W = 0`.
pub fn p2_phase(theta: f64) -> HermitianBundle {
    let mut b = HermitianBundle::trivial(Arc::new(p2()), 1);
    b.set_connection(0, 1, CMatrix::from_element(1, 1, Complex64::from_polar(1.0, theta)))
        .unwrap();
    b
}

/// P2 with the connection `−1`.
pub fn p2_flux_pi() -> HermitianBundle {
    p2_phase(std::f64::consts::PI)
}

/// Unit P3 form with `+1/2` added at `(0, 2)` and `(2, 0)`. Its semigroup
/// does not preserve positivity.
pub fn perturbed_p3() -> FormOperator {
    let mut m = assemble_scalar_form(&p3()).unwrap().matrix().clone();
    m[(0, 2)] += Complex64::new(0.5, 0.0);
    m[(2, 0)] += Complex64::new(0.5, 0.0);
    FormOperator::from_matrix(m, vec![1.0; 3], 1).unwrap()
}

/// Each pair is an edge with probability `density`, weights uniform in
/// `[0.5, 2]`, measure uniform in `[0.5, 2]`. With `killing`, about half the
/// vertices get `c` uniform in `[0, 1]`.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64, killing: bool) -> WeightedGraph {
    let mut edges = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if rng.random::<f64>() < density {
                edges.push((x, y, rng.random_range(0.5..=2.0)));
            }
        }
    }
    let c = (0..n)
        .map(|_| if killing && rng.random::<bool>() { rng.random::<f64>() } else { 0.0 })
        .collect();
    let m = (0..n).map(|_| rng.random_range(0.5..=2.0)).collect();
    WeightedGraph::new(n, edges, c, m).unwrap()
}

/// Random spanning tree plus extra edges with probability `extra`; `c = 0`,
/// `m = 1`, weights uniform in `[0.5, 2]`.
pub fn random_connected<R: Rng + ?Sized>(rng: &mut R, n: usize, extra: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    for y in 1..n {
        let x = rng.random_range(0..y);
        edges.push((x, y, rng.random_range(0.5..=2.0)));
    }
    for x in 0..n {
        for y in x + 1..n {
            if !edges.iter().any(|&(a, b, _)| (a, b) == (x, y)) && rng.random::<f64>() < extra {
                edges.push((x, y, rng.random_range(0.5..=2.0)));
            }
        }
    }
    WeightedGraph::unweighted_vertices(n, edges).unwrap()
}

/// Random bundle satisfying `W(x) ⪰ c(x)`: `n` in `2..=60`, edge density 0.1,
/// rank in `1..=3`, Haar unitaries on edges and `W = c·I + PSD`.
pub fn random_diamagnetic<R: Rng + ?Sized>(rng: &mut R) -> HermitianBundle {
    let n = rng.random_range(2..=60);
    let rank = rng.random_range(1..=3);
    random_diamagnetic_with(rng, n, rank)
}

pub fn random_diamagnetic_with<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> HermitianBundle {
    let graph = Arc::new(random_graph(rng, n, 0.1, true));
    let mut bundle = HermitianBundle::trivial(graph.clone(), rank);
    for e in graph.edges() {
        bundle.set_connection(e.u, e.v, random::unitary(rng, rank)).unwrap();
    }
    for x in 0..n {
        let scale = rng.random::<f64>();
        let w = CMatrix::identity(rank, rank) * Complex64::new(graph.killing()[x], 0.0)
            + random::psd(rng, rank, scale);
        bundle.set_endo(x, w).unwrap();
    }
    bundle
}

/// A counterexample to domination: the trivial rank-one bundle over the
/// graph with doubled weights, together with the original graph.
pub struct DoubledWeights {
    pub bundle: HermitianBundle,
    pub dominating: WeightedGraph,
}

pub fn doubled_weights(graph: &WeightedGraph) -> DoubledWeights {
    let doubled = Arc::new(graph.scale_weights(2.0).unwrap());
    DoubledWeights {
        bundle: HermitianBundle::scalar(doubled),
        dominating: graph.clone(),
    }
}

/// Connected random graph on `2..=8` vertices, doubled.
pub fn random_doubled_weights<R: Rng + ?Sized>(rng: &mut R) -> DoubledWeights {
    let n = rng.random_range(2..=8);
    doubled_weights(&random_connected(rng, n, 0.3))
}

/// Path on 50 vertices, unit weights, no killing, `m(x) = 1 + x`.
pub fn exhaustion_path() -> WeightedGraph {
    let n = 50;
    let edges: Vec<_> = (0..n - 1).map(|x| (x, x + 1, 1.0)).collect();
    WeightedGraph::new(n, edges, vec![0.0; n], (0..n).map(|x| 1.0 + x as f64).collect()).unwrap()
}

/// Prefixes `{0, …, k−1}` for `k = 10, 20, 30, 40, 50`.
pub fn exhaustion_prefixes(graph: &WeightedGraph) -> Vec<VertexSubset> {
    (1..=5).map(|i| VertexSubset::prefix(graph, 10 * i).unwrap()).collect()
}

/// [`exhaustion_path`] with seeded random phases on its edges.
pub fn exhaustion_bundle() -> HermitianBundle {
    random_phases(&mut random::seeded(50), Arc::new(exhaustion_path()))
}

/// Rank-one bundle with independent uniform phases on the edges.
pub fn random_phases<R: Rng + ?Sized>(rng: &mut R, graph: Arc<WeightedGraph>) -> HermitianBundle {
    let mut bundle = HermitianBundle::scalar(graph.clone());
    for e in graph.edges() {
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        bundle
            .set_connection(e.u, e.v, CMatrix::from_element(1, 1, Complex64::from_polar(1.0, theta)))
            .unwrap();
    }
    bundle
}

/// Named scalar graphs covering the structural corner cases: single vertex,
/// killing, nonuniform measure, cycles, disconnected pieces and random graphs.
pub fn scalar_fixtures() -> Vec<(String, WeightedGraph)> {
    let mut out = vec![
        ("p2".to_string(), p2()),
        ("p3".to_string(), p3()),
        ("single vertex c=2".to_string(), single_vertex(2.0)),
        (
            "p2 killed".to_string(),
            WeightedGraph::new(2, [(0, 1, 1.0)], vec![1.0, 0.0], vec![1.0, 1.0]).unwrap(),
        ),
        (
            "p2 m=(2,4)".to_string(),
            WeightedGraph::new(2, [(0, 1, 1.0)], vec![0.0; 2], vec![2.0, 4.0]).unwrap(),
        ),
        (
            "triangle".to_string(),
            WeightedGraph::unweighted_vertices(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]).unwrap(),
        ),
        (
            "cycle 5".to_string(),
            WeightedGraph::unweighted_vertices(5, (0..5).map(|x| (x, (x + 1) % 5, 1.0))).unwrap(),
        ),
        (
            "star 6".to_string(),
            WeightedGraph::unweighted_vertices(6, (1..6).map(|y| (0, y, y as f64))).unwrap(),
        ),
        (
            "two components".to_string(),
            WeightedGraph::unweighted_vertices(4, [(0, 1, 1.0), (2, 3, 2.0)]).unwrap(),
        ),
    ];
    let mut rng = random::seeded(2024);
    for i in 0..6 {
        let n = rng.random_range(4..=20);
        out.push((format!("random {i}"), random_graph(&mut rng, n, 0.3, i % 2 == 1)));
    }
    out
}
