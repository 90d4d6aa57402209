//! Dirichlet versus Neumann restrictions along an exhaustion.
//!
//! On a finite host both restrictions agree once the subset is the whole
//! vertex set, so the gaps tabulated here only illustrate how the
//! discrepancy shrinks. They are not evidence for or against uniqueness on
//! infinite graphs.

use serde::Serialize;

use crate::bundle::{CMatrix, HermitianBundle};
use crate::error::{Error, Result};
use crate::form::{assemble_magnetic_form, assemble_scalar_form, FormOperator};
use crate::graph::{VertexSubset, WeightedGraph};
use crate::metric::{
    check_intrinsic, completeness_check, degree_bound_on_balls, path_metric, strongly_intrinsic_check,
    CutoffSequence, EdgeLengths,
};

/// Number of cutoffs used for the completeness criterion.
pub const CUTOFF_COUNT: usize = 16;

/// Radius of the distance ball used for the degree bound.
pub const DEGREE_BALL_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub k: usize,
    pub size: usize,
    pub scalar: f64,
    pub magnetic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criteria {
    pub intrinsic: bool,
    pub strongly_intrinsic: bool,
    /// Largest weighted degree on the neighborhood of the unit ball about vertex 0.
    pub degree_bounded: f64,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub label: String,
    pub gaps: Vec<GapRow>,
    pub criteria: Criteria,
    pub scalar_strictly_decreasing: bool,
    pub magnetic_decreasing: bool,
    /// `max_k magnetic(k) / scalar(k)` over steps with a nonzero scalar gap.
    pub transfer_constant: Option<f64>,
}

/// `‖(A^D + 1)^{-1} − (A^N + 1)^{-1}‖` in `ℓ²(Ω, m)`.
///
/// Both operators live on the same subset with the same measure, so the norm
/// is the largest eigenvalue modulus of the difference of the symmetrized
/// resolvents. Zero extension to the host leaves it unchanged.
fn resolvent_gap(dirichlet: &FormOperator, neumann: &FormOperator) -> f64 {
    let sym_resolvent = |f: &FormOperator| -> CMatrix {
        let s = f.spectral();
        let mut scaled = s.eigenvectors.clone();
        for (mut col, &mu) in scaled.column_iter_mut().zip(&s.eigenvalues) {
            col *= num_complex::Complex64::new(1.0 / (mu + 1.0), 0.0);
        }
        scaled * s.eigenvectors.adjoint()
    };
    let mut diff = sym_resolvent(dirichlet) - sym_resolvent(neumann);
    // enforce exact Hermitian symmetry before the eigen solve
    let adj = diff.adjoint();
    diff = (diff + adj).scale(0.5);
    diff.symmetric_eigenvalues()
        .iter()
        .fold(0.0, |acc: f64, e| acc.max(e.abs()))
}

fn scalar_gap(host: &WeightedGraph, subset: &VertexSubset) -> Result<f64> {
    if subset.is_empty() {
        return Ok(0.0);
    }
    let d = assemble_scalar_form(&host.restrict_dirichlet(subset))?;
    let n = assemble_scalar_form(&host.restrict_neumann(subset))?;
    Ok(resolvent_gap(&d, &n))
}

fn magnetic_gap(bundle: &HermitianBundle, subset: &VertexSubset) -> Result<f64> {
    if subset.is_empty() {
        return Ok(0.0);
    }
    let d = assemble_magnetic_form(&bundle.restrict_dirichlet(subset))?;
    let n = assemble_magnetic_form(&bundle.restrict_neumann(subset))?;
    Ok(resolvent_gap(&d, &n))
}

/// Intrinsic-metric criteria on the host, using the degree-adapted edge
/// lengths and their path metric.
pub fn host_criteria(graph: &WeightedGraph) -> Result<Criteria> {
    let sigma = EdgeLengths::degree_adapted(graph);
    let d = path_metric(graph, &sigma);
    let cutoffs = CutoffSequence::from_distance(&d, 0, CUTOFF_COUNT);
    Ok(Criteria {
        intrinsic: check_intrinsic(graph, &d)?.passed,
        strongly_intrinsic: strongly_intrinsic_check(graph, &sigma).passed,
        degree_bounded: degree_bound_on_balls(graph, &d, &[DEGREE_BALL_RADIUS])[0],
        complete: completeness_check(graph, &cutoffs)?.complete,
    })
}

/// Tabulates scalar and magnetic resolvent gaps along nested subsets of the
/// bundle's graph.
pub fn exhaustion_uniqueness_experiment(
    bundle: &HermitianBundle,
    subsets: &[VertexSubset],
) -> Result<UniquenessReport> {
    let host = bundle.graph();
    for (step, s) in subsets.iter().enumerate() {
        if s.host_size() != host.n() {
            return Err(Error::InvalidSubset(format!(
                "subset {step} belongs to a host with {} vertices, expected {}",
                s.host_size(),
                host.n()
            )));
        }
        if step > 0 && !subsets[step - 1].is_subset_of(s) {
            return Err(Error::NotNested { step });
        }
    }
    let gaps = subsets
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(GapRow {
                k: i + 1,
                size: s.len(),
                scalar: scalar_gap(host, s)?,
                magnetic: magnetic_gap(bundle, s)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let scalar_strictly_decreasing = gaps.windows(2).all(|w| w[1].scalar < w[0].scalar);
    let magnetic_decreasing = gaps.windows(2).all(|w| w[1].magnetic < w[0].magnetic);
    let transfer_constant = gaps
        .iter()
        .filter(|r| r.scalar > 0.0)
        .map(|r| r.magnetic / r.scalar)
        .reduce(f64::max);
    Ok(UniquenessReport {
        label: "illustrative".into(),
        gaps,
        criteria: host_criteria(host)?,
        scalar_strictly_decreasing,
        magnetic_decreasing,
        transfer_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn path(n: usize) -> Arc<WeightedGraph> {
        let edges: Vec<_> = (0..n - 1).map(|x| (x, x + 1, 1.0)).collect();
        Arc::new(WeightedGraph::new(n, edges, vec![0.0; n], (0..n).map(|x| 1.0 + x as f64).collect()).unwrap())
    }

    #[test]
    fn full_host_has_zero_gap() {
        let g = path(6);
        let bundle = HermitianBundle::trivial(g.clone(), 2);
        let r = exhaustion_uniqueness_experiment(&bundle, &[VertexSubset::all(&g)]).unwrap();
        assert!(r.gaps[0].scalar <= 1e-12 && r.gaps[0].magnetic <= 1e-12);
        assert_eq!(r.label, "illustrative");
    }

    #[test]
    fn gaps_shrink_on_growing_prefixes() {
        let g = path(20);
        let bundle = HermitianBundle::scalar(g.clone());
        let subsets: Vec<_> = [5, 10, 15, 20].iter().map(|&k| VertexSubset::prefix(&g, k).unwrap()).collect();
        let r = exhaustion_uniqueness_experiment(&bundle, &subsets).unwrap();
        assert!(r.scalar_strictly_decreasing && r.magnetic_decreasing, "{r:?}");
        for row in &r.gaps[..3] {
            assert!((row.scalar - row.magnetic).abs() < 1e-12);
        }
        assert!(r.criteria.strongly_intrinsic && r.criteria.intrinsic && r.criteria.complete);
    }

    #[test]
    fn non_nested_subsets_are_rejected() {
        let g = path(5);
        let bundle = HermitianBundle::scalar(g.clone());
        let a = VertexSubset::new(&g, [0, 1]).unwrap();
        let b = VertexSubset::new(&g, [1, 2, 3]).unwrap();
        assert!(matches!(
            exhaustion_uniqueness_experiment(&bundle, &[a, b]),
            Err(Error::NotNested { step: 1 })
        ));
    }
}
