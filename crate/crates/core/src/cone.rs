//! Order structure of the weighted orthant `ℓ²(X, m)⁺`.
//!
//! The orthant is a self-dual isotone projection cone, so the metric
//! projection onto it is the pointwise positive part and lattice operations
//! can be written through `|·|`. On top of that sits the projection onto the
//! domination set
//!
//! ```text
//! C = { (u, v) ∈ ℓ²(m; F) ⊕ ℓ²(m) : S(u) ≤ v }
//! ```
//!
//! which is what ties semigroup domination to invariance of a convex set.

use crate::bundle::{pair, pair_unchecked, HermitianBundle};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::section::{ScalarFunction, Section};

/// The orthant in `ℓ²(X, m)` together with its inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeContext {
    measure: Vec<f64>,
}

impl ConeContext {
    pub fn new(graph: &WeightedGraph) -> Self {
        Self {
            measure: graph.measure().to_vec(),
        }
    }

    pub fn from_measure(measure: Vec<f64>) -> Self {
        assert!(measure.iter().all(|&m| m > 0.0), "measure must be positive");
        Self { measure }
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter()
            .zip(g)
            .zip(&self.measure)
            .map(|((a, b), m)| a * b * m)
            .sum()
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.measure.len() {
            return Err(Error::DimensionMismatch {
                expected: self.measure.len(),
                found: len,
            });
        }
        Ok(())
    }
}

fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// `g⁺ = g ∨ 0`.
pub fn positive_part(g: &ScalarFunction) -> Result<ScalarFunction> {
    Ok(ScalarFunction::real(g.to_real()?.into_iter().map(pos)))
}

/// `g⁻ = (−g) ∨ 0`.
pub fn negative_part(g: &ScalarFunction) -> Result<ScalarFunction> {
    Ok(ScalarFunction::real(g.to_real()?.into_iter().map(|x| pos(-x))))
}

/// `|g| = g⁺ + g⁻`.
pub fn abs(g: &ScalarFunction) -> Result<ScalarFunction> {
    Ok(ScalarFunction::real(
        g.to_real()?.into_iter().map(|x| pos(x) + pos(-x)),
    ))
}

/// Moreau decomposition `g = h1 − h2` with `h1 = P(g)`, `h2 = P(−g)` and
/// `⟨h1, h2⟩_m = 0`.
pub fn moreau_decompose(
    g: &ScalarFunction,
    ctx: &ConeContext,
) -> Result<(ScalarFunction, ScalarFunction)> {
    ctx.check_len(g.len())?;
    Ok((positive_part(g)?, negative_part(g)?))
}

fn real_pair(f: &ScalarFunction, g: &ScalarFunction) -> Result<(Vec<f64>, Vec<f64>)> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    Ok((f.to_real()?, g.to_real()?))
}

pub(crate) fn sup(f: &[f64], g: &[f64]) -> Vec<f64> {
    f.iter()
        .zip(g)
        .map(|(a, b)| 0.5 * (a + b + (a - b).abs()))
        .collect()
}

pub(crate) fn inf(f: &[f64], g: &[f64]) -> Vec<f64> {
    f.iter()
        .zip(g)
        .map(|(a, b)| 0.5 * (a + b - (a - b).abs()))
        .collect()
}

/// `f ∨ g = ½(f + g + |f − g|)`.
pub fn lattice_sup(f: &ScalarFunction, g: &ScalarFunction) -> Result<ScalarFunction> {
    let (f, g) = real_pair(f, g)?;
    Ok(ScalarFunction::real(sup(&f, &g)))
}

/// `f ∧ g = ½(f + g − |f − g|)`.
pub fn lattice_inf(f: &ScalarFunction, g: &ScalarFunction) -> Result<ScalarFunction> {
    let (f, g) = real_pair(f, g)?;
    Ok(ScalarFunction::real(inf(&f, &g)))
}

fn check_section(f1: &Section, g: &ScalarFunction, bundle: &HermitianBundle, ctx: &ConeContext) -> Result<()> {
    ctx.check_len(g.len())?;
    ctx.check_len(f1.n())?;
    if f1.rank() != bundle.rank() {
        return Err(Error::DimensionMismatch {
            expected: bundle.rank(),
            found: f1.rank(),
        });
    }
    Ok(())
}

/// Metric projection of `(f1, g)` onto the domination set `C`:
///
/// `P_C(f1, g) = ½ (f2, (S(f1) ∨ g + g)⁺)` where `f2` is paired with `f1`
/// and `S(f2) = (S(f1) ∧ g + S(f1))⁺`.
pub fn project_c(
    f1: &Section,
    g: &ScalarFunction,
    bundle: &HermitianBundle,
    ctx: &ConeContext,
) -> Result<(Section, ScalarFunction)> {
    check_section(f1, g, bundle, ctx)?;
    let g = g.to_real()?;
    let s = f1.pointwise_norms();

    let weight: Vec<f64> = inf(&s, &g).iter().zip(&s).map(|(a, b)| pos(a + b)).collect();
    let f2 = pair_unchecked(f1, &weight);
    let v: Vec<f64> = sup(&s, &g)
        .iter()
        .zip(&g)
        .map(|(a, b)| 0.5 * pos(a + b))
        .collect();
    Ok((f2.scale(0.5.into()), ScalarFunction::real(v)))
}

/// Projection onto `C` for inputs with `0 ≤ g ≤ S(f1)`:
/// `P_C(f1, g) = ½ (f1 + f2, S(f1) + g)` with `f2 = g · sgn f1`.
pub fn project_c_halfsum(
    f1: &Section,
    g: &ScalarFunction,
    bundle: &HermitianBundle,
    ctx: &ConeContext,
) -> Result<(Section, ScalarFunction)> {
    check_section(f1, g, bundle, ctx)?;
    let gr = g.to_real()?;
    let s = f1.pointwise_norms();
    for (x, (&gx, &sx)) in gr.iter().zip(&s).enumerate() {
        if !(gx >= 0.0) {
            return Err(Error::PreconditionViolated(format!(
                "g({x}) = {gx} is negative"
            )));
        }
        if gx > sx {
            return Err(Error::PreconditionViolated(format!(
                "g({x}) = {gx} exceeds S(f1)({x}) = {sx}"
            )));
        }
    }
    let f2 = pair(f1, g, bundle)?;
    let u = f1.add(&f2).scale(0.5.into());
    let v = ScalarFunction::real(s.iter().zip(&gr).map(|(a, b)| 0.5 * (a + b)));
    Ok((u, v))
}

/// `max_x (S(u)(x) − v(x))`; nonpositive iff `(u, v) ∈ C`.
pub fn domination_set_excess(u: &Section, v: &[f64]) -> f64 {
    u.pointwise_norms()
        .iter()
        .zip(v)
        .map(|(s, v)| s - v)
        .fold(f64::NEG_INFINITY, f64::max)
}
