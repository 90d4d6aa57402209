//! Magnetic Schrödinger forms on finite weighted graphs.
//!
//! A [`WeightedGraph`] carries edge weights, a killing term and a measure. A
//! [`bundle::HermitianBundle`] over it adds unitary edge matrices and a
//! vertex potential. [`form`] turns either into a Hermitian matrix, and
//! [`spectral`] computes semigroups and resolvents from its eigendecomposition.
//! [`domination`] compares a bundle form against a scalar form at the
//! semigroup, resolvent and form levels.
//!
//! ```
//! use mgl::fixtures::p2_flux_pi;
//! use mgl::form::assemble_magnetic_form;
//!
//! let form = assemble_magnetic_form(&p2_flux_pi()).unwrap();
//! assert!((form.spectral_radius() - 2.0).abs() < 1e-12);
//! ```
//!
//! The guide in `book/` walks through each module.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod cone;
pub mod domination;
pub mod error;
pub mod fixtures;
pub mod form;
pub mod graph;
pub mod metric;
pub mod quadrature;
pub mod random;
pub mod section;
pub mod spectral;
pub mod uniqueness;

pub use error::{Error, InvariantError, Result};
pub use graph::WeightedGraph;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/bundles.md")]
    mod bundles {}
    #[doc = include_str!("../../../book/src/cone.md")]
    mod cone {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/domination.md")]
    mod domination {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
