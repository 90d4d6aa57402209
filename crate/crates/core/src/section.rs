//! Scalar functions on vertices and sections of a vector bundle.
//!
//! Inner products are linear in the first argument:
//! `⟨u, v⟩_m = Σ_x m(x) ⟨u(x), v(x)⟩` with `⟨a, b⟩ = Σ_i a_i conj(b_i)`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Vertex-indexed scalar values, real or complex.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFunction {
    values: Vec<Complex64>,
}

impl ScalarFunction {
    pub fn real(values: impl IntoIterator<Item = f64>) -> Self {
        Self {
            values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn complex(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self::real(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self::real(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Real parts, failing if any imaginary part is nonzero.
    pub fn to_real(&self) -> Result<Vec<f64>> {
        self.values
            .iter()
            .enumerate()
            .map(|(vertex, z)| {
                if z.im != 0.0 {
                    Err(Error::ComplexInput { vertex })
                } else {
                    Ok(z.re)
                }
            })
            .collect()
    }

    /// Real parts without checking the imaginary parts.
    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.values)
    }

    pub fn from_vector(v: &DVector<Complex64>) -> Self {
        Self {
            values: v.iter().copied().collect(),
        }
    }

    pub fn inner(&self, other: &ScalarFunction, measure: &[f64]) -> Complex64 {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .zip(measure)
            .map(|((a, b), m)| a * b.conj() * *m)
            .sum()
    }

    pub fn norm(&self, measure: &[f64]) -> f64 {
        self.inner(self, measure).re.max(0.0).sqrt()
    }
}

/// A section `u` with blocks `u(x) ∈ ℂ^d`, stored contiguously vertex by vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    rank: usize,
    values: Vec<Complex64>,
}

impl Section {
    pub fn new(rank: usize, values: Vec<Complex64>) -> Result<Self> {
        if rank == 0 || !values.len().is_multiple_of(rank) {
            return Err(Error::PreconditionViolated(format!(
                "section length {} is not a multiple of rank {rank}",
                values.len()
            )));
        }
        Ok(Self { rank, values })
    }

    pub fn zeros(n: usize, rank: usize) -> Self {
        Self {
            rank,
            values: vec![Complex64::new(0.0, 0.0); n * rank],
        }
    }

    pub fn from_blocks(rank: usize, blocks: &[Vec<Complex64>]) -> Result<Self> {
        let mut values = Vec::with_capacity(blocks.len() * rank);
        for block in blocks {
            if block.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: block.len(),
                });
            }
            values.extend_from_slice(block);
        }
        Ok(Self { rank, values })
    }

    /// Rank-1 section with the given values.
    pub fn scalar(values: impl IntoIterator<Item = Complex64>) -> Self {
        Self {
            rank: 1,
            values: values.into_iter().collect(),
        }
    }

    /// Embeds `u` as `u · e_1` in a rank-`rank` bundle.
    pub fn embed(u: &ScalarFunction, rank: usize) -> Self {
        let mut s = Self::zeros(u.len(), rank);
        for (x, z) in u.values().iter().enumerate() {
            s.values[x * rank] = *z;
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.values.len() / self.rank
    }

    pub fn block(&self, x: usize) -> &[Complex64] {
        &self.values[x * self.rank..(x + 1) * self.rank]
    }

    pub fn block_mut(&mut self, x: usize) -> &mut [Complex64] {
        &mut self.values[x * self.rank..(x + 1) * self.rank]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[Complex64]> {
        self.values.chunks_exact(self.rank)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.values)
    }

    pub fn from_vector(rank: usize, v: &DVector<Complex64>) -> Result<Self> {
        Self::new(rank, v.iter().copied().collect())
    }

    /// Fiberwise norms `|u(x)|`.
    pub fn pointwise_norms(&self) -> Vec<f64> {
        self.blocks().map(block_norm).collect()
    }

    pub fn inner(&self, other: &Section, measure: &[f64]) -> Complex64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.blocks()
            .zip(other.blocks())
            .zip(measure)
            .map(|((a, b), m)| block_inner(a, b) * *m)
            .sum()
    }

    pub fn norm(&self, measure: &[f64]) -> f64 {
        self.inner(self, measure).re.max(0.0).sqrt()
    }

    pub fn scale(&self, alpha: Complex64) -> Section {
        Section {
            rank: self.rank,
            values: self.values.iter().map(|z| z * alpha).collect(),
        }
    }

    pub fn add(&self, other: &Section) -> Section {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Section) -> Section {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Section, f: impl Fn(Complex64, Complex64) -> Complex64) -> Section {
        assert_eq!(self.values.len(), other.values.len(), "section size mismatch");
        assert_eq!(self.rank, other.rank, "section rank mismatch");
        Section {
            rank: self.rank,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

pub(crate) fn block_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub(crate) fn block_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
