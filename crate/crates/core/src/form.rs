//! Assembled Hermitian forms and their generators.
//!
//! A [`FormOperator`] stores the form matrix `L` with `Q(u, v) = ⟨Lu, v⟩`
//! in the unweighted pairing, the vertex measure, and the spectral
//! decomposition of the measure-symmetrized generator
//! `A_sym = M^{-1/2} L M^{-1/2}`. The generator itself is `A = M^{-1} L`,
//! self-adjoint in `ℓ²(m)`, and every function of it is evaluated as
//! `M^{-1/2} U f(μ) U* M^{1/2}`.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::bundle::{max_abs, validate_bundle, CMatrix, HermitianBundle};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub type CVector = DVector<Complex64>;

/// Maximum Hermitian defect accepted by [`FormOperator::from_matrix`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigen-decomposition of `A_sym`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors of `A_sym`, one per column.
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    fn compute(sym: &CMatrix) -> Result<Self> {
        let dim = sym.nrows();
        let eig = SymmetricEigen::try_new(sym.clone(), f64::EPSILON, 0)
            .ok_or(Error::EigSolverFailure)?;
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = CMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    /// `‖U diag(μ) U* − A_sym‖_max`.
    pub fn reconstruction_error(&self, sym: &CMatrix) -> f64 {
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&m| Complex64::new(m, 0.0)),
        ));
        max_abs(&(&self.eigenvectors * diag * self.eigenvectors.adjoint() - sym))
    }
}

#[derive(Debug, Clone)]
pub struct FormOperator {
    matrix: CMatrix,
    rank: usize,
    measure: Vec<f64>,
    sqrt_m: Vec<f64>,
    inv_sqrt_m: Vec<f64>,
    symmetrized: CMatrix,
    spectral: SpectralDecomposition,
}

impl FormOperator {
    /// Wraps a Hermitian form matrix over `measure.len()` vertices with fibers of size `rank`.
    pub fn from_matrix(matrix: CMatrix, measure: Vec<f64>, rank: usize) -> Result<Self> {
        let dim = measure.len() * rank;
        if matrix.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        let defect = max_abs(&(&matrix - matrix.adjoint()));
        let scale = max_abs(&matrix).max(1.0);
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::PreconditionViolated(format!(
                "form matrix is not Hermitian (defect {defect:e})"
            )));
        }
        if let Some(m) = measure.iter().find(|&&m| !(m > 0.0)) {
            return Err(Error::PreconditionViolated(format!("measure entry {m} is not positive")));
        }
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);

        let sqrt_m: Vec<f64> = measure
            .iter()
            .flat_map(|&m| std::iter::repeat_n(m.sqrt(), rank))
            .collect();
        let inv_sqrt_m: Vec<f64> = sqrt_m.iter().map(|s| 1.0 / s).collect();
        let symmetrized = CMatrix::from_fn(dim, dim, |i, j| {
            matrix[(i, j)] * (inv_sqrt_m[i] * inv_sqrt_m[j])
        });
        let spectral = SpectralDecomposition::compute(&symmetrized)?;
        Ok(Self {
            matrix,
            rank,
            measure,
            sqrt_m,
            inv_sqrt_m,
            symmetrized,
            spectral,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.measure.len()
    }

    /// Total dimension `n · d`.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    /// `A_sym = M^{-1/2} L M^{-1/2}`.
    pub fn symmetrized(&self) -> &CMatrix {
        &self.symmetrized
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectral.eigenvalues
    }

    /// Bottom of the spectrum `λ`.
    pub fn lower_bound(&self) -> f64 {
        self.spectral.eigenvalues[0]
    }

    pub fn spectral_radius(&self) -> f64 {
        let ev = &self.spectral.eigenvalues;
        ev[0].abs().max(ev[ev.len() - 1].abs())
    }

    /// `A = M^{-1} L` as a dense matrix.
    pub fn generator_matrix(&self) -> CMatrix {
        let dim = self.dim();
        CMatrix::from_fn(dim, dim, |i, j| {
            self.matrix[(i, j)] / self.measure[i / self.rank]
        })
    }

    pub(crate) fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }

    /// `Q(u, v) = ⟨Lu, v⟩`, linear in `u` and antilinear in `v`.
    pub fn evaluate(&self, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
        self.check_dim(u.len())?;
        self.check_dim(v.len())?;
        let lu = &self.matrix * CVector::from_column_slice(u);
        Ok(lu.iter().zip(v).map(|(a, b)| a * b.conj()).sum())
    }

    /// `Q(u) = Q(u, u)`, real for Hermitian `L`.
    pub fn quadratic(&self, u: &[Complex64]) -> Result<f64> {
        Ok(self.evaluate(u, u)?.re)
    }

    /// `⟨u, v⟩_m` with the measure repeated over each fiber.
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        u.iter()
            .zip(v)
            .zip(&self.sqrt_m)
            .map(|((a, b), s)| a * b.conj() * (s * s))
            .sum()
    }

    pub fn norm(&self, u: &[Complex64]) -> f64 {
        self.inner(u, u).re.max(0.0).sqrt()
    }

    /// `f(A) u = M^{-1/2} U diag(f(μ)) U* M^{1/2} u`.
    pub fn apply_spectral(&self, u: &[Complex64], f: impl Fn(f64) -> f64) -> Result<CVector> {
        self.check_dim(u.len())?;
        let weighted = CVector::from_iterator(
            u.len(),
            u.iter().zip(&self.sqrt_m).map(|(z, s)| z * *s),
        );
        let vecs = &self.spectral.eigenvectors;
        let mut coeffs = vecs.ad_mul(&weighted);
        for (c, &mu) in coeffs.iter_mut().zip(&self.spectral.eigenvalues) {
            *c *= f(mu);
        }
        let mut out = vecs * coeffs;
        for (z, s) in out.iter_mut().zip(&self.inv_sqrt_m) {
            *z *= *s;
        }
        Ok(out)
    }

    /// Spectral coefficients `U* M^{1/2} X` of every column of `X`.
    pub fn spectral_coefficients(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check_dim(x.nrows())?;
        let mut weighted = x.clone();
        for (i, mut row) in weighted.row_iter_mut().enumerate() {
            row *= Complex64::new(self.sqrt_m[i], 0.0);
        }
        Ok(self.spectral.eigenvectors.ad_mul(&weighted))
    }

    /// `M^{-1/2} U diag(f(μ)) C`, the inverse of [`Self::spectral_coefficients`]
    /// composed with `f(A)`.
    pub fn synthesize(&self, coeffs: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = coeffs.clone();
        for (mut row, &mu) in scaled.row_iter_mut().zip(&self.spectral.eigenvalues) {
            row *= Complex64::new(f(mu), 0.0);
        }
        let mut out = &self.spectral.eigenvectors * scaled;
        for (i, mut row) in out.row_iter_mut().enumerate() {
            row *= Complex64::new(self.inv_sqrt_m[i], 0.0);
        }
        out
    }

    /// `A u` via the form matrix.
    pub fn apply_generator(&self, u: &[Complex64]) -> Result<CVector> {
        self.check_dim(u.len())?;
        let mut out = &self.matrix * CVector::from_column_slice(u);
        for (i, z) in out.iter_mut().enumerate() {
            *z /= self.measure[i / self.rank];
        }
        Ok(out)
    }

    pub(crate) fn sqrt_m(&self) -> &[f64] {
        &self.sqrt_m
    }

    pub(crate) fn inv_sqrt_m(&self) -> &[f64] {
        &self.inv_sqrt_m
    }
}

/// Scalar form `Q_{b,c}(u) = ½ Σ_{x,y} b(x,y)|u(x) − u(y)|² + Σ_x c(x)|u(x)|²`.
pub fn assemble_scalar_form(graph: &WeightedGraph) -> Result<FormOperator> {
    let n = graph.n();
    let mut matrix = CMatrix::zeros(n, n);
    for x in 0..n {
        matrix[(x, x)] = Complex64::new(graph.row_sum(x) + graph.killing()[x], 0.0);
    }
    for e in graph.edges() {
        let off = Complex64::new(-e.weight, 0.0);
        matrix[(e.u, e.v)] = off;
        matrix[(e.v, e.u)] = off;
    }
    FormOperator::from_matrix(matrix, graph.measure().to_vec(), 1)
}

/// Magnetic form `Q_{Φ,b,W}(u) = ½ Σ_{x,y} b(x,y)|u(x) − Φ_{x,y} u(y)|² + Σ_x ⟨W(x)u(x), u(x)⟩`.
///
/// The killing term of the graph does not enter; `W` plays its role.
/// Diagonal blocks are `(Σ_y b(x,y)) I + W(x)`, off-diagonal blocks `−b(x,y) Φ_{x,y}`.
pub fn assemble_magnetic_form(bundle: &HermitianBundle) -> Result<FormOperator> {
    let report = validate_bundle(bundle);
    if !report.passed {
        return Err(Error::BundleInvalid(report.failures().join("; ")));
    }
    let graph = bundle.graph();
    let d = bundle.rank();
    let dim = graph.n() * d;
    let mut matrix = CMatrix::zeros(dim, dim);
    for x in 0..graph.n() {
        let w = bundle.endo(x);
        // Hermitian part of W; validation bounded the anti-Hermitian part
        let mut block = (w + w.adjoint()).scale(0.5);
        for i in 0..d {
            block[(i, i)] += Complex64::new(graph.row_sum(x), 0.0);
        }
        matrix.view_mut((x * d, x * d), (d, d)).copy_from(&block);
    }
    for (e, phi) in graph.edges().iter().zip(bundle.connections()) {
        let upper = phi.scale(-e.weight);
        let lower = upper.adjoint();
        matrix.view_mut((e.u * d, e.v * d), (d, d)).copy_from(&upper);
        matrix.view_mut((e.v * d, e.u * d), (d, d)).copy_from(&lower);
    }
    FormOperator::from_matrix(matrix, graph.measure().to_vec(), d)
}

/// The generator's spectral data, eigenvalues sorted ascending.
pub fn generator(form: &FormOperator) -> &SpectralDecomposition {
    form.spectral()
}
