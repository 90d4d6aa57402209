//! Seeded random data for sampling-based verification.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bundle::CMatrix;
use crate::section::{ScalarFunction, Section};

pub type SampleRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

/// Entries i.i.d. standard normal.
pub fn real_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

/// Entries uniform in `[0, 1)`.
pub fn unit_interval_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

pub fn real_function<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ScalarFunction {
    ScalarFunction::real(real_vector(rng, n))
}

pub fn nonnegative_function<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ScalarFunction {
    ScalarFunction::real(unit_interval_vector(rng, n))
}

/// Complex Gaussian section.
pub fn section<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> Section {
    Section::new(rank, (0..n * rank).map(|_| complex_normal(rng)).collect())
        .expect("length is a multiple of rank")
}

/// Complex Gaussian section with roughly a third of the blocks set to zero.
pub fn sparse_section<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> Section {
    let mut s = section(rng, n, rank);
    for x in 0..n {
        if rng.random::<f64>() < 0.3 {
            s.block_mut(x).fill(Complex64::new(0.0, 0.0));
        }
    }
    s
}

pub fn complex_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<Complex64> {
    DVector::from_iterator(n, (0..n).map(|_| complex_normal(rng)))
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let z = CMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian positive semidefinite matrix `B B* · scale / d`.
pub fn psd<R: Rng + ?Sized>(rng: &mut R, d: usize, scale: f64) -> CMatrix {
    let b = CMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    let p = &b * b.adjoint();
    (&p + p.adjoint()).scale(0.5 * scale / d as f64)
}
