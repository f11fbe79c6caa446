//! Seeded generators for test corpora and CLI validation runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cubic::{CubicMatrix, Dims};
use crate::dense::DenseMatrix;
use crate::scalar::{Modular, Real};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1)`, rescaled so the Frobenius norm is at most `max_norm`.
pub fn real_cubic(rng: &mut impl Rng, dims: Dims, max_norm: f64) -> CubicMatrix<Real> {
    let data: Vec<f64> = (0..dims.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = data.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = max_norm * rng.gen_range(0.1..1.0);
    let k = if norm > 0.0 { target / norm } else { 0.0 };
    CubicMatrix::from_parts(Real, dims, data.into_iter().map(|x| x * k).collect())
}

/// Entries uniform in `[-1, 1)` with no rescaling.
pub fn real_cubic_unit(rng: &mut impl Rng, dims: Dims) -> CubicMatrix<Real> {
    CubicMatrix::from_parts(Real, dims, (0..dims.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

pub fn mod_cubic(rng: &mut impl Rng, dims: Dims, ring: Modular) -> CubicMatrix<Modular> {
    let m = ring.modulus();
    CubicMatrix::from_parts(ring, dims, (0..dims.len()).map(|_| rng.gen_range(0..m)).collect())
}

pub fn real_dense(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix<Real> {
    DenseMatrix::from_fn(Real, rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn mod_dense(rng: &mut impl Rng, rows: usize, cols: usize, ring: Modular) -> DenseMatrix<Modular> {
    let m = ring.modulus();
    DenseMatrix::from_fn(ring, rows, cols, |_, _| rng.gen_range(0..m))
}
