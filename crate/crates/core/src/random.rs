//! Seeded random generators shared by the solver, the oracle, and tests.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::{qr_orthonormalize, DenseMatrix};
use crate::scalar::Real;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real matrix with independent standard normal entries.
pub fn gaussian_matrix<T: Real>(rows: usize, cols: usize, rng: &mut SeededRng) -> DenseMatrix<T> {
    DenseMatrix::from_fn(rows, cols, |_, _| {
        let g: f64 = StandardNormal.sample(rng);
        Complex::new(T::of(g), T::zero())
    })
}

/// Matrix of independent +-1 entries.
pub fn rademacher_matrix<T: Real>(rows: usize, cols: usize, rng: &mut SeededRng) -> DenseMatrix<T> {
    DenseMatrix::from_fn(rows, cols, |_, _| {
        let s = if rng.random::<bool>() { T::one() } else { -T::one() };
        Complex::new(s, T::zero())
    })
}

/// Real matrix with orthonormal columns, `rows >= cols`.
pub fn random_orthonormal<T: Real>(rows: usize, cols: usize, rng: &mut SeededRng) -> DenseMatrix<T> {
    assert!(rows >= cols, "random_orthonormal needs rows >= cols");
    if cols == 0 {
        return DenseMatrix::zeros(rows, 0);
    }
    loop {
        let g = gaussian_matrix::<T>(rows, cols, rng);
        if let Ok((q, rank)) = qr_orthonormalize(&g, T::rank_tol_base()) {
            if rank == cols {
                return q;
            }
        }
    }
}
