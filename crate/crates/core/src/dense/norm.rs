use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};

use super::{norm2, DenseMatrix};
use crate::error::{Error, Result};
use crate::random::seeded_rng;
use crate::scalar::{czero, Real};

/// Anything that can be applied (with its adjoint) to a vector.
pub trait LinearOperator<T: Real> {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>>;
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>>;
}

impl<T: Real> LinearOperator<T> for DenseMatrix<T> {
    fn nrows(&self) -> usize {
        self.rows()
    }
    fn ncols(&self) -> usize {
        self.cols()
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![czero(); self.rows()];
        for (j, &xj) in x.iter().enumerate() {
            if xj != czero() {
                super::axpy(xj, self.col(j), &mut y);
            }
        }
        y
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        self.columns().map(|c| super::dot(c, y)).collect()
    }
}

const START_SEED: u64 = 0x5eed_0f_a11;
const RESTARTS: u64 = 3;

/// Lower estimate of `||A||_2` by power iteration on `A^* A`.
///
/// The start vector is Gaussian with a fixed seed, so the result is
/// deterministic. The returned value is `max ||A x_k||` over unit iterates,
/// which never exceeds the true norm.
pub fn two_norm_estimate<T: Real, A: LinearOperator<T> + ?Sized>(op: &A, iters: usize) -> Result<T> {
    if iters == 0 {
        return Err(Error::InvalidParameter("power iteration needs at least one step".into()));
    }
    let n = op.ncols();
    if n == 0 || op.nrows() == 0 {
        return Ok(T::zero());
    }
    for attempt in 0..RESTARTS {
        let mut rng = seeded_rng(START_SEED + attempt);
        let mut x: Vec<Complex<T>> = (0..n)
            .map(|_| {
                let g: f64 = StandardNormal.sample(&mut rng);
                Complex::new(T::of(g), T::zero())
            })
            .collect();
        let nx = norm2(&x);
        x.iter_mut().for_each(|z| *z = *z / nx);
        let mut best = T::zero();
        for _ in 0..iters {
            let y = op.apply(&x);
            let s = norm2(&y);
            if s > best {
                best = s;
            }
            if s == T::zero() {
                break;
            }
            let z = op.apply_adjoint(&y);
            let nz = norm2(&z);
            if nz == T::zero() {
                break;
            }
            x = z.into_iter().map(|v| v / nz).collect();
        }
        if best > T::zero() {
            return Ok(best);
        }
    }
    Err(Error::ZeroOperator)
}
