use num_complex::Complex;

use super::SparseMatrix;
use crate::dense::{two_norm_estimate, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

const NORM_ITERS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Svd,
    Gsvd,
}

/// The pair `(A, B)` with `A` of size `m x n` and `B` of size `p x n`, or
/// `B = I` in SVD mode. The Gram matrix `B^*B` and two-norm estimates of
/// both factors are computed once at construction.
#[derive(Clone, Debug)]
pub struct SparsePencil<T: Real> {
    a: SparseMatrix<T>,
    b: Option<SparseMatrix<T>>,
    btb: Option<SparseMatrix<T>>,
    a_norm: T,
    b_norm: T,
}

impl<T: Real> SparsePencil<T> {
    pub fn svd(a: SparseMatrix<T>) -> Result<Self> {
        let a_norm = norm_or_zero(&a)?;
        Ok(SparsePencil { a, b: None, btb: None, a_norm, b_norm: T::one() })
    }

    pub fn gsvd(a: SparseMatrix<T>, b: SparseMatrix<T>) -> Result<Self> {
        if a.cols() != b.cols() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{} but B is {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        let a_norm = norm_or_zero(&a)?;
        let b_norm = two_norm_estimate(&b, NORM_ITERS).map_err(|_| Error::BNotFullRank)?;
        let btb = b.gram();
        Ok(SparsePencil { a, b: Some(b), btb: Some(btb), a_norm, b_norm })
    }

    pub fn mode(&self) -> Mode {
        if self.b.is_some() {
            Mode::Gsvd
        } else {
            Mode::Svd
        }
    }

    pub fn a(&self) -> &SparseMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> Option<&SparseMatrix<T>> {
        self.b.as_ref()
    }

    pub fn btb(&self) -> Option<&SparseMatrix<T>> {
        self.btb.as_ref()
    }

    /// Rows of `A`.
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Columns of `A` (and `B`).
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Rows of `B` (`n` in SVD mode).
    pub fn p(&self) -> usize {
        self.b.as_ref().map_or(self.n(), |b| b.rows())
    }

    /// Dimension `m + n` of the Jordan-Wielandt pencil.
    pub fn dim(&self) -> usize {
        self.m() + self.n()
    }

    pub fn a_norm(&self) -> T {
        self.a_norm
    }

    /// `||B||_2` estimate; exactly 1 in SVD mode.
    pub fn b_norm(&self) -> T {
        self.b_norm
    }

    pub fn is_real(&self) -> bool {
        self.a.is_real() && self.b.as_ref().is_none_or(|b| b.is_real())
    }

    /// `B w` (identity in SVD mode).
    pub fn apply_b(&self, w: &DenseMatrix<T>) -> DenseMatrix<T> {
        match &self.b {
            Some(b) => b.mul_dense(w),
            None => w.clone(),
        }
    }

    /// `B^*B w` (identity in SVD mode).
    pub fn apply_btb(&self, w: &DenseMatrix<T>) -> DenseMatrix<T> {
        match &self.btb {
            Some(g) => g.mul_dense(w),
            None => w.clone(),
        }
    }

    /// `[[xi I_m, -A], [-A^*, xi B^*B]]`.
    pub fn assemble_shifted(&self, xi: Complex<T>) -> SparseMatrix<T> {
        let (m, n) = (self.m(), self.n());
        let mut t = Vec::with_capacity(m + 2 * self.a.nnz() + self.btb.as_ref().map_or(n, |g| g.nnz()));
        for i in 0..m {
            t.push((i, i, xi));
        }
        for (i, j, v) in self.a.triplets() {
            t.push((i, m + j, -v));
            t.push((m + j, i, -v.conj()));
        }
        match &self.btb {
            Some(g) => t.extend(g.triplets().into_iter().map(|(i, j, v)| (m + i, m + j, xi * v))),
            None => t.extend((0..n).map(|i| (m + i, m + i, xi))),
        }
        SparseMatrix::from_triplets(m + n, m + n, &t).expect("block indices in range")
    }

    /// `B_check z = [z_top; B^*B z_bottom]`.
    pub fn apply_b_check(&self, z: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let m = self.m();
        if z.rows() != self.dim() {
            return Err(Error::DimensionMismatch(format!("block has {} rows, pencil dimension is {}", z.rows(), self.dim())));
        }
        if self.btb.is_none() {
            return Ok(z.clone());
        }
        let top = z.row_block(0, m);
        let bottom = self.apply_btb(&z.row_block(m, z.rows()));
        Ok(DenseMatrix::vstack(&top, &bottom))
    }

    /// `A_check z = [A z_bottom; A^* z_top]`.
    pub fn apply_jordan_wielandt(&self, z: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let m = self.m();
        if z.rows() != self.dim() {
            return Err(Error::DimensionMismatch(format!("block has {} rows, pencil dimension is {}", z.rows(), self.dim())));
        }
        let top = self.a.mul_dense(&z.row_block(m, z.rows()));
        let bottom = self.a.adjoint_mul_dense(&z.row_block(0, m));
        Ok(DenseMatrix::vstack(&top, &bottom))
    }

    /// Dense `A_check` and `B_check`, for oracles on small problems.
    pub fn dense_pencil(&self) -> (DenseMatrix<T>, DenseMatrix<T>) {
        let (m, n) = (self.m(), self.n());
        let a = self.a.to_dense();
        let zmm = DenseMatrix::zeros(m, m);
        let znn = DenseMatrix::zeros(n, n);
        let jw = DenseMatrix::vstack(&DenseMatrix::hstack(&[&zmm, &a]), &DenseMatrix::hstack(&[&a.adjoint(), &znn]));
        let g = self.btb.as_ref().map_or_else(|| DenseMatrix::identity(n), |g| g.to_dense());
        let bc = DenseMatrix::vstack(
            &DenseMatrix::hstack(&[&DenseMatrix::identity(m), &DenseMatrix::zeros(m, n)]),
            &DenseMatrix::hstack(&[&DenseMatrix::zeros(n, m), &g]),
        );
        (jw, bc)
    }

    /// Dense `xi B_check - A_check`.
    pub fn dense_shifted(&self, xi: Complex<T>) -> DenseMatrix<T> {
        let (jw, bc) = self.dense_pencil();
        bc.scale(xi).sub(&jw)
    }
}

fn norm_or_zero<T: Real>(a: &SparseMatrix<T>) -> Result<T> {
    if a.nnz() == 0 {
        return Ok(T::zero());
    }
    two_norm_estimate(a, NORM_ITERS)
}

