//! Dense complex matrices and the small kernels built on them.
//!
//! Everything here is sized for the projected problems of subspace iteration
//! (a few thousand rows times a few hundred columns at most). Storage is
//! column-major because the tall-skinny blocks are always walked by column.

mod eig;
mod lu;
mod norm;
mod qr;
mod svd;

pub use eig::{hermitian_eig, HermitianEig};
pub use lu::{cholesky, lower_solve, lower_adjoint_solve, lu_solve};
pub use norm::{two_norm_estimate, LinearOperator};
pub use qr::{orthonormalize_with_shadow, qr_orthonormalize, ShadowQr};
pub use svd::{jacobi_svd, small_svd, SvdFactors};

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{abs2, creal, czero, is_finite, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = creal(T::one());
        }
        m
    }

    /// Builds a matrix from column-major entries, rejecting NaN/Inf.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if !data.iter().all(|z| is_finite(*z)) {
            return Err(Error::NonFinite);
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Real matrix from row-major nested slices; convenient for fixtures.
    pub fn from_real_rows(rows: &[&[T]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| creal(rows[i][j]))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Complex<T>>]) -> Self {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            assert_eq!(c.len(), rows, "column length");
            data.extend_from_slice(c);
        }
        DenseMatrix { rows, cols: columns.len(), data }
    }

    pub fn diag_real(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = creal(v);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[Complex<T>] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [Complex<T>] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Complex<T>]> {
        self.data.chunks(self.rows.max(1)).take(self.cols)
    }

    /// Mutable access to two distinct columns at once.
    pub fn col_pair_mut(&mut self, p: usize, q: usize) -> (&mut [Complex<T>], &mut [Complex<T>]) {
        assert!(p < q && q < self.cols);
        let r = self.rows;
        let (left, right) = self.data.split_at_mut(q * r);
        (&mut left[p * r..(p + 1) * r], &mut right[..r])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn real_part(&self) -> Self {
        self.map(|z| creal(z.re))
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == T::zero())
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul inner dimension");
        let mut out = Self::zeros(self.rows, other.cols);
        let rows = self.rows;
        let work = self.rows * self.cols * other.cols;
        let kernel = |(j, out_col): (usize, &mut [Complex<T>])| {
            let bcol = other.col(j);
            for (p, &b) in bcol.iter().enumerate() {
                if b == czero() {
                    continue;
                }
                for (o, &a) in out_col.iter_mut().zip(self.col(p)) {
                    *o += a * b;
                }
            }
        };
        if rows == 0 {
            return out;
        }
        if work > 1 << 18 {
            out.data.par_chunks_mut(rows).enumerate().for_each(kernel);
        } else {
            out.data.chunks_mut(rows).enumerate().for_each(kernel);
        }
        out
    }

    /// `self^* * other` without forming the adjoint.
    pub fn adjoint_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "adjoint_matmul inner dimension");
        let mut out = Self::zeros(self.cols, other.cols);
        let n = self.cols;
        if n == 0 {
            return out;
        }
        let work = self.rows * self.cols * other.cols;
        let kernel = |(j, out_col): (usize, &mut [Complex<T>])| {
            let b = other.col(j);
            for (i, o) in out_col.iter_mut().enumerate() {
                *o = dot(self.col(i), b);
            }
        };
        if work > 1 << 18 {
            out.data.par_chunks_mut(n).enumerate().for_each(kernel);
        } else {
            out.data.chunks_mut(n).enumerate().for_each(kernel);
        }
        out
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    /// Multiplies column `j` by `d[j]`.
    pub fn scale_columns(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.cols);
        let mut out = self.clone();
        for (j, &s) in d.iter().enumerate() {
            out.col_mut(j).iter_mut().for_each(|z| *z *= s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape());
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape());
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: Complex<T>) {
        assert_eq!(self.shape(), other.shape());
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn hstack(blocks: &[&Self]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let mut data = Vec::new();
        let mut cols = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row count");
            data.extend_from_slice(&b.data);
            cols += b.cols;
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn vstack(top: &Self, bottom: &Self) -> Self {
        assert_eq!(top.cols, bottom.cols, "vstack column count");
        let rows = top.rows + bottom.rows;
        let mut data = Vec::with_capacity(rows * top.cols);
        for j in 0..top.cols {
            data.extend_from_slice(top.col(j));
            data.extend_from_slice(bottom.col(j));
        }
        DenseMatrix { rows, cols: top.cols, data }
    }

    /// Rows `start..end` of every column.
    pub fn row_block(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.rows);
        let mut data = Vec::with_capacity((end - start) * self.cols);
        for j in 0..self.cols {
            data.extend_from_slice(&self.col(j)[start..end]);
        }
        DenseMatrix { rows: end - start, cols: self.cols, data }
    }

    /// Columns `start..end`.
    pub fn col_block(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.cols);
        DenseMatrix {
            rows: self.rows,
            cols: end - start,
            data: self.data[start * self.rows..end * self.rows].to_vec(),
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        DenseMatrix { rows: self.rows, cols: idx.len(), data }
    }

    /// Negates rows `start..` (the `diag{I, -I}` sign flip).
    pub fn flip_rows_from(&self, start: usize) -> Self {
        let mut out = self.clone();
        for j in 0..self.cols {
            out.col_mut(j)[start..].iter_mut().for_each(|z| *z = -*z);
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&z| abs2(z)).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn column_norms(&self) -> Vec<T> {
        self.columns().map(norm2).collect()
    }

    /// Spectral norm via the Jacobi SVD. Intended for small matrices.
    pub fn two_norm(&self) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        match jacobi_svd(self) {
            Ok(f) => f.sigma.first().copied().unwrap_or_else(T::zero),
            Err(_) => self.frobenius_norm(),
        }
    }

    /// `||self^* self - I||_2`.
    pub fn orthonormality_defect(&self) -> T {
        let g = self.adjoint_matmul(self);
        g.sub(&Self::identity(self.cols)).two_norm()
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(czero(), |a, b| a + b)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| is_finite(*z))
    }
}

impl<T: Real> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

/// `x^* y`.
#[inline]
pub fn dot<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    let mut re = T::zero();
    let mut im = T::zero();
    for (a, b) in x.iter().zip(y) {
        re += a.re * b.re + a.im * b.im;
        im += a.re * b.im - a.im * b.re;
    }
    Complex::new(re, im)
}

#[inline]
pub fn norm2<T: Real>(x: &[Complex<T>]) -> T {
    // Scaled accumulation keeps tiny filtered columns from underflowing.
    let scale = x.iter().fold(T::zero(), |m, z| m.max(z.re.abs()).max(z.im.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    let inv = T::one() / scale;
    x.iter().map(|z| abs2(*z * inv)).sum::<T>().sqrt() * scale
}

/// `y += a x`.
#[inline]
pub fn axpy<T: Real>(a: Complex<T>, x: &[Complex<T>], y: &mut [Complex<T>]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
