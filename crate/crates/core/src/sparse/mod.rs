//! Compressed sparse column matrices, Matrix Market I/O, and the
//! Jordan-Wielandt pencil built from them.

mod market;
mod pencil;

pub use market::{read_matrix_market, read_matrix_market_dense, write_matrix_market, write_matrix_market_dense};
pub use pencil::{Mode, SparsePencil};

use num_complex::Complex;
use rayon::prelude::*;

use crate::dense::{DenseMatrix, LinearOperator};
use crate::error::{Error, Result};
use crate::scalar::{abs2, creal, czero, is_finite, Real};

/// Storage symmetry as declared in a Matrix Market header. Expanded matrices
/// always hold every entry explicitly; the flag is kept for round trips.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    SkewSymmetric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T: Real> {
    rows: usize,
    cols: usize,
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    values: Vec<Complex<T>>,
    symmetry: Symmetry,
}

impl<T: Real> SparseMatrix<T> {
    /// Assembles a CSC matrix from `(row, col, value)` triplets. Duplicates
    /// are summed; row indices within each column end up sorted.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, Complex<T>)]) -> Result<Self> {
        Self::from_triplets_with(rows, cols, triplets, Symmetry::General)
    }

    pub fn from_triplets_with(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, Complex<T>)],
        symmetry: Symmetry,
    ) -> Result<Self> {
        if symmetry != Symmetry::General && rows != cols {
            return Err(Error::DimensionMismatch(format!("{symmetry:?} matrix must be square, got {rows}x{cols}")));
        }
        let mut counts = vec![0usize; cols + 1];
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::DimensionMismatch(format!("entry ({i}, {j}) outside {rows}x{cols}")));
            }
            if !is_finite(v) {
                return Err(Error::NonFinite);
            }
            counts[j + 1] += 1;
        }
        for j in 0..cols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut rowidx = vec![0usize; triplets.len()];
        let mut values = vec![czero(); triplets.len()];
        for &(i, j, v) in triplets {
            let k = next[j];
            rowidx[k] = i;
            values[k] = v;
            next[j] += 1;
        }
        // Sort each column by row and merge duplicates.
        let mut colptr = Vec::with_capacity(cols + 1);
        colptr.push(0);
        let mut out_rows = Vec::with_capacity(triplets.len());
        let mut out_vals = Vec::with_capacity(triplets.len());
        let mut buf: Vec<(usize, Complex<T>)> = Vec::new();
        for j in 0..cols {
            buf.clear();
            buf.extend((counts[j]..counts[j + 1]).map(|k| (rowidx[k], values[k])));
            buf.sort_by_key(|e| e.0);
            for &(i, v) in &buf {
                if out_rows.len() > colptr[j] && *out_rows.last().unwrap() == i {
                    *out_vals.last_mut().unwrap() += v;
                } else {
                    out_rows.push(i);
                    out_vals.push(v);
                }
            }
            colptr.push(out_rows.len());
        }
        Ok(SparseMatrix { rows, cols, colptr, rowidx: out_rows, values: out_vals, symmetry })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            colptr: (0..=n).collect(),
            rowidx: (0..n).collect(),
            values: vec![creal(T::one()); n],
            symmetry: Symmetry::General,
        }
    }

    pub fn from_dense(d: &DenseMatrix<T>) -> Self {
        let mut t = Vec::new();
        for j in 0..d.cols() {
            for (i, &v) in d.col(j).iter().enumerate() {
                if v != czero() {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(d.rows(), d.cols(), &t).expect("dense input is finite and in range")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }

    pub fn rowidx(&self) -> &[usize] {
        &self.rowidx
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// Row indices and values of column `j`.
    pub fn column(&self, j: usize) -> (&[usize], &[Complex<T>]) {
        let r = self.colptr[j]..self.colptr[j + 1];
        (&self.rowidx[r.clone()], &self.values[r])
    }

    pub fn triplets(&self) -> Vec<(usize, usize, Complex<T>)> {
        let mut t = Vec::with_capacity(self.nnz());
        for j in 0..self.cols {
            let (ri, vs) = self.column(j);
            t.extend(ri.iter().zip(vs).map(|(&i, &v)| (i, j, v)));
        }
        t
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        let (ri, vs) = self.column(j);
        match ri.binary_search(&i) {
            Ok(k) => vs[k],
            Err(_) => czero(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == T::zero())
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            let (ri, vs) = self.column(j);
            for (&i, &v) in ri.iter().zip(vs) {
                d[(i, j)] = v;
            }
        }
        d
    }

    pub fn adjoint(&self) -> Self {
        let t: Vec<_> = self.triplets().into_iter().map(|(i, j, v)| (j, i, v.conj())).collect();
        Self::from_triplets(self.cols, self.rows, &t).expect("transposed indices stay in range")
    }

    pub fn frobenius_norm(&self) -> T {
        self.values.iter().map(|z| abs2(*z)).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, z| a.max(z.norm()))
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> T {
        (0..self.cols)
            .map(|j| self.column(j).1.iter().map(|z| z.norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// `y = self * x`.
    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![czero(); self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    fn matvec_into(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for j in 0..self.cols {
            let xj = x[j];
            if xj == czero() {
                continue;
            }
            let (ri, vs) = self.column(j);
            for (&i, &v) in ri.iter().zip(vs) {
                y[i] += v * xj;
            }
        }
    }

    /// `x = self^* * y`.
    pub fn adjoint_matvec(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.cols)
            .map(|j| {
                let (ri, vs) = self.column(j);
                ri.iter().zip(vs).fold(czero(), |acc, (&i, &v)| acc + v.conj() * y[i])
            })
            .collect()
    }

    /// Sparse times dense block, columns in parallel.
    pub fn mul_dense(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        assert_eq!(self.cols, x.rows(), "sparse-dense product shape");
        let cols: Vec<Vec<Complex<T>>> = (0..x.cols()).into_par_iter().map(|k| self.matvec(x.col(k))).collect();
        DenseMatrix::from_columns(self.rows, &cols)
    }

    /// `self^* * x`.
    pub fn adjoint_mul_dense(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        assert_eq!(self.rows, x.rows(), "sparse-dense adjoint product shape");
        let cols: Vec<Vec<Complex<T>>> =
            (0..x.cols()).into_par_iter().map(|k| self.adjoint_matvec(x.col(k))).collect();
        DenseMatrix::from_columns(self.cols, &cols)
    }

    /// Sparse product `self^* * self` (the Gram matrix), via a dense
    /// accumulator per output column.
    pub fn gram(&self) -> Self {
        let at = self.adjoint();
        let n = self.cols;
        let mut acc = vec![czero(); n];
        let mut mark = vec![usize::MAX; n];
        let mut pattern = Vec::new();
        let mut colptr = vec![0usize];
        let mut rowidx = Vec::new();
        let mut values = Vec::new();
        for j in 0..n {
            pattern.clear();
            let (rj, vj) = self.column(j);
            for (&k, &akj) in rj.iter().zip(vj) {
                // Row k of A is column k of A^*.
                let (ri, vs) = at.column(k);
                for (&i, &v) in ri.iter().zip(vs) {
                    if mark[i] != j {
                        mark[i] = j;
                        acc[i] = czero();
                        pattern.push(i);
                    }
                    acc[i] += v * akj;
                }
            }
            pattern.sort_unstable();
            for &i in &pattern {
                rowidx.push(i);
                values.push(acc[i]);
            }
            colptr.push(rowidx.len());
        }
        SparseMatrix { rows: n, cols: n, colptr, rowidx, values, symmetry: Symmetry::General }
    }
}

impl<T: Real> LinearOperator<T> for SparseMatrix<T> {
    fn nrows(&self) -> usize {
        self.rows
    }
    fn ncols(&self) -> usize {
        self.cols
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.matvec(x)
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        self.adjoint_matvec(y)
    }
}

/// The `(n+1) x n` scaled first-difference matrix: column `j` has `+1` at
/// row `j` and `-1` at row `j+1`.
pub fn make_derivative_b<T: Real>(n: usize) -> SparseMatrix<T> {
    let mut t = Vec::with_capacity(2 * n);
    for j in 0..n {
        t.push((j, j, creal(T::one())));
        t.push((j + 1, j, creal(-T::one())));
    }
    SparseMatrix::from_triplets(n + 1, n, &t).expect("stencil indices in range")
}

/// Random sparse matrix with roughly `nnz` Gaussian entries; used by tests,
/// fixtures and the acceptance suite.
pub fn random_sparse<T: Real>(rows: usize, cols: usize, nnz: usize, rng: &mut crate::random::SeededRng) -> SparseMatrix<T> {
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};
    let mut t = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let i = rng.random_range(0..rows);
        let j = rng.random_range(0..cols);
        let g: f64 = StandardNormal.sample(rng);
        t.push((i, j, creal(T::of(g))));
    }
    SparseMatrix::from_triplets(rows, cols, &t).expect("random indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{jacobi_svd, two_norm_estimate};
    use crate::random::seeded_rng;

    #[test]
    fn duplicates_are_summed() {
        let t = [(0, 0, creal(1.0)), (1, 0, creal(2.0)), (0, 0, creal(0.5))];
        let m = SparseMatrix::<f64>::from_triplets(2, 1, &t).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 0), creal(1.5));
    }

    #[test]
    fn out_of_range_entry_is_rejected() {
        let t = [(2, 0, creal(1.0))];
        assert!(SparseMatrix::<f64>::from_triplets(2, 1, &t).is_err());
    }

    #[test]
    fn derivative_stencil() {
        let b = make_derivative_b::<f64>(1).to_dense();
        assert_eq!(b, DenseMatrix::from_real_rows(&[&[1.0], &[-1.0]]));
        let b3 = make_derivative_b::<f64>(3);
        assert_eq!(b3.shape(), (4, 3));
        for j in 0..3 {
            assert_eq!(b3.get(j, j), creal(1.0));
            assert_eq!(b3.get(j + 1, j), creal(-1.0));
        }
    }

    #[test]
    fn derivative_has_full_rank_and_bounded_gram() {
        for n in 1..=50 {
            let b = make_derivative_b::<f64>(n);
            let d = b.to_dense();
            for c in d.column_norms() {
                assert!((c - 2f64.sqrt()).abs() < 1e-15);
            }
            let f = jacobi_svd(&d).unwrap();
            assert!(*f.sigma.last().unwrap() > 0.0);
            assert!(b.gram().to_dense().two_norm() <= 4.0 + 1e-12);
        }
    }

    #[test]
    fn gram_matches_dense_product() {
        let mut rng = seeded_rng(12);
        let a = random_sparse::<f64>(15, 9, 40, &mut rng);
        let d = a.to_dense();
        assert!(a.gram().to_dense().sub(&d.adjoint_matmul(&d)).max_abs() < 1e-13);
        assert!(a.adjoint().to_dense().sub(&d.adjoint()).max_abs() == 0.0);
    }

    #[test]
    fn norm_estimate_on_random_sparse() {
        let mut rng = seeded_rng(5);
        let a = random_sparse::<f64>(100, 50, 400, &mut rng);
        let exact = jacobi_svd(&a.to_dense()).unwrap().sigma[0];
        let est = two_norm_estimate(&a, 20).unwrap();
        assert!(est <= exact * (1.0 + 1e-12));
        assert!(est >= 0.98 * exact, "{est} vs {exact}");
    }
}
