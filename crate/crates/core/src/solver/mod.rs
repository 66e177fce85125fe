//! Factor-once, solve-many handling of the shifted systems
//! `(xi B_check - A_check) X = R` at the quadrature nodes.

mod lu;
mod ordering;

pub use lu::SparseLu;
pub use ordering::{minimum_degree, DENSE_GRAPH_LIMIT};

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{czero, Real};
use crate::sparse::{SparseMatrix, SparsePencil};

/// Diagonal pivots are kept while at least this fraction of the column max.
const PIVOT_THRESHOLD: f64 = 0.1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct FillStats {
    pub dim: usize,
    pub nnz_matrix: usize,
    pub nnz_l: usize,
    pub nnz_u: usize,
}

/// LU factors of one shifted matrix together with the matrix itself, which
/// is kept for the residual check after every solve.
#[derive(Debug)]
pub struct NodeFactorization<T: Real> {
    xi: Complex<T>,
    matrix: SparseMatrix<T>,
    norm_inf: T,
    lu: SparseLu<T>,
    stats: FillStats,
}

fn singular<T: Real>(xi: Complex<T>) -> Error {
    Error::SingularShift { xi: Complex64::new(xi.re.to_f64_lossy(), xi.im.to_f64_lossy()) }
}

fn inf_norm_vec<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |a, z| a.max(z.norm()))
}

/// Sparse LU of `xi B_check - A_check` with a minimum-degree symmetric
/// ordering and threshold partial pivoting.
pub fn factorize<T: Real>(pencil: &SparsePencil<T>, xi: Complex<T>) -> Result<NodeFactorization<T>> {
    let matrix = pencil.assemble_shifted(xi);
    factorize_matrix(matrix, xi)
}

/// Same as [`factorize`] for an already assembled matrix; `xi` only labels
/// the factorization.
pub fn factorize_matrix<T: Real>(matrix: SparseMatrix<T>, xi: Complex<T>) -> Result<NodeFactorization<T>> {
    let n = matrix.rows();
    if n != matrix.cols() {
        return Err(Error::DimensionMismatch("shifted matrix must be square".into()));
    }
    let mut row_sums = vec![T::zero(); n];
    for (i, _, v) in matrix.triplets() {
        row_sums[i] += v.norm();
    }
    let norm_inf = row_sums.into_iter().fold(T::zero(), T::max);
    let order = minimum_degree(&matrix);
    let lu = SparseLu::factor(&matrix, order, T::of(PIVOT_THRESHOLD), T::pivot_tol() * norm_inf)
        .map_err(|_| singular(xi))?;
    let stats = FillStats { dim: n, nnz_matrix: matrix.nnz(), nnz_l: lu.nnz_l(), nnz_u: lu.nnz_u() };
    Ok(NodeFactorization { xi, matrix, norm_inf, lu, stats })
}

impl<T: Real> NodeFactorization<T> {
    pub fn xi(&self) -> Complex<T> {
        self.xi
    }

    pub fn dim(&self) -> usize {
        self.stats.dim
    }

    pub fn stats(&self) -> FillStats {
        self.stats
    }

    /// Residual-checked solve of a single right-hand side: accepted when the
    /// normwise backward error `||r|| / (||M|| ||x|| + ||b||)` is below the
    /// scalar's solve tolerance, after at most one refinement step.
    pub fn solve_vec(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if b.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("rhs has {} rows, system has {}", b.len(), self.dim())));
        }
        let bnorm = inf_norm_vec(b);
        if bnorm == T::zero() {
            return Ok(vec![czero(); b.len()]);
        }
        let mut x = self.lu.solve(b);
        for attempt in 0..2 {
            let mx = self.matrix.matvec(&x);
            let r: Vec<Complex<T>> = b.iter().zip(&mx).map(|(bi, mi)| *bi - *mi).collect();
            let bound = T::solve_tol() * (self.norm_inf * inf_norm_vec(&x) + bnorm);
            let rn = inf_norm_vec(&r);
            if rn.is_finite() && rn <= bound {
                return Ok(x);
            }
            if attempt == 0 {
                let d = self.lu.solve(&r);
                x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += *di);
            }
        }
        Err(singular(self.xi))
    }

    /// Solves every column of `rhs`; columns are independent and run in
    /// parallel.
    pub fn solve_block(&self, rhs: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if rhs.rows() != self.dim() {
            return Err(Error::DimensionMismatch(format!("rhs has {} rows, system has {}", rhs.rows(), self.dim())));
        }
        let cols: Vec<Vec<Complex<T>>> =
            (0..rhs.cols()).into_par_iter().map(|j| self.solve_vec(rhs.col(j))).collect::<Result<_>>()?;
        Ok(DenseMatrix::from_columns(rhs.rows(), &cols))
    }
}

/// Free-function form of [`NodeFactorization::solve_block`].
pub fn solve_block<T: Real>(f: &NodeFactorization<T>, rhs: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    f.solve_block(rhs)
}

fn key<T: Real>(xi: Complex<T>) -> (u64, u64) {
    (xi.re.to_f64_lossy().to_bits(), xi.im.to_f64_lossy().to_bits())
}

/// Factorizations keyed by the exact value of the shift. One cache belongs
/// to one pencil; sharing it between pencils would return wrong factors.
#[derive(Debug, Default)]
pub struct FactorizationCache<T: Real> {
    entries: Mutex<HashMap<(u64, u64), Arc<NodeFactorization<T>>>>,
    factorizations: AtomicUsize,
}

impl<T: Real> FactorizationCache<T> {
    pub fn new() -> Self {
        FactorizationCache { entries: Mutex::new(HashMap::new()), factorizations: AtomicUsize::new(0) }
    }

    /// Total number of factorizations performed through this cache.
    pub fn factorization_count(&self) -> usize {
        self.factorizations.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.entries.lock().expect("cache lock").clear();
    }

    /// Sum of fill statistics over all cached factorizations.
    pub fn memory_nnz(&self) -> usize {
        self.entries.lock().expect("cache lock").values().map(|f| f.stats.nnz_l + f.stats.nnz_u).sum()
    }

    pub fn get(&self, xi: Complex<T>) -> Option<Arc<NodeFactorization<T>>> {
        self.entries.lock().expect("cache lock").get(&key(xi)).cloned()
    }

    /// Ensures every shift has a factorization; missing ones are computed in
    /// parallel. The lock is held only for lookup and insertion.
    pub fn prepare(&self, pencil: &SparsePencil<T>, shifts: &[Complex<T>]) -> Result<Vec<Arc<NodeFactorization<T>>>> {
        let missing: Vec<Complex<T>> = shifts.iter().copied().filter(|&xi| self.get(xi).is_none()).collect();
        let fresh: Vec<NodeFactorization<T>> =
            missing.par_iter().map(|&xi| factorize(pencil, xi)).collect::<Result<_>>()?;
        {
            let mut map = self.entries.lock().expect("cache lock");
            for f in fresh {
                self.factorizations.fetch_add(1, Ordering::Relaxed);
                map.entry(key(f.xi)).or_insert_with(|| Arc::new(f));
            }
        }
        Ok(shifts.iter().map(|&xi| self.get(xi).expect("factorization just inserted")).collect())
    }

    pub fn get_or_factorize(&self, pencil: &SparsePencil<T>, xi: Complex<T>) -> Result<Arc<NodeFactorization<T>>> {
        Ok(self.prepare(pencil, &[xi])?.remove(0))
    }
}
