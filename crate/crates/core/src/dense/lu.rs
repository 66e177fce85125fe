//! Small dense factorizations used by the oracle, the diagnostics, and tests.

use num_complex::Complex;

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{creal, czero, Real};

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn lu_solve<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "lu_solve: {}x{} system with {} rhs rows",
            n,
            a.cols(),
            b.rows()
        )));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.max_abs();
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, T::zero()), |acc, c| if c.1 > acc.1 { c } else { acc });
        if pmax == T::zero() || pmax <= T::epsilon() * scale * T::of(1e-2) {
            return Err(Error::SingularLeadingBlock);
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            for j in 0..x.cols() {
                let t = x[(k, j)];
                x[(k, j)] = x[(piv, j)];
                x[(piv, j)] = t;
            }
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let l = lu[(i, k)] / d;
            if l == czero() {
                continue;
            }
            lu[(i, k)] = l;
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= l * u;
            }
            for j in 0..x.cols() {
                let u = x[(k, j)];
                x[(i, j)] -= l * u;
            }
        }
    }
    for j in 0..x.cols() {
        for i in (0..n).rev() {
            let mut s = x[(i, j)];
            for k in i + 1..n {
                s -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s / lu[(i, i)];
        }
    }
    Ok(x)
}

/// Cholesky factor `L` with `g = L L^*`. A pivot below `rel_tol * max diag(g)`
/// reports [`Error::BNotFullRank`].
pub fn cholesky<T: Real>(g: &DenseMatrix<T>, rel_tol: T) -> Result<DenseMatrix<T>> {
    let n = g.rows();
    if g.cols() != n {
        return Err(Error::DimensionMismatch("cholesky expects a square matrix".into()));
    }
    let dmax = (0..n).map(|i| g[(i, i)].re).fold(T::zero(), T::max);
    let mut l = DenseMatrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = g[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > rel_tol * dmax) {
            return Err(Error::BNotFullRank);
        }
        let ljj = d.sqrt();
        l[(j, j)] = creal(ljj);
        for i in j + 1..n {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn lower_solve<T: Real>(l: &DenseMatrix<T>, b: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = l.rows();
    let mut x = b.clone();
    for j in 0..x.cols() {
        let col = x.col_mut(j);
        for i in 0..n {
            let mut s = col[i];
            for k in 0..i {
                s -= l[(i, k)] * col[k];
            }
            col[i] = s / l[(i, i)];
        }
    }
    x
}

/// Solves `L^* x = b` for lower-triangular `L`.
pub fn lower_adjoint_solve<T: Real>(l: &DenseMatrix<T>, b: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = l.rows();
    let mut x = b.clone();
    for j in 0..x.cols() {
        let col = x.col_mut(j);
        for i in (0..n).rev() {
            let mut s: Complex<T> = col[i];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * col[k];
            }
            col[i] = s / l[(i, i)].conj();
        }
    }
    x
}
