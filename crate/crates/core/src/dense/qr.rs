use num_complex::Complex;

use super::{axpy, dot, norm2, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::{czero, Real};

/// Result of orthonormalizing a block while replaying the same column
/// operations on a companion ("shadow") block.
#[derive(Clone, Debug)]
pub struct ShadowQr<T: Real> {
    pub q: DenseMatrix<T>,
    pub shadow: Option<DenseMatrix<T>>,
    /// Indices of the input columns that survived truncation.
    pub kept: Vec<usize>,
}

/// Orthonormalizes the columns of `m` with twice-iterated classical
/// Gram-Schmidt, dropping columns whose remaining norm falls below
/// `rank_tol` times the largest input column norm.
///
/// Returns the orthonormal basis (only the `rank` surviving columns) and the
/// numerical rank.
pub fn qr_orthonormalize<T: Real>(m: &DenseMatrix<T>, rank_tol: T) -> Result<(DenseMatrix<T>, usize)> {
    let out = orthonormalize_with_shadow(m, None, rank_tol)?;
    let rank = out.q.cols();
    Ok((out.q, rank))
}

/// Gram-Schmidt on `m`; every linear combination applied to the columns of
/// `m` is applied verbatim to `shadow`. With `m = B W` this yields `W R^{-1}`
/// in the shadow, i.e. a `B^*B`-orthonormal basis for `span(W)`.
pub fn orthonormalize_with_shadow<T: Real>(
    m: &DenseMatrix<T>,
    shadow: Option<&DenseMatrix<T>>,
    rank_tol: T,
) -> Result<ShadowQr<T>> {
    if m.cols() == 0 {
        return Err(Error::InvalidParameter("orthonormalization of an empty block".into()));
    }
    if rank_tol <= T::zero() {
        return Err(Error::InvalidParameter("rank tolerance must be positive".into()));
    }
    if let Some(s) = shadow {
        if s.cols() != m.cols() {
            return Err(Error::DimensionMismatch("shadow block column count".into()));
        }
    }
    let norms = m.column_norms();
    let reference = norms.iter().fold(T::zero(), |a, &b| a.max(b));
    if reference.is_nan() {
        return Err(Error::NonFinite);
    }
    if norms.iter().all(|&n| n < rank_tol) {
        return Err(Error::AllColumnsNegligible);
    }

    let rows = m.rows();
    let srows = shadow.map_or(0, |s| s.rows());
    let mut q_cols: Vec<Vec<Complex<T>>> = Vec::new();
    let mut s_cols: Vec<Vec<Complex<T>>> = Vec::new();
    let mut kept = Vec::new();
    let mut coeffs: Vec<Complex<T>> = Vec::new();

    for j in 0..m.cols() {
        let mut v = m.col(j).to_vec();
        let mut s = shadow.map(|s| s.col(j).to_vec()).unwrap_or_default();
        for _pass in 0..2 {
            coeffs.clear();
            coeffs.extend(q_cols.iter().map(|qi| dot(qi, &v)));
            for (i, &c) in coeffs.iter().enumerate() {
                if c == czero() {
                    continue;
                }
                axpy(-c, &q_cols[i], &mut v);
                if shadow.is_some() {
                    axpy(-c, &s_cols[i], &mut s);
                }
            }
        }
        let nu = norm2(&v);
        if !(nu > rank_tol * reference) {
            continue;
        }
        let inv = T::one() / nu;
        v.iter_mut().for_each(|z| *z = *z * inv);
        s.iter_mut().for_each(|z| *z = *z * inv);
        q_cols.push(v);
        if shadow.is_some() {
            s_cols.push(s);
        }
        kept.push(j);
    }

    if kept.is_empty() {
        return Err(Error::AllColumnsNegligible);
    }
    let q = DenseMatrix::from_columns(rows, &q_cols);
    let shadow = shadow.map(|_| DenseMatrix::from_columns(srows, &s_cols));
    Ok(ShadowQr { q, shadow, kept })
}
