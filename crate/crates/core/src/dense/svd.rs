use num_complex::Complex;

use super::{axpy, dot, norm2, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::{abs2, creal, czero, Real};

pub const MAX_SWEEPS: usize = 60;

/// Thin SVD `a = u * diag(sigma) * w^*`, singular values descending.
#[derive(Clone, Debug)]
pub struct SvdFactors<T: Real> {
    pub u: DenseMatrix<T>,
    pub sigma: Vec<T>,
    pub w: DenseMatrix<T>,
}

/// SVD of the square projected matrix `A_p`.
pub fn small_svd<T: Real>(a: &DenseMatrix<T>) -> Result<SvdFactors<T>> {
    if a.rows() != a.cols() || a.rows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "small_svd expects a nonempty square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    jacobi_svd(a)
}

/// One-sided (Hestenes) Jacobi SVD of an arbitrary dense matrix.
///
/// Columns of `a` are rotated pairwise until mutually orthogonal; the
/// accumulated rotations form `w`. The left vectors are the normalized
/// columns, re-orthonormalized in descending singular value order so that
/// `u` stays unitary even when trailing singular values are tiny.
pub fn jacobi_svd<T: Real>(a: &DenseMatrix<T>) -> Result<SvdFactors<T>> {
    if a.rows() < a.cols() {
        let f = jacobi_svd(&a.adjoint())?;
        return Ok(SvdFactors { u: f.w, sigma: f.sigma, w: f.u });
    }
    let (m, n) = a.shape();
    let mut work = a.clone();
    let mut v = DenseMatrix::<T>::identity(n);
    let tol = T::epsilon() * T::of_usize(m.max(1)).sqrt();

    let mut converged = n <= 1;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (ap, aq) = work.col_pair_mut(p, q);
                let alpha: T = ap.iter().map(|z| abs2(*z)).sum();
                let beta: T = aq.iter().map(|z| abs2(*z)).sum();
                let gamma = dot(ap, aq);
                let g = gamma.norm();
                if g == T::zero() || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s) = rotation(alpha, beta, g);
                let e = gamma / g;
                rotate_pair(ap, aq, c, s, e);
                let (vp, vq) = v.col_pair_mut(p, q);
                rotate_pair(vp, vq, c, s, e);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let norms: Vec<T> = work.columns().map(norm2).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));

    let sigma: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let w = v.select_columns(&order);
    let smax = sigma.first().copied().unwrap_or_else(T::zero);

    let mut u_cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let col: Vec<Complex<T>> = if sigma[k] > T::zero() && sigma[k] > T::min_positive_value() * smax {
            let inv = T::one() / sigma[k];
            work.col(j).iter().map(|z| *z * inv).collect()
        } else {
            vec![czero(); m]
        };
        u_cols.push(col);
    }
    reorthonormalize(&mut u_cols, m);
    let u = DenseMatrix::from_columns(m, &u_cols);
    Ok(SvdFactors { u, sigma, w })
}

/// Real rotation `(c, s)` annihilating the off-diagonal of the 2x2 Gram
/// matrix `[[alpha, g], [g, beta]]`.
#[inline]
fn rotation<T: Real>(alpha: T, beta: T, g: T) -> (T, T) {
    let zeta = (beta - alpha) / (g + g);
    let t = if zeta >= T::zero() {
        T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
    } else {
        -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    (c, c * t)
}

/// `x' = c x - s conj(e) y`, `y' = s e x + c y`.
#[inline]
fn rotate_pair<T: Real>(x: &mut [Complex<T>], y: &mut [Complex<T>], c: T, s: T, e: Complex<T>) {
    let se = e * s;
    let sec = e.conj() * s;
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let a = *xi;
        let b = *yi;
        *xi = a * c - sec * b;
        *yi = se * a + b * c;
    }
}

/// CGS2 over the columns in order; columns that collapse are replaced by a
/// completion drawn from the standard basis.
fn reorthonormalize<T: Real>(cols: &mut [Vec<Complex<T>>], m: usize) {
    let half = T::of(0.5);
    for j in 0..cols.len() {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        let orig = norm2(v);
        project_out(done, v);
        let mut nv = norm2(v);
        if orig == T::zero() || nv < half * orig {
            // Lost (or never had) a reliable direction: complete the basis.
            let mut best = None;
            for i in 0..m {
                let mut e = vec![czero(); m];
                e[i] = creal(T::one());
                project_out(done, &mut e);
                let ne = norm2(&e);
                if ne > half {
                    best = Some((e, ne));
                    break;
                }
                if best.as_ref().map_or(true, |(_, b)| ne > *b) {
                    best = Some((e, ne));
                }
            }
            if orig == T::zero() || nv == T::zero() {
                let (e, ne) = best.expect("m > j ensures a completion vector");
                *v = e;
                nv = ne;
            }
        }
        let inv = T::one() / nv;
        v.iter_mut().for_each(|z| *z = *z * inv);
    }
}

fn project_out<T: Real>(basis: &[Vec<Complex<T>>], v: &mut [Complex<T>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}
