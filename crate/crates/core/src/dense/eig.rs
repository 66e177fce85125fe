use num_complex::Complex;

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{abs2, creal, czero, Real};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `h = vectors * diag(values) * vectors^*`, values ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig<T: Real> {
    pub values: Vec<T>,
    pub vectors: DenseMatrix<T>,
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// The input is checked for Hermitian symmetry (relative Frobenius
/// asymmetry), symmetrized, then driven to diagonal form by two-sided
/// rotations `J = D R` where `D` carries the phase of the pivot entry.
pub fn hermitian_eig<T: Real>(h: &DenseMatrix<T>) -> Result<HermitianEig<T>> {
    let n = h.rows();
    if n != h.cols() {
        return Err(Error::DimensionMismatch(format!("hermitian_eig expects square input, got {}x{}", n, h.cols())));
    }
    let fro = h.frobenius_norm();
    let asym = h.sub(&h.adjoint()).frobenius_norm();
    // Frobenius norms bound the 2-norm within sqrt(n); the constant keeps the
    // check meaningful at 1e-12 relative in double precision.
    if asym > T::epsilon() * T::of(4500.0) * fro {
        let rel = if fro > T::zero() { (asym / fro).to_f64_lossy() } else { f64::INFINITY };
        return Err(Error::NotHermitian(rel));
    }
    let half = T::of(0.5);
    let mut a = h.add(&h.adjoint()).scale_real(half);
    let mut v = DenseMatrix::<T>::identity(n);
    if n == 0 || fro == T::zero() {
        return Ok(HermitianEig { values: vec![T::zero(); n], vectors: v });
    }
    for i in 0..n {
        a[(i, i)] = creal(a[(i, i)].re);
    }

    let skip = T::epsilon() * fro * T::of(0.01) / T::of_usize(n);
    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off = off_diagonal_norm(&a);
        if off <= T::epsilon() * fro {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= skip {
                    continue;
                }
                rotated = true;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (g + g);
                let t = if theta >= T::zero() {
                    T::one() / (theta + (T::one() + theta * theta).sqrt())
                } else {
                    -T::one() / (-theta + (T::one() + theta * theta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let ep = apq.conj() / g;
                rotate_columns(&mut a, p, q, c, s, ep);
                rotate_rows(&mut a, p, q, c, s, ep.conj());
                rotate_columns(&mut v, p, q, c, s, ep);
                a[(p, q)] = czero();
                a[(q, p)] = czero();
                a[(p, p)] = creal(a[(p, p)].re);
                a[(q, q)] = creal(a[(q, q)].re);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    Ok(HermitianEig { values, vectors: v.select_columns(&order) })
}

fn off_diagonal_norm<T: Real>(a: &DenseMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for j in 0..n {
        for (i, z) in a.col(j).iter().enumerate() {
            if i != j {
                s += abs2(*z);
            }
        }
    }
    s.sqrt()
}

/// Columns: `x_p' = c x_p - s e x_q`, `x_q' = s x_p + c e x_q`.
fn rotate_columns<T: Real>(m: &mut DenseMatrix<T>, p: usize, q: usize, c: T, s: T, e: Complex<T>) {
    let (xp, xq) = m.col_pair_mut(p, q);
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let (u, w) = (*a, *b);
        *a = u * c - e * w * s;
        *b = u * s + e * w * c;
    }
}

/// Rows, with the conjugate phase supplied by the caller.
fn rotate_rows<T: Real>(m: &mut DenseMatrix<T>, p: usize, q: usize, c: T, s: T, e: Complex<T>) {
    for k in 0..m.cols() {
        let (u, w) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = u * c - e * w * s;
        m[(q, k)] = u * s + e * w * c;
    }
}
