//! Dense brute-force references for small problems: exact GSVD/SVD,
//! in-interval counts, filter traces, and constructed-GSVD fixtures.

use num_complex::Complex;

use crate::contour::EllipseContour;
use crate::dense::{cholesky, hermitian_eig, jacobi_svd, lower_adjoint_solve, lower_solve, DenseMatrix};
use crate::error::{Error, Result};
use crate::filter::{dense_filter_matrix, SubspacePair};
use crate::random::{gaussian_matrix, random_orthonormal, seeded_rng};
use crate::scalar::Real;
use crate::sparse::SparsePencil;

/// Largest column count the dense reference accepts.
pub const MAX_DENSE_COLS: usize = 500;

/// Full dense GSVD of `(A, B)` (or SVD when `B` is absent).
///
/// Values are ascending. `w` is normalized so that `U^* A W = diag(sigma)`
/// and `(BW)^*(BW) = I`; `x = w * diag(beta)` with `alpha^2 + beta^2 = 1`.
/// When `m < n` only the `m` structurally nonzero values are kept.
#[derive(Clone, Debug)]
pub struct DenseGsvdReference<T: Real> {
    pub sigma: Vec<T>,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub u: DenseMatrix<T>,
    pub v: DenseMatrix<T>,
    pub w: DenseMatrix<T>,
    pub x: DenseMatrix<T>,
    /// `max(||A x_i - u_i alpha_i||, ||B x_i - v_i beta_i||)` per component.
    pub residuals: Vec<T>,
}

impl<T: Real> DenseGsvdReference<T> {
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn in_interval(&self, interval: (T, T)) -> Vec<T> {
        self.sigma.iter().copied().filter(|&s| s > interval.0 && s < interval.1).collect()
    }

    /// Columns of `U` and `W` for values inside the open interval,
    /// ascending.
    pub fn pair_in_interval(&self, interval: (T, T)) -> SubspacePair<T> {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| self.sigma[i] > interval.0 && self.sigma[i] < interval.1).collect();
        SubspacePair { u: self.u.select_columns(&idx), w: self.w.select_columns(&idx), orthonormalized: true }
    }
}

/// Dense GSVD by whitening the pencil. With `B^*B = L L^*`, the matrix
/// `L^{-1} A_check L^{-*}` is the Jordan-Wielandt matrix of `K = A L^{-*}`,
/// so its eigenpairs `(+-sigma, [p; +-q])` come from the SVD of `K`:
/// `u = p`, `w = L^{-*} q`.
pub fn dense_gsvd_reference<T: Real>(a: &DenseMatrix<T>, b: Option<&DenseMatrix<T>>) -> Result<DenseGsvdReference<T>> {
    let (m, n) = a.shape();
    if n > MAX_DENSE_COLS {
        return Err(Error::InvalidParameter(format!("dense reference limited to {MAX_DENSE_COLS} columns, got {n}")));
    }
    if let Some(b) = b {
        if b.cols() != n {
            return Err(Error::DimensionMismatch(format!("A has {n} columns, B has {}", b.cols())));
        }
    }
    let (k, l) = match b {
        Some(b) => {
            let g = b.adjoint_matmul(b);
            let l = cholesky(&g, T::of(1e-13))?;
            (lower_solve(&l, &a.adjoint()).adjoint(), Some(l))
        }
        None => (a.clone(), None),
    };
    let f = jacobi_svd(&k)?;
    let r = f.sigma.len();
    let order: Vec<usize> = (0..r).rev().collect();
    let sigma: Vec<T> = order.iter().map(|&i| f.sigma[i]).collect();
    let u = f.u.select_columns(&order);
    let q = f.w.select_columns(&order);
    let w = match &l {
        Some(l) => lower_adjoint_solve(l, &q),
        None => q,
    };
    let beta: Vec<T> = sigma.iter().map(|&s| T::one() / (T::one() + s * s).sqrt()).collect();
    let alpha: Vec<T> = sigma.iter().zip(&beta).map(|(&s, &c)| s * c).collect();
    let x = w.scale_columns(&beta);
    let v = match b {
        Some(b) => b.matmul(&w),
        None => w.clone(),
    };
    let ax = a.matmul(&x);
    let bx = match b {
        Some(b) => b.matmul(&x),
        None => x.clone(),
    };
    let residuals = (0..r)
        .map(|i| {
            let mut r1 = T::zero();
            let mut r2 = T::zero();
            for row in 0..m {
                r1 += (ax[(row, i)] - u[(row, i)].scale(alpha[i])).norm_sqr();
            }
            for row in 0..bx.rows() {
                r2 += (bx[(row, i)] - v[(row, i)].scale(beta[i])).norm_sqr();
            }
            r1.sqrt().max(r2.sqrt())
        })
        .collect();
    Ok(DenseGsvdReference { sigma, alpha, beta, u, v, w, x, residuals })
}

/// All eigenvalues of `(A_check, B_check)` through a full Hermitian
/// eigensolve of the whitened pencil, ascending. Slow; for pairing checks.
pub fn pencil_eigenvalues_dense<T: Real>(pencil: &SparsePencil<T>) -> Result<Vec<T>> {
    let (jw, bc) = pencil.dense_pencil();
    let m = pencil.m();
    let l = cholesky(&bc, T::of(1e-13))?;
    // L^{-1} A_check L^{-*}; L is block diagonal so only the off-diagonal blocks change.
    let lb = l.row_block(m, l.rows()).col_block(m, l.cols());
    let a12 = jw.row_block(0, m).col_block(m, jw.cols());
    let k = lower_solve(&lb, &a12.adjoint()).adjoint();
    let dim = pencil.dim();
    let mut h = DenseMatrix::zeros(dim, dim);
    for j in 0..k.cols() {
        for i in 0..m {
            h[(i, m + j)] = k[(i, j)];
            h[(m + j, i)] = k[(i, j)].conj();
        }
    }
    Ok(hermitian_eig(&h)?.values)
}

/// Number of reference values strictly inside `(alpha, beta)`.
pub fn count_in_interval<T: Real>(reference: &DenseGsvdReference<T>, interval: (T, T)) -> usize {
    reference.sigma.iter().filter(|&&s| s > interval.0 && s < interval.1).count()
}

/// `trace(sum_j w_j (xi_j B_check - A_check)^{-1} B_check)`, the quantity the
/// stochastic count estimator is unbiased for.
pub fn filter_trace<T: Real>(pencil: &SparsePencil<T>, contour: &EllipseContour<T>) -> Result<T> {
    Ok(dense_filter_matrix(pencil, contour)?.trace().re)
}

/// Constructed pencil `A = U C X^{-1}`, `B = V S X^{-1}` with known factors.
#[derive(Clone, Debug)]
pub struct SyntheticGsvd<T: Real> {
    pub a: DenseMatrix<T>,
    pub b: DenseMatrix<T>,
    /// Ascending.
    pub sigma: Vec<T>,
    pub c: Vec<T>,
    pub s: Vec<T>,
    pub u: DenseMatrix<T>,
    pub v: DenseMatrix<T>,
    pub x: DenseMatrix<T>,
}

impl<T: Real> SyntheticGsvd<T> {
    /// `W = X S^{-1}`, the normalization used by the solver.
    pub fn w(&self) -> DenseMatrix<T> {
        let inv: Vec<T> = self.s.iter().map(|&s| T::one() / s).collect();
        self.x.scale_columns(&inv)
    }

    /// Exact `(U, W)` columns for values inside the open interval.
    pub fn truth_pair(&self, interval: (T, T)) -> SubspacePair<T> {
        let idx: Vec<usize> = (0..self.sigma.len()).filter(|&i| self.sigma[i] > interval.0 && self.sigma[i] < interval.1).collect();
        SubspacePair { u: self.u.select_columns(&idx), w: self.w().select_columns(&idx), orthonormalized: true }
    }

    pub fn count_in_interval(&self, interval: (T, T)) -> usize {
        self.sigma.iter().filter(|&&s| s > interval.0 && s < interval.1).count()
    }

    pub fn pencil(&self) -> Result<SparsePencil<T>> {
        use crate::sparse::SparseMatrix;
        SparsePencil::gsvd(SparseMatrix::from_dense(&self.a), SparseMatrix::from_dense(&self.b))
    }
}

/// Builds a pencil with generalized singular values `sigma_spec` (one per
/// column, `n = sigma_spec.len()`), random orthonormal `U` (m x n), `V`
/// (p x n), and `X` with singular values log-spaced in `[1, cond_x]`.
pub fn make_synthetic_gsvd<T: Real>(m: usize, p: usize, n: usize, sigma_spec: &[T], cond_x: T, seed: u64) -> Result<SyntheticGsvd<T>> {
    if sigma_spec.len() != n || n == 0 {
        return Err(Error::InvalidParameter(format!("need {n} generalized singular values, got {}", sigma_spec.len())));
    }
    if m < n || p < n {
        return Err(Error::InvalidParameter(format!("need m, p >= n, got m={m}, p={p}, n={n}")));
    }
    if sigma_spec.iter().any(|&s| !(s > T::zero()) || !s.is_finite()) {
        return Err(Error::InvalidParameter("generalized singular values must be positive".into()));
    }
    if !(cond_x >= T::one()) {
        return Err(Error::InvalidParameter("cond_x must be at least 1".into()));
    }
    let mut sigma = sigma_spec.to_vec();
    sigma.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let s: Vec<T> = sigma.iter().map(|&x| T::one() / (T::one() + x * x).sqrt()).collect();
    let c: Vec<T> = sigma.iter().zip(&s).map(|(&x, &si)| x * si).collect();

    let mut rng = seeded_rng(seed);
    let u = random_orthonormal(m, n, &mut rng);
    let v = random_orthonormal(p, n, &mut rng);
    let q1 = random_orthonormal(n, n, &mut rng);
    let q2 = random_orthonormal(n, n, &mut rng);
    let log_c = cond_x.ln();
    let d: Vec<T> = (0..n)
        .map(|i| if n == 1 { T::one() } else { (log_c * T::of_usize(i) / T::of_usize(n - 1)).exp() })
        .collect();
    let dinv: Vec<T> = d.iter().map(|&x| T::one() / x).collect();
    let x = q1.scale_columns(&d).matmul(&q2.adjoint());
    let xinv = q2.scale_columns(&dinv).matmul(&q1.adjoint());
    let a = u.scale_columns(&c).matmul(&xinv);
    let b = v.scale_columns(&s).matmul(&xinv);
    Ok(SyntheticGsvd { a, b, sigma, c, s, u, v, x })
}

/// Initial-guess constructions used to stress the filter variants and the
/// refinement mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArtificialGuess {
    /// Built on the negative-pair vectors `[U; -W]`.
    NegativePair,
    /// `[U; W] + (1 - 1e-10) [U; -W]`: almost entirely negative-pair.
    NearlyNegativePair,
    /// `[U; W]` with noise of size `10^{-q} sqrt(m)`.
    Noisy(u32),
}

impl std::str::FromStr for ArtificialGuess {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq1" | "negative" => Ok(ArtificialGuess::NegativePair),
            "eq2" | "nearly-negative" => Ok(ArtificialGuess::NearlyNegativePair),
            other => {
                let q = other.strip_prefix("eq3:").or_else(|| other.strip_prefix("noisy:"));
                match q.and_then(|q| q.parse::<u32>().ok()) {
                    Some(q) => Ok(ArtificialGuess::Noisy(q)),
                    None => Err(Error::InvalidParameter(format!("unknown guess kind '{other}' (negative, nearly-negative, noisy:q)"))),
                }
            }
        }
    }
}

/// `[T, Q_{(m+n) x (l-k)}] Q_{l x l} + eps sqrt(m) Q_{(m+n) x l}` where `T` is
/// the stacked truth block selected by `kind` and every `Q` has orthonormal
/// columns.
pub fn make_artificial_guess<T: Real>(truth: &SubspacePair<T>, kind: ArtificialGuess, l: usize, seed: u64) -> Result<SubspacePair<T>> {
    let (m, n, k) = (truth.u.rows(), truth.w.rows(), truth.cols());
    if l < k || l > m + n {
        return Err(Error::InvalidParameter(format!("guess width {l} must lie in [{k}, {}]", m + n)));
    }
    let plus = truth.stacked();
    let minus = plus.flip_rows_from(m);
    let (base, eps) = match kind {
        ArtificialGuess::NegativePair => (minus, T::of(1e-12)),
        ArtificialGuess::NearlyNegativePair => {
            let mut b = plus.clone();
            b.add_assign_scaled(&minus, Complex::new(T::one() - T::of(1e-10), T::zero()));
            (b, T::of(1e-12))
        }
        ArtificialGuess::Noisy(q) => {
            if !matches!(q, 2 | 4 | 6 | 8 | 10 | 12) {
                return Err(Error::InvalidParameter(format!("noise exponent must be one of 2,4,...,12, got {q}")));
            }
            (plus, T::of(10f64.powi(-(q as i32))))
        }
    };
    let mut rng = seeded_rng(seed);
    let extra = random_orthonormal(m + n, l - k, &mut rng);
    let mix = random_orthonormal(l, l, &mut rng);
    let noise = random_orthonormal(m + n, l, &mut rng);
    let mut z = DenseMatrix::hstack(&[&base, &extra]).matmul(&mix);
    z.add_assign_scaled(&noise, Complex::new(eps * T::of_usize(m).sqrt(), T::zero()));
    Ok(SubspacePair::from_stacked(&z, m))
}

/// Gaussian `rows x cols` real matrix; convenience for tests.
pub fn gaussian_dense<T: Real>(rows: usize, cols: usize, seed: u64) -> DenseMatrix<T> {
    gaussian_matrix(rows, cols, &mut seeded_rng(seed))
}
