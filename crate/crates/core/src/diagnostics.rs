//! Numerical checks of the subspace-iteration bounds behind the augmented
//! first step: the inverse-square-root lemma, the block structure of an
//! orthonormal basis of `span(AX)`, the eigenvector perturbation bound
//! after Rayleigh-Ritz, and the one-step tangent recurrence.
//!
//! Every check builds the objects the argument uses (bases, blocks,
//! polar factors) and evaluates both sides, so a mistake in the
//! construction shows up as a violated flag.

use num_complex::Complex;
use serde::Serialize;

use crate::dense::{hermitian_eig, jacobi_svd, lu_solve, qr_orthonormalize, DenseMatrix};
use crate::error::{Error, Result};
use crate::random::{gaussian_matrix, random_orthonormal, seeded_rng, SeededRng};
use crate::scalar::Real;

/// `a <= b` up to rounding: relative `1e-10` plus absolute `1e-13`.
fn le<T: Real>(a: T, b: T) -> bool {
    a <= b * (T::one() + T::of(1e-10)) + T::of(1e-13)
}

/// `f(H)` for Hermitian `H` through its eigendecomposition.
pub fn hermitian_function<T: Real>(h: &DenseMatrix<T>, f: impl Fn(T) -> T) -> Result<DenseMatrix<T>> {
    let e = hermitian_eig(h)?;
    let fv: Vec<T> = e.values.iter().map(|&x| f(x)).collect();
    Ok(e.vectors.scale_columns(&fv).matmul(&e.vectors.adjoint()))
}

/// `H^{-1/2}` for Hermitian positive definite `H`.
fn inv_sqrt<T: Real>(h: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    hermitian_function(h, |x| T::one() / x.sqrt())
}

fn inverse<T: Real>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    lu_solve(a, &DenseMatrix::identity(a.rows()))
}

/// Tangent of the largest principal angle between `span(u)` and `span(x)`,
/// with `dim span(x) <= dim span(u)`. Cosines are the singular values of
/// `Q_u^* Q_x`; `tan = sqrt(1 - c_min^2) / c_min`, with the sine taken from
/// the projection residual when the angle is small.
pub fn tan_angle<T: Real>(u: &DenseMatrix<T>, x: &DenseMatrix<T>) -> Result<T> {
    let tol = T::rank_tol_base();
    let (qu, _) = qr_orthonormalize(u, tol)?;
    let (qx, rx) = qr_orthonormalize(x, tol)?;
    if rx > qu.cols() {
        return Ok(T::infinity());
    }
    let proj = qu.adjoint_matmul(&qx);
    // Small angles lose everything below sqrt(eps) through the cosine, so
    // read the sine off the residual `Q_x - Q_u Q_u^* Q_x` instead.
    let resid = qx.sub(&qu.matmul(&proj));
    let s = resid.two_norm();
    if s < T::of(0.5) {
        return Ok(s / (T::one() - s * s).sqrt());
    }
    let f = jacobi_svd(&proj)?;
    let c = f.sigma.iter().copied().fold(T::one(), T::min).min(T::one());
    if c <= T::zero() {
        return Ok(T::infinity());
    }
    Ok((T::one() - c * c).max(T::zero()).sqrt() / c)
}

/// Eigendecomposition with eigenvalues sorted by decreasing modulus.
fn eig_by_modulus<T: Real>(a: &DenseMatrix<T>) -> Result<(Vec<T>, DenseMatrix<T>)> {
    let e = hermitian_eig(a)?;
    let mut idx: Vec<usize> = (0..e.values.len()).collect();
    idx.sort_by(|&i, &j| e.values[j].abs().partial_cmp(&e.values[i].abs()).unwrap_or(std::cmp::Ordering::Equal));
    Ok((idx.iter().map(|&i| e.values[i]).collect(), e.vectors.select_columns(&idx)))
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `||(I + M)^{-1/2} - I||_2 <= ||M||_2 / 2` for Hermitian PSD `M`.
pub fn lemma0_check<T: Real>(m_psd: &DenseMatrix<T>) -> Result<LemmaReport> {
    let n = m_psd.rows();
    let e = hermitian_eig(m_psd)?;
    let scale = e.values.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let min = e.values.iter().copied().fold(T::infinity(), T::min);
    if n > 0 && min < -T::of(1e-12) * scale.max(T::one()) {
        return Err(Error::NotPsd(min.to_f64_lossy()));
    }
    let eye = DenseMatrix::identity(n);
    let f = inv_sqrt(&eye.add(m_psd))?;
    let lhs = f.sub(&eye).two_norm();
    let rhs = m_psd.two_norm() / T::of(2.0);
    Ok(LemmaReport { lhs: lhs.to_f64_lossy(), rhs: rhs.to_f64_lossy(), holds: lhs <= rhs + T::of(1e-12) })
}

/// Blocks of the orthonormal basis `Y` of `span(AX)` written in the
/// eigenbasis as `Y = U_l + [U_k, U_{l\k}, U_perp] [E11 E12; E21 E22; F1 F2]`.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceAngleReport {
    /// `tan angle(U_l, X)`.
    pub tan_angle: f64,
    pub eta_tilde: f64,
    pub eta_hat: f64,
    pub e11: f64,
    pub e12: f64,
    pub e21: f64,
    pub e22: f64,
    pub f1: f64,
    pub f2: f64,
    /// `||Y^* Y - I||_2`.
    pub orthonormality: f64,
    /// Largest component of `AX` (column-normalized) outside `span(Y)`.
    pub span_defect: f64,
    pub e11_ok: bool,
    pub e12_ok: bool,
    pub e21_ok: bool,
    pub e22_ok: bool,
    pub f1_ok: bool,
    pub f2_ok: bool,
}

impl SubspaceAngleReport {
    pub fn all_hold(&self) -> bool {
        self.e11_ok && self.e12_ok && self.e21_ok && self.e22_ok && self.f1_ok && self.f2_ok
    }
}

/// Builds `Y` exactly as the argument does: with `X = U [X_1; X_2]`,
/// `X_3 = X_2 X_1^{-1}` and `B = [I; L_perp X_3 L_l^{-1}]`, orthonormalize
/// the leading `k` columns of `B` by `(B_k^* B_k)^{-1/2}`, then the rest
/// against them. Eigenvalues are ordered by decreasing modulus and
/// `|lambda_l| > |lambda_{l+1}|` is required.
pub fn thm1_block_check<T: Real>(a: &DenseMatrix<T>, x: &DenseMatrix<T>, k: usize) -> Result<SubspaceAngleReport> {
    let n = a.rows();
    let l = x.cols();
    if x.rows() != n || k == 0 || k > l || l >= n {
        return Err(Error::DimensionMismatch(format!("need 1 <= k <= l < n, got k={k}, l={l}, n={n}")));
    }
    let (lam, u) = eig_by_modulus(a)?;
    if lam[n - 1] == T::zero() {
        return Err(Error::InvalidParameter("matrix must be nonsingular".into()));
    }
    if !(lam[l - 1].abs() > lam[l].abs()) {
        return Err(Error::DegenerateSplit(format!("|lambda_l| = |lambda_(l+1)| at l = {l}")));
    }
    let coords = u.adjoint_matmul(x);
    let x1 = coords.row_block(0, l);
    let x2 = coords.row_block(l, n);
    let x1_inv = inverse(&x1)?;
    let x3 = x2.matmul(&x1_inv);
    let lam_perp: Vec<T> = lam[l..].to_vec();
    let inv_l: Vec<T> = lam[..l].iter().map(|&v| T::one() / v).collect();
    // G = L_perp X_3 L_l^{-1}, split into its first k and last l-k columns.
    let g = DenseMatrix::diag_real(&lam_perp).matmul(&x3).scale_columns(&inv_l);
    let g1 = g.col_block(0, k);
    let g2 = g.col_block(k, l);
    let eta_tilde = g1.two_norm();
    let eta_hat = if k < l { g2.two_norm() } else { T::zero() };

    let b = DenseMatrix::vstack(&DenseMatrix::identity(l), &g);
    let bk = b.col_block(0, k);
    let qk = bk.matmul(&inv_sqrt(&bk.adjoint_matmul(&bk))?);
    let q = if k < l {
        let bl = b.col_block(k, l);
        let c = bl.sub(&qk.matmul(&qk.adjoint_matmul(&bl)));
        let ql = c.matmul(&inv_sqrt(&c.adjoint_matmul(&c))?);
        DenseMatrix::hstack(&[&qk, &ql])
    } else {
        qk
    };
    let y = u.matmul(&q);

    // Blocks read back from Y in the eigenbasis.
    let mut d = u.adjoint_matmul(&y);
    for i in 0..l {
        d[(i, i)] -= Complex::new(T::one(), T::zero());
    }
    let blk = |r0: usize, r1: usize, c0: usize, c1: usize| -> T {
        if r0 == r1 || c0 == c1 {
            T::zero()
        } else {
            d.row_block(r0, r1).col_block(c0, c1).two_norm()
        }
    };
    let e11 = blk(0, k, 0, k);
    let e12 = blk(0, k, k, l);
    let e21 = blk(k, l, 0, k);
    let e22 = blk(k, l, k, l);
    let f1 = blk(l, n, 0, k);
    let f2 = blk(l, n, k, l);

    let ax = a.matmul(x);
    let axn = ax.scale_columns(&ax.column_norms().iter().map(|&v| T::one() / v).collect::<Vec<_>>());
    let span_defect = axn.sub(&y.matmul(&y.adjoint_matmul(&axn))).two_norm();
    let half = T::of(0.5);
    let tan = tan_angle(&u.col_block(0, l), x)?;
    Ok(SubspaceAngleReport {
        tan_angle: tan.to_f64_lossy(),
        eta_tilde: eta_tilde.to_f64_lossy(),
        eta_hat: eta_hat.to_f64_lossy(),
        e11: e11.to_f64_lossy(),
        e12: e12.to_f64_lossy(),
        e21: e21.to_f64_lossy(),
        e22: e22.to_f64_lossy(),
        f1: f1.to_f64_lossy(),
        f2: f2.to_f64_lossy(),
        orthonormality: y.orthonormality_defect().to_f64_lossy(),
        span_defect: span_defect.to_f64_lossy(),
        e11_ok: le(e11, half * eta_tilde * eta_tilde),
        e12_ok: le(e12, eta_tilde * eta_hat),
        e21_ok: e21 <= T::of(1e-12),
        e22_ok: le(e22, half * eta_hat * eta_hat),
        f1_ok: le(f1, eta_tilde),
        f2_ok: le(f2, eta_hat),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbationReport {
    pub epsilon: f64,
    pub d11: f64,
    pub d12: f64,
    pub d21: f64,
    pub d22: f64,
    pub d11_ok: bool,
    pub d12_ok: bool,
    pub d21_ok: bool,
    pub d22_ok: bool,
}

impl PerturbationReport {
    pub fn all_hold(&self) -> bool {
        self.d11_ok && self.d12_ok && self.d21_ok && self.d22_ok
    }
}

/// Nearest unitary matrix (polar factor) of a square block.
fn polar_unitary<T: Real>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if a.rows() == 0 {
        return Ok(a.clone());
    }
    let f = jacobi_svd(a)?;
    Ok(f.u.matmul(&f.w.adjoint()))
}

/// Eigenvectors of `H = diag(lambda) + delta_h` stay block diagonal up to
/// unitary factors. With `[alpha, beta]` the hull of `lambda[..k]`, the
/// eigenvalues of `H` outside `(alpha - delta, beta + delta)` must number
/// exactly `l - k`; they form the second block. `Q_1`, `Q_2` are the polar
/// factors of the diagonal blocks of the eigenvector matrix, and
/// `epsilon = ||delta_h[:, ..k]||_2 / delta`.
pub fn perturbation_check<T: Real>(lambda: &[T], delta_h: &DenseMatrix<T>, k: usize, delta: T) -> Result<PerturbationReport> {
    let l = lambda.len();
    if delta_h.shape() != (l, l) || k == 0 || k > l {
        return Err(Error::DimensionMismatch(format!("need an {l}x{l} perturbation and 1 <= k <= {l}")));
    }
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter("gap must be positive".into()));
    }
    let alpha = lambda[..k].iter().copied().fold(T::infinity(), T::min);
    let beta = lambda[..k].iter().copied().fold(T::neg_infinity(), T::max);
    let h = DenseMatrix::diag_real(lambda).add(delta_h);
    let e = hermitian_eig(&h)?;
    let outside = |v: T| v <= alpha - delta || v >= beta + delta;
    let (inner, outer): (Vec<usize>, Vec<usize>) = (0..l).partition(|&i| !outside(e.values[i]));
    if outer.len() != l - k || lambda[k..].iter().any(|&v| v > alpha && v < beta) {
        return Err(Error::SplitViolated(format!("{} eigenvalues outside the enlarged interval, expected {}", outer.len(), l - k)));
    }
    let order: Vec<usize> = inner.into_iter().chain(outer).collect();
    let q = e.vectors.select_columns(&order);
    let q11 = q.row_block(0, k).col_block(0, k);
    let q22 = q.row_block(k, l).col_block(k, l);
    let d11 = q11.sub(&polar_unitary(&q11)?).two_norm();
    let d22 = if k < l { q22.sub(&polar_unitary(&q22)?).two_norm() } else { T::zero() };
    let d12 = if k < l { q.row_block(0, k).col_block(k, l).two_norm() } else { T::zero() };
    let d21 = if k < l { q.row_block(k, l).col_block(0, k).two_norm() } else { T::zero() };
    let eps = delta_h.col_block(0, k).two_norm() / delta;
    Ok(PerturbationReport {
        epsilon: eps.to_f64_lossy(),
        d11: d11.to_f64_lossy(),
        d12: d12.to_f64_lossy(),
        d21: d21.to_f64_lossy(),
        d22: d22.to_f64_lossy(),
        d11_ok: le(d11, eps * eps),
        d12_ok: le(d12, eps),
        d21_ok: le(d21, eps),
        d22_ok: le(d22, eps * eps),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    /// `tan angle(U_k, AX)`.
    pub lhs: f64,
    /// `|l_{l+1}|/|l_k| tan angle(U_k, X) + ||L_{l\k} X_{l\k} X_k^{-1}|| / |l_k|`.
    pub rhs: f64,
    pub holds: bool,
    pub tan_before: f64,
    /// `tan angle(U_k, AX) / tan angle(U_k, X)`.
    pub ratio: f64,
    /// `|l_{l+1}|/|l_k| + kappa(X_k) ||L_{l\k} X_{l\k}|| / (|l_k| ||X_perp||)`.
    pub ratio_bound: f64,
    pub ratio_holds: bool,
    pub kappa_xk: f64,
    /// `|l_{l+1}| / |l_k|`.
    pub dominant_rate: f64,
    /// `||X_perp|| / ||X_{l\k}||`, recorded without any claim.
    pub perp_to_middle: f64,
}

/// One step of subspace iteration on a `k`-column block: compares
/// `tan angle(U_k, AX)` with the recurrence bound, and the ratio form with
/// `kappa(X_k)`. Eigenvalues are ordered by decreasing modulus.
pub fn rate_check<T: Real>(a: &DenseMatrix<T>, x: &DenseMatrix<T>, k: usize, l: usize) -> Result<RateReport> {
    let n = a.rows();
    if x.rows() != n || x.cols() != k || k == 0 || k > l || l >= n {
        return Err(Error::DimensionMismatch(format!("need an n x k block with 1 <= k <= l < n, got k={k}, l={l}, n={n}")));
    }
    let (lam, u) = eig_by_modulus(a)?;
    let lk = lam[k - 1].abs();
    if lk == T::zero() {
        return Err(Error::InvalidParameter("lambda_k must be nonzero".into()));
    }
    let coords = u.adjoint_matmul(x);
    let xk = coords.row_block(0, k);
    let xm = coords.row_block(k, l);
    let xp = coords.row_block(l, n);
    let xk_inv = inverse(&xk)?;
    let uk = u.col_block(0, k);
    let tan_before = tan_angle(&uk, x)?;
    let lhs = tan_angle(&uk, &a.matmul(x))?;
    let lm_xm = DenseMatrix::diag_real(&lam[k..l]).matmul(&xm);
    let middle = if k < l { lm_xm.matmul(&xk_inv).two_norm() } else { T::zero() };
    let rate = lam[l].abs() / lk;
    let rhs = rate * tan_before + middle / lk;
    let sv = jacobi_svd(&xk)?.sigma;
    let kappa = sv[0] / sv[sv.len() - 1];
    let xp_norm = xp.two_norm();
    let xm_norm = if k < l { xm.two_norm() } else { T::zero() };
    let lm_norm = if k < l { lm_xm.two_norm() } else { T::zero() };
    let ratio = if tan_before > T::zero() { lhs / tan_before } else { T::zero() };
    let ratio_bound = if xp_norm > T::zero() { rate + kappa * lm_norm / (lk * xp_norm) } else { T::infinity() };
    Ok(RateReport {
        lhs: lhs.to_f64_lossy(),
        rhs: rhs.to_f64_lossy(),
        holds: le(lhs, rhs),
        tan_before: tan_before.to_f64_lossy(),
        ratio: ratio.to_f64_lossy(),
        ratio_bound: ratio_bound.to_f64_lossy(),
        ratio_holds: tan_before == T::zero() || le(ratio, ratio_bound),
        kappa_xk: kappa.to_f64_lossy(),
        dominant_rate: rate.to_f64_lossy(),
        perp_to_middle: if xm_norm > T::zero() { (xp_norm / xm_norm).to_f64_lossy() } else { f64::INFINITY },
    })
}

/// Real symmetric matrix `Q diag(eigs) Q^T` with a random orthogonal `Q`.
pub fn hermitian_with_spectrum<T: Real>(eigs: &[T], rng: &mut SeededRng) -> DenseMatrix<T> {
    let q = random_orthonormal::<T>(eigs.len(), eigs.len(), rng);
    let h = q.scale_columns(eigs).matmul(&q.adjoint());
    h.add(&h.adjoint()).scale_real(T::of(0.5))
}

/// Random PSD matrix `G G^T / cols` of size `n` with rank at most `rank`.
pub fn random_psd<T: Real>(n: usize, rank: usize, scale: T, seed: u64) -> DenseMatrix<T> {
    let mut rng = seeded_rng(seed);
    let g: DenseMatrix<T> = gaussian_matrix(n, rank.max(1), &mut rng);
    let m = g.matmul(&g.adjoint()).scale_real(scale / T::of_usize(rank.max(1)));
    m.add(&m.adjoint()).scale_real(T::of(0.5))
}
