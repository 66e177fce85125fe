//! The building blocks of one subspace iteration.

use std::cmp::Ordering;

use crate::dense::{orthonormalize_with_shadow, qr_orthonormalize, small_svd};
use crate::error::{Error, Result};
use crate::filter::SubspacePair;
use crate::scalar::Real;
use crate::sparse::{Mode, SparsePencil};

/// Default truncation threshold `rank_tol_base * sqrt(rows)`.
pub fn default_rank_tol<T: Real>(rows: usize) -> T {
    T::rank_tol_base() * T::of_usize(rows.max(1)).sqrt()
}

/// Enforces `U^*U = I` and `(BW)^*(BW) = I`.
///
/// `U` is orthonormalized directly. For `W` the Gram-Schmidt runs on `B W`
/// while the same column operations are replayed on `W`, which yields
/// `W R^{-1}`; a second pass on the result cleans up the rounding amplified
/// by an ill-conditioned `R`. Both blocks are cut to their common rank,
/// keeping leading columns.
pub fn b_orthonormalize_pair<T: Real>(pencil: &SparsePencil<T>, raw: &SubspacePair<T>) -> Result<SubspacePair<T>> {
    b_orthonormalize_pair_with(pencil, raw, None)
}

pub fn b_orthonormalize_pair_with<T: Real>(
    pencil: &SparsePencil<T>,
    raw: &SubspacePair<T>,
    rank_tol: Option<T>,
) -> Result<SubspacePair<T>> {
    if raw.u.rows() != pencil.m() || raw.w.rows() != pencil.n() {
        return Err(Error::DimensionMismatch(format!(
            "pair has {}+{} rows, pencil needs {}+{}",
            raw.u.rows(),
            raw.w.rows(),
            pencil.m(),
            pencil.n()
        )));
    }
    let tol_u = rank_tol.unwrap_or_else(|| default_rank_tol(pencil.m()));
    let tol_w = rank_tol.unwrap_or_else(|| default_rank_tol(pencil.p()));
    let (u, _) = qr_orthonormalize(&raw.u, tol_u)?;
    let w = match pencil.mode() {
        Mode::Svd => {
            let (w1, _) = qr_orthonormalize(&raw.w, tol_w)?;
            qr_orthonormalize(&w1, tol_w)?.0
        }
        Mode::Gsvd => {
            let mut w = raw.w.clone();
            for _pass in 0..2 {
                let bw = pencil.apply_b(&w);
                let out = orthonormalize_with_shadow(&bw, Some(&w), tol_w)?;
                w = out.shadow.expect("shadow requested");
            }
            w
        }
    };
    let r = u.cols().min(w.cols());
    let keep: Vec<usize> = (0..r).collect();
    Ok(SubspacePair { u: u.select_columns(&keep), w: w.select_columns(&keep), orthonormalized: true })
}

/// Structured Rayleigh-Ritz: SVD of `A_p = U^* A W`, then rotate both bases
/// so that `U^* A W = diag(sigma)`. Ritz values come out nonnegative and
/// descending.
pub fn rayleigh_ritz<T: Real>(pencil: &SparsePencil<T>, pair: &SubspacePair<T>) -> Result<(Vec<T>, SubspacePair<T>)> {
    if !pair.orthonormalized {
        return Err(Error::NotOrthonormalized);
    }
    let aw = pencil.a().mul_dense(&pair.w);
    let ap = pair.u.adjoint_matmul(&aw);
    let f = small_svd(&ap)?;
    let u = pair.u.matmul(&f.u);
    let w = pair.w.matmul(&f.w);
    Ok((f.sigma, SubspacePair { u, w, orthonormalized: true }))
}

/// Residual norms of Ritz triplets and their convergence flags.
#[derive(Clone, Debug, Default)]
pub struct ResidualCheck<T: Real> {
    /// `||A w_i - u_i sigma_i||`.
    pub r1: Vec<T>,
    /// `||A^* u_i - B^*B w_i sigma_i||`.
    pub r2: Vec<T>,
    /// `max(r1 / scale1, r2 / scale2)`.
    pub rel: Vec<T>,
    pub converged: Vec<bool>,
}

/// Evaluates both residual criteria with the pencil's cached norm estimates:
/// `r1 <= tol (||A|| ||w|| + sigma)` and `r2 <= tol (||A|| + sigma ||B||^2 ||w||)`.
pub fn check_convergence<T: Real>(
    pencil: &SparsePencil<T>,
    sigma: &[T],
    pair: &SubspacePair<T>,
    tol: T,
) -> ResidualCheck<T> {
    let k = sigma.len();
    let aw = pencil.a().mul_dense(&pair.w);
    let atu = pencil.a().adjoint_mul_dense(&pair.u);
    let gw = pencil.apply_btb(&pair.w);
    let an = pencil.a_norm();
    let bn2 = pencil.b_norm() * pencil.b_norm();
    let mut out = ResidualCheck { r1: Vec::with_capacity(k), r2: Vec::with_capacity(k), rel: Vec::with_capacity(k), converged: Vec::with_capacity(k) };
    for i in 0..k {
        let s = sigma[i];
        let wn = crate::dense::norm2(pair.w.col(i));
        let r1 = diff_norm(aw.col(i), pair.u.col(i), s);
        let r2 = diff_norm(atu.col(i), gw.col(i), s);
        let sc1 = an * wn + s.abs();
        let sc2 = an + s.abs() * bn2 * wn;
        let rel = safe_div(r1, sc1).max(safe_div(r2, sc2));
        out.r1.push(r1);
        out.r2.push(r2);
        out.rel.push(rel);
        out.converged.push(r1 <= tol * sc1 && r2 <= tol * sc2);
    }
    out
}

fn safe_div<T: Real>(a: T, b: T) -> T {
    if b > T::zero() {
        a / b
    } else if a == T::zero() {
        T::zero()
    } else {
        T::infinity()
    }
}

/// `||x - y s||`.
fn diff_norm<T: Real>(x: &[num_complex::Complex<T>], y: &[num_complex::Complex<T>], s: T) -> T {
    let d: Vec<_> = x.iter().zip(y).map(|(a, b)| *a - *b * s).collect();
    crate::dense::norm2(&d)
}

/// Residual slack for triplets that converged in an earlier iteration.
pub const LOCK_SLACK: f64 = 10.0;

/// Keeps triplets that were converged in the previous iteration flagged as
/// converged while their residual stays within `LOCK_SLACK * tol`. Re-mixing
/// in the Rayleigh-Ritz step moves residuals sitting at the accuracy floor
/// back and forth across `tol`; without the slack a locked value can drop out
/// and trip the stagnation test. A triplet is matched to an earlier one by
/// its Ritz value (relative distance below `1e-8`).
pub fn retain_locked<T: Real>(sigma: &[T], check: &mut ResidualCheck<T>, previous: &[T], tol: T) {
    let slack = tol * T::of(LOCK_SLACK);
    for (i, &s) in sigma.iter().enumerate() {
        if check.converged[i] || check.rel[i] > slack {
            continue;
        }
        if previous.iter().any(|&p| (s - p).abs() <= T::of(1e-8) * p.abs().max(T::min_positive_value())) {
            check.converged[i] = true;
        }
    }
}

pub fn in_interval<T: Real>(s: T, interval: (T, T)) -> bool {
    s > interval.0 && s < interval.1
}

fn distance_to_interval<T: Real>(s: T, interval: (T, T)) -> T {
    if s <= interval.0 {
        interval.0 - s
    } else if s >= interval.1 {
        s - interval.1
    } else {
        T::zero()
    }
}

/// Indices of the `l` components to keep: Ritz values inside the interval
/// by ascending residual, then outside ones by distance to the interval
/// (ties by residual). The sort is stable, so full ties keep input order.
pub fn select_indices<T: Real>(sigma: &[T], residuals: &[T], interval: (T, T), l: usize) -> Vec<usize> {
    let cmp = |a: T, b: T| a.partial_cmp(&b).unwrap_or(Ordering::Equal);
    let (mut inside, mut outside): (Vec<usize>, Vec<usize>) = (0..sigma.len()).partition(|&i| in_interval(sigma[i], interval));
    inside.sort_by(|&i, &j| cmp(residuals[i], residuals[j]));
    outside.sort_by(|&i, &j| {
        cmp(distance_to_interval(sigma[i], interval), distance_to_interval(sigma[j], interval))
            .then(cmp(residuals[i], residuals[j]))
    });
    inside.extend(outside);
    inside.truncate(l);
    inside
}

/// Applies [`select_indices`] to the Ritz triplets.
pub fn select_components<T: Real>(
    sigma: &[T],
    pair: &SubspacePair<T>,
    residuals: &[T],
    interval: (T, T),
    l: usize,
) -> (Vec<T>, SubspacePair<T>, Vec<usize>) {
    let idx = select_indices(sigma, residuals, interval, l);
    let s = idx.iter().map(|&i| sigma[i]).collect();
    (s, pair.select(&idx), idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_prefers_inside_then_distance() {
        let sigma = [0.1, 1.2, 3.0, 1.5, 2.6, 0.95];
        let res = [1e-3, 1e-5, 1e-9, 1e-2, 1e-1, 1e-4];
        let idx = select_indices(&sigma, &res, (1.0, 2.0), 3);
        assert_eq!(idx, vec![1, 3, 5]);
    }

    #[test]
    fn more_inside_than_l_keeps_lowest_residuals() {
        let sigma = [1.1, 1.2, 1.3, 1.4];
        let res = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(select_indices(&sigma, &res, (1.0, 2.0), 2), vec![1, 3]);
    }

    #[test]
    fn full_ties_preserve_order() {
        let sigma = [3.0, 0.0, 3.0, 0.0];
        let res = [1.0; 4];
        assert_eq!(select_indices(&sigma, &res, (1.0, 2.0), 4), vec![0, 1, 2, 3]);
    }
}
