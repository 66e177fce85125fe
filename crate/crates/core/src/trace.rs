//! Stochastic estimation of the number of eigenvalues enclosed by a contour.

use serde::Serialize;

use crate::contour::EllipseContour;
use crate::dense::{dot, DenseMatrix};
use crate::error::Result;
use crate::filter::resolvent_sum;
use crate::random::{rademacher_matrix, seeded_rng};
use crate::scalar::Real;
use crate::solver::FactorizationCache;
use crate::sparse::{Mode, SparsePencil};

#[derive(Clone, Debug, Serialize)]
pub struct TraceEstimate {
    pub k_hat: f64,
    pub samples: usize,
    /// Real parts of the per-sample quadratic forms.
    pub values: Vec<f64>,
    /// Imaginary parts, kept to expose any loss of Hermitian structure.
    pub imag: Vec<f64>,
    pub std_dev: f64,
    pub nodes: usize,
}

impl TraceEstimate {
    fn from_samples(re: Vec<f64>, im: Vec<f64>, nodes: usize) -> Self {
        let k = re.len();
        let mean = re.iter().sum::<f64>() / k as f64;
        let var = if k > 1 { re.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64 } else { 0.0 };
        TraceEstimate { k_hat: mean, samples: k, values: re, imag: im, std_dev: var.sqrt(), nodes }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.std_dev / (self.samples as f64).sqrt()
    }

    /// Largest `|Im| / |Re|` over the samples.
    pub fn max_relative_imag(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.imag)
            .map(|(r, i)| i.abs() / r.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    pub samples: usize,
    pub seed: u64,
    /// Use the conjugate-pair saving for real data. Turning it off evaluates
    /// every node so that imaginary residue is actually measured.
    pub conjugate_reduction: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { samples: 30, seed: 0, conjugate_reduction: true }
    }
}

/// Hutchinson estimate `(1/K) sum y_i^* P~ y_i` with Rademacher probes of
/// length `m + n`, for `B = I`.
pub fn estimate_count_svd<T: Real>(
    pencil: &SparsePencil<T>,
    contour: &EllipseContour<T>,
    opts: TraceOptions,
    cache: &FactorizationCache<T>,
) -> Result<TraceEstimate> {
    let mut rng = seeded_rng(opts.seed);
    let y: DenseMatrix<T> = rademacher_matrix(pencil.dim(), opts.samples.max(1), &mut rng);
    let by = pencil.apply_b_check(&y)?;
    let py = resolvent_sum(pencil, contour, cache, &by, opts.conjugate_reduction)?;
    let (re, im) = quadratic_forms(&y, &py);
    Ok(TraceEstimate::from_samples(re, im, contour.n_nodes()))
}

/// Estimate through the Hermitian form `C^* [sum_j w_j (xi_j B_check - A_check)^{-1}] C`
/// with `C = diag(I_m, B^*)`, which is similar to the filter and has the
/// same trace. Probes have length `m + p`. In SVD mode this is exactly
/// [`estimate_count_svd`].
pub fn estimate_count_gsvd<T: Real>(
    pencil: &SparsePencil<T>,
    contour: &EllipseContour<T>,
    opts: TraceOptions,
    cache: &FactorizationCache<T>,
) -> Result<TraceEstimate> {
    let b = match (pencil.mode(), pencil.b()) {
        (Mode::Gsvd, Some(b)) => b,
        _ => return estimate_count_svd(pencil, contour, opts, cache),
    };
    let m = pencil.m();
    let mut rng = seeded_rng(opts.seed);
    let y: DenseMatrix<T> = rademacher_matrix(m + pencil.p(), opts.samples.max(1), &mut rng);
    let cy = DenseMatrix::vstack(&y.row_block(0, m), &b.adjoint_mul_dense(&y.row_block(m, y.rows())));
    let x = resolvent_sum(pencil, contour, cache, &cy, opts.conjugate_reduction)?;
    let (re, im) = quadratic_forms(&cy, &x);
    Ok(TraceEstimate::from_samples(re, im, contour.n_nodes()))
}

/// Dispatches on the pencil mode.
pub fn estimate_count<T: Real>(
    pencil: &SparsePencil<T>,
    contour: &EllipseContour<T>,
    opts: TraceOptions,
    cache: &FactorizationCache<T>,
) -> Result<TraceEstimate> {
    match pencil.mode() {
        Mode::Svd => estimate_count_svd(pencil, contour, opts, cache),
        Mode::Gsvd => estimate_count_gsvd(pencil, contour, opts, cache),
    }
}

/// Per-sample `y^* P y` evaluated with the plain (non-Hermitian) filter, for
/// comparison with the symmetrized form.
pub fn naive_gsvd_samples<T: Real>(
    pencil: &SparsePencil<T>,
    contour: &EllipseContour<T>,
    opts: TraceOptions,
    cache: &FactorizationCache<T>,
) -> Result<TraceEstimate> {
    estimate_count_svd(pencil, contour, opts, cache)
}

fn quadratic_forms<T: Real>(y: &DenseMatrix<T>, py: &DenseMatrix<T>) -> (Vec<f64>, Vec<f64>) {
    (0..y.cols())
        .map(|i| {
            let v = dot(y.col(i), py.col(i));
            (v.re.to_f64_lossy(), v.im.to_f64_lossy())
        })
        .unzip()
}

/// `ceil(1.5 * max(k_hat, 0)) + 5`.
pub fn auto_subspace_size(k_hat: f64) -> usize {
    (1.5 * k_hat.max(0.0)).ceil() as usize + 5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_rule() {
        assert_eq!(auto_subspace_size(8.42), 18);
        assert_eq!(auto_subspace_size(0.0), 5);
        assert_eq!(auto_subspace_size(-0.3), 5);
        assert_eq!(auto_subspace_size(16.47), 30);
    }
}
