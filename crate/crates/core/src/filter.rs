//! Rational filters built from contour quadrature, and the four ways of
//! applying them to a trial subspace pair.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::contour::{EllipseContour, QuadratureNode};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver::FactorizationCache;
use crate::sparse::SparsePencil;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterVariant {
    /// `P+` applied to `[U; W]`.
    SimplePlus,
    /// `P+` preceded by a Rayleigh-Ritz step on the initial pair.
    SimplePlusRR,
    /// `P+ + P-`, with `P- = D P+ D` and `D = diag(I_m, -I_n)`.
    SumPlusMinus,
    /// `P+ [U U; W -W]` on the first iteration, `P+ [U; W]` afterwards.
    #[default]
    AugmentedPair,
}

impl FilterVariant {
    pub const ALL: [FilterVariant; 4] =
        [FilterVariant::SimplePlus, FilterVariant::SimplePlusRR, FilterVariant::SumPlusMinus, FilterVariant::AugmentedPair];

    pub fn name(self) -> &'static str {
        match self {
            FilterVariant::SimplePlus => "plus",
            FilterVariant::SimplePlusRR => "plus-rr",
            FilterVariant::SumPlusMinus => "sum",
            FilterVariant::AugmentedPair => "augmented",
        }
    }
}

impl std::str::FromStr for FilterVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(FilterVariant::SimplePlus),
            "plus-rr" => Ok(FilterVariant::SimplePlusRR),
            "sum" => Ok(FilterVariant::SumPlusMinus),
            "augmented" => Ok(FilterVariant::AugmentedPair),
            other => Err(Error::InvalidParameter(format!("unknown filter variant '{other}'"))),
        }
    }
}

/// Trial bases `U` (m x l) and `W` (n x l).
#[derive(Clone, Debug)]
pub struct SubspacePair<T: Real> {
    pub u: DenseMatrix<T>,
    pub w: DenseMatrix<T>,
    /// True once `U^*U = I` and `(BW)^*(BW) = I` have been enforced.
    pub orthonormalized: bool,
}

impl<T: Real> SubspacePair<T> {
    pub fn raw(u: DenseMatrix<T>, w: DenseMatrix<T>) -> Result<Self> {
        if u.cols() != w.cols() {
            return Err(Error::DimensionMismatch(format!("U has {} columns, W has {}", u.cols(), w.cols())));
        }
        Ok(SubspacePair { u, w, orthonormalized: false })
    }

    /// Splits a stacked `(m+n) x c` block after row `m`.
    pub fn from_stacked(z: &DenseMatrix<T>, m: usize) -> Self {
        SubspacePair { u: z.row_block(0, m), w: z.row_block(m, z.rows()), orthonormalized: false }
    }

    pub fn cols(&self) -> usize {
        self.u.cols()
    }

    pub fn stacked(&self) -> DenseMatrix<T> {
        DenseMatrix::vstack(&self.u, &self.w)
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        SubspacePair { u: self.u.select_columns(idx), w: self.w.select_columns(idx), orthonormalized: self.orthonormalized }
    }

    pub fn is_real(&self) -> bool {
        self.u.is_real() && self.w.is_real()
    }
}

/// Nodes actually solved for, and whether the conjugate-pair doubling rule
/// applies.
fn active_nodes<T: Real>(
    pencil: &SparsePencil<T>,
    contour: &EllipseContour<T>,
    z_real: bool,
    allow_reduction: bool,
) -> (Vec<QuadratureNode<T>>, bool) {
    if allow_reduction && z_real && pencil.is_real() {
        if let Ok(upper) = contour.conjugate_reduction() {
            return (upper, true);
        }
    }
    (contour.nodes.clone(), false)
}

/// `sum_j w_j (xi_j B_check - A_check)^{-1} R` for a right-hand side that has
/// already been multiplied by `B_check` (or not, for the trace estimator's
/// Hermitian form). Per-node solves run in parallel.
pub fn resolvent_sum<T: Real>(
    pencil: &SparsePencil<T>,
    contour: &EllipseContour<T>,
    cache: &FactorizationCache<T>,
    rhs: &DenseMatrix<T>,
    allow_reduction: bool,
) -> Result<DenseMatrix<T>> {
    if rhs.rows() != pencil.dim() {
        return Err(Error::DimensionMismatch(format!("block has {} rows, pencil dimension is {}", rhs.rows(), pencil.dim())));
    }
    if rhs.cols() == 0 {
        return Ok(rhs.clone());
    }
    let (nodes, doubled) = active_nodes(pencil, contour, rhs.is_real(), allow_reduction);
    let shifts: Vec<Complex<T>> = nodes.iter().map(|nd| nd.xi).collect();
    let facs = cache.prepare(pencil, &shifts)?;
    let terms: Vec<DenseMatrix<T>> = nodes
        .par_iter()
        .zip(facs.par_iter())
        .map(|(nd, f)| Ok(f.solve_block(rhs)?.scale(nd.omega)))
        .collect::<Result<_>>()?;
    let mut sum = DenseMatrix::zeros(rhs.rows(), rhs.cols());
    for t in &terms {
        sum.add_assign_scaled(t, Complex::new(T::one(), T::zero()));
    }
    if doubled {
        let two = T::one() + T::one();
        sum = sum.map(|z| Complex::new(two * z.re, T::zero()));
    }
    Ok(sum)
}

/// `P~ z = sum_j w_j (xi_j B_check - A_check)^{-1} B_check z`.
pub fn apply_filter<T: Real>(
    pencil: &SparsePencil<T>,
    contour: &EllipseContour<T>,
    cache: &FactorizationCache<T>,
    z: &DenseMatrix<T>,
) -> Result<DenseMatrix<T>> {
    let bz = pencil.apply_b_check(z)?;
    resolvent_sum(pencil, contour, cache, &bz, true)
}

/// Applies `variant` to the stacked pair. The Rayleigh-Ritz step of
/// `SimplePlusRR` belongs to the driver; here it is plain `P+`.
pub fn apply_variant<T: Real>(
    pencil: &SparsePencil<T>,
    contour: &EllipseContour<T>,
    cache: &FactorizationCache<T>,
    pair: &SubspacePair<T>,
    variant: FilterVariant,
    first_iteration: bool,
) -> Result<DenseMatrix<T>> {
    let m = pencil.m();
    let z = pair.stacked();
    match variant {
        FilterVariant::SimplePlus | FilterVariant::SimplePlusRR => apply_filter(pencil, contour, cache, &z),
        FilterVariant::SumPlusMinus => {
            let c = z.cols();
            let dz = z.flip_rows_from(m);
            let out = apply_filter(pencil, contour, cache, &DenseMatrix::hstack(&[&z, &dz]))?;
            let plus = out.col_block(0, c);
            let minus = out.col_block(c, 2 * c).flip_rows_from(m);
            Ok(plus.add(&minus))
        }
        FilterVariant::AugmentedPair if first_iteration => {
            let z2 = DenseMatrix::hstack(&[&z, &z.flip_rows_from(m)]);
            apply_filter(pencil, contour, cache, &z2)
        }
        FilterVariant::AugmentedPair => apply_filter(pencil, contour, cache, &z),
    }
}

/// Dense filter matrix `sum_j w_j (xi_j B_check - A_check)^{-1} B_check`,
/// for oracles on small pencils.
pub fn dense_filter_matrix<T: Real>(pencil: &SparsePencil<T>, contour: &EllipseContour<T>) -> Result<DenseMatrix<T>> {
    let (jw, bc) = pencil.dense_pencil();
    let n = jw.rows();
    let mut acc = DenseMatrix::zeros(n, n);
    for nd in &contour.nodes {
        let shifted = bc.scale(nd.xi).sub(&jw);
        let x = crate::dense::lu_solve(&shifted, &bc).map_err(|_| Error::SingularShift {
            xi: num_complex::Complex64::new(nd.xi.re.to_f64_lossy(), nd.xi.im.to_f64_lossy()),
        })?;
        acc.add_assign_scaled(&x, nd.omega);
    }
    Ok(acc)
}

