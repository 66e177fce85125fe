//! Partial SVD and GSVD of large sparse matrices by contour-filtered
//! subspace iteration on the Jordan-Wielandt pencil
//! `([0 A; A^* 0], diag(I, B^*B))`.
//!
//! Singular values in an interval `(alpha, beta)` are eigenvalues of the
//! pencil; a rational filter built from a quadrature rule on an ellipse
//! around the interval amplifies them, and a structured Rayleigh-Ritz step
//! extracts `(sigma, u, w)` triplets from the filtered pair of blocks.
//!
//! ```
//! use feast_gsvd::{feast_svd, SolverOptions, SparseMatrix};
//!
//! let a = SparseMatrix::<f64>::from_dense(&feast_gsvd::Matrix::diag_real(&[1.0, 2.0, 3.0]));
//! let out = feast_svd(a, &SolverOptions::new(1.5, 2.5)).unwrap();
//! assert!((out.solution.sigma[0] - 2.0).abs() < 1e-12);
//! ```
//!
//! Everything numeric is generic over `f32`/`f64` through [`scalar::Real`];
//! the aliases below fix the scalar to `f64`.

pub mod contour;
pub mod dense;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod filter;
pub mod oracle;
pub mod random;
pub mod scalar;
pub mod solver;
pub mod sparse;
pub mod trace;

pub use contour::EllipseContour;
pub use dense::DenseMatrix;
pub use driver::{
    feast_gsvd, feast_svd, recover_full_gsvd, ConvergenceReport, GsvdSolution, SolveOutput, SolverOptions,
    StoppingReason, SubspaceSize, Tolerance,
};
pub use error::{Error, Result};
pub use filter::{FilterVariant, SubspacePair};
pub use sparse::{Mode, SparseMatrix, SparsePencil};

/// Dense complex matrix over `f64`.
pub type Matrix = DenseMatrix<f64>;
/// Sparse CSC matrix over `f64`.
pub type Sparse = SparseMatrix<f64>;
pub type Pencil = SparsePencil<f64>;
pub type Pair = SubspacePair<f64>;
pub type Contour = EllipseContour<f64>;
pub type Options = SolverOptions<f64>;
pub type Solution = GsvdSolution<f64>;
