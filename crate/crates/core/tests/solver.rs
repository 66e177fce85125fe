use feast_gsvd::contour::EllipseContour;
use feast_gsvd::dense::{DenseMatrix, LinearOperator};
use feast_gsvd::error::Error;
use feast_gsvd::random::{gaussian_matrix, seeded_rng};
use feast_gsvd::solver::{factorize, solve_block, FactorizationCache};
use feast_gsvd::sparse::{random_sparse, SparseMatrix, SparsePencil};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_pencil(m: usize, n: usize, seed: u64) -> SparsePencil<f64> {
    let mut rng = seeded_rng(seed);
    let a = random_sparse::<f64>(m, n, 3 * m, &mut rng);
    let b = random_sparse::<f64>(n + 2, n, 2 * n, &mut rng).to_dense().add(&DenseMatrix::identity(n + 2).col_block(0, n));
    SparsePencil::gsvd(a, SparseMatrix::from_dense(&b)).unwrap()
}

#[test]
fn two_by_two_by_hand() {
    let a = SparseMatrix::from_triplets(1, 1, &[(0, 0, c(2.0, 0.0))]).unwrap();
    let pencil = SparsePencil::svd(a).unwrap();
    let f = factorize(&pencil, c(0.0, 1.0)).unwrap();
    let x = f.solve_vec(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!((x[0] - c(0.0, -0.2)).norm() < 1e-15);
    assert!((x[1] - c(-0.4, 0.0)).norm() < 1e-15);
}

#[test]
fn shift_on_the_spectrum_is_singular() {
    let a = SparseMatrix::from_dense(&DenseMatrix::diag_real(&[1.0, 2.0, 3.0]));
    let pencil = SparsePencil::svd(a).unwrap();
    match factorize(&pencil, c(2.0, 0.0)) {
        Err(Error::SingularShift { xi }) => assert_eq!(xi, c(2.0, 0.0)),
        other => panic!("expected SingularShift, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn residuals_at_every_node() {
    let pencil = random_pencil(30, 20, 1);
    let contour = EllipseContour::build(0.5, 1.5, 5.0, 12).unwrap();
    let rhs: DenseMatrix<f64> = gaussian_matrix(pencil.dim(), 4, &mut seeded_rng(2));
    for nd in &contour.nodes {
        let f = factorize(&pencil, nd.xi).unwrap();
        let x = solve_block(&f, &rhs).unwrap();
        let m = pencil.assemble_shifted(nd.xi);
        let r = m.mul_dense(&x).sub(&rhs);
        assert!(r.two_norm() <= 1e-10 * rhs.two_norm(), "node {:?}", nd.xi);
    }
}

#[test]
fn constructed_solution_is_recovered() {
    let pencil = random_pencil(25, 15, 3);
    let xi = c(0.7, 0.3);
    let y: DenseMatrix<f64> = gaussian_matrix(pencil.dim(), 3, &mut seeded_rng(4));
    let rhs = pencil.assemble_shifted(xi).mul_dense(&y);
    let f = factorize(&pencil, xi).unwrap();
    let x = f.solve_block(&rhs).unwrap();
    assert!(x.sub(&y).frobenius_norm() <= 1e-10 * y.frobenius_norm());
}

#[test]
fn zero_rhs_and_column_independence() {
    let pencil = random_pencil(12, 8, 5);
    let f = factorize(&pencil, c(1.0, 0.25)).unwrap();
    let z = DenseMatrix::zeros(pencil.dim(), 2);
    assert_eq!(f.solve_block(&z).unwrap(), z);
    let rhs: DenseMatrix<f64> = gaussian_matrix(pencil.dim(), 3, &mut seeded_rng(6));
    let block = f.solve_block(&rhs).unwrap();
    for j in 0..3 {
        assert_eq!(block.col(j), f.solve_vec(rhs.col(j)).unwrap().as_slice());
    }
    assert!(matches!(f.solve_block(&DenseMatrix::zeros(3, 1)), Err(Error::DimensionMismatch(_))));
}

#[test]
fn cache_reuses_factorizations() {
    let pencil = random_pencil(20, 10, 7);
    let contour = EllipseContour::build(0.2, 1.0, 5.0, 12).unwrap();
    let shifts: Vec<Complex64> = contour.nodes.iter().map(|n| n.xi).collect();
    let cache = FactorizationCache::new();
    cache.prepare(&pencil, &shifts).unwrap();
    assert_eq!(cache.factorization_count(), 12);
    assert_eq!(cache.len(), 12);
    assert!(cache.memory_nnz() > 0);
    cache.prepare(&pencil, &shifts).unwrap();
    cache.get_or_factorize(&pencil, shifts[3]).unwrap();
    assert_eq!(cache.factorization_count(), 12);
    cache.clear();
    assert!(cache.is_empty());
}

#[test]
fn fill_statistics_are_reported() {
    let pencil = random_pencil(40, 30, 8);
    let f = factorize(&pencil, c(1.0, 1.0)).unwrap();
    let s = f.stats();
    assert_eq!(s.dim, 70);
    assert!(s.nnz_l >= s.dim && s.nnz_u >= s.dim);
    assert_eq!(f.dim(), pencil.dim());
    assert_eq!(pencil.assemble_shifted(c(1.0, 1.0)).nrows(), 70);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// For a real pencil and real right-hand side the solve at the
    /// conjugate shift is the conjugate solve.
    #[test]
    fn conjugate_shift_gives_conjugate_solution(seed in 0u64..5000, re in 0.1f64..2.0, im in 0.05f64..1.0) {
        let pencil = random_pencil(10, 6, seed);
        let rhs: DenseMatrix<f64> = gaussian_matrix(pencil.dim(), 2, &mut seeded_rng(seed + 1));
        let x = factorize(&pencil, c(re, im)).unwrap().solve_block(&rhs).unwrap();
        let y = factorize(&pencil, c(re, -im)).unwrap().solve_block(&rhs).unwrap();
        prop_assert!(x.conj().sub(&y).max_abs() <= 1e-12 * x.max_abs().max(1.0));
    }
}
