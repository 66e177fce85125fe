use feast_gsvd::contour::EllipseContour;
use feast_gsvd::dense::{qr_orthonormalize, DenseMatrix};
use feast_gsvd::filter::{apply_filter, apply_variant, dense_filter_matrix, resolvent_sum, FilterVariant, SubspacePair};
use feast_gsvd::random::{gaussian_matrix, random_orthonormal, seeded_rng};
use feast_gsvd::solver::FactorizationCache;
use feast_gsvd::sparse::{random_sparse, SparseMatrix, SparsePencil};
use num_complex::Complex64;
use proptest::prelude::*;

fn diag_pencil() -> SparsePencil<f64> {
    SparsePencil::svd(SparseMatrix::from_dense(&DenseMatrix::diag_real(&[1.0, 2.0, 3.0]))).unwrap()
}

/// `[e_i; s e_i] / sqrt(2)` in the 6-dimensional pencil of `diag(1, 2, 3)`.
fn pair_vector(i: usize, s: f64) -> DenseMatrix<f64> {
    let mut z = DenseMatrix::zeros(6, 1);
    z[(i, 0)] = Complex64::new(0.5f64.sqrt(), 0.0);
    z[(3 + i, 0)] = Complex64::new(s * 0.5f64.sqrt(), 0.0);
    z
}

fn random_gsvd_pencil(m: usize, n: usize, seed: u64) -> SparsePencil<f64> {
    let mut rng = seeded_rng(seed);
    let a = random_sparse::<f64>(m, n, 3 * m, &mut rng);
    let b = random_sparse::<f64>(n + 1, n, 2 * n, &mut rng).to_dense().add(&DenseMatrix::identity(n + 1).col_block(0, n));
    SparsePencil::gsvd(a, SparseMatrix::from_dense(&b)).unwrap()
}

#[test]
fn inside_eigenvector_is_kept() {
    // A circle so that the filter is close to one inside the interval.
    let contour = EllipseContour::build(1.5, 2.5, 1.0, 12).unwrap();
    let pencil = diag_pencil();
    let cache = FactorizationCache::new();
    let z = pair_vector(1, 1.0);
    let out = apply_filter(&pencil, &contour, &cache, &z).unwrap();
    let h = contour.filter_real(2.0);
    assert!(h >= 0.99);
    assert!(out.sub(&z.scale_real(h)).max_abs() < 1e-12);
}

#[test]
fn outside_and_negative_eigenvectors_are_damped() {
    let contour = EllipseContour::build(1.5, 2.5, 1.0, 12).unwrap();
    let pencil = diag_pencil();
    let cache = FactorizationCache::new();
    for z in [pair_vector(2, 1.0), pair_vector(1, -1.0)] {
        let out = apply_filter(&pencil, &contour, &cache, &z).unwrap();
        assert!(out.frobenius_norm() <= 0.05 * z.frobenius_norm());
    }
}

#[test]
fn augmented_first_iteration_doubles_columns() {
    let pencil = diag_pencil();
    let contour = EllipseContour::build(1.5, 2.5, 5.0, 12).unwrap();
    let cache = FactorizationCache::new();
    let mut rng = seeded_rng(1);
    let pair = SubspacePair::raw(random_orthonormal(3, 3, &mut rng), random_orthonormal(3, 3, &mut rng)).unwrap();
    let first = apply_variant(&pencil, &contour, &cache, &pair, FilterVariant::AugmentedPair, true).unwrap();
    assert_eq!(first.cols(), 6);
    let later = apply_variant(&pencil, &contour, &cache, &pair, FilterVariant::AugmentedPair, false).unwrap();
    assert_eq!(later.cols(), 3);
}

#[test]
fn sum_of_projectors_on_a_positive_pair() {
    let pencil = diag_pencil();
    let contour = EllipseContour::build(1.5, 2.5, 5.0, 12).unwrap();
    let cache = FactorizationCache::new();
    let z = pair_vector(1, 1.0);
    let pair = SubspacePair::from_stacked(&z, 3);
    let out = apply_variant(&pencil, &contour, &cache, &pair, FilterVariant::SumPlusMinus, false).unwrap();
    let p = dense_filter_matrix(&pencil, &contour).unwrap();
    let expect = p.matmul(&z).add(&p.matmul(&z.flip_rows_from(3)).flip_rows_from(3));
    assert!(out.sub(&expect).max_abs() < 1e-12);
    let h = contour.filter_real(2.0) + contour.filter_real(-2.0);
    assert!(out.sub(&z.scale_real(h)).max_abs() < 1e-12);
}

#[test]
fn zero_block_maps_to_zero() {
    let pencil = random_gsvd_pencil(8, 5, 2);
    let contour = EllipseContour::build(0.3, 1.2, 5.0, 8).unwrap();
    let cache = FactorizationCache::new();
    let pair = SubspacePair::raw(DenseMatrix::zeros(8, 2), DenseMatrix::zeros(5, 2)).unwrap();
    for v in FilterVariant::ALL {
        let out = apply_variant(&pencil, &contour, &cache, &pair, v, true).unwrap();
        assert_eq!(out.max_abs(), 0.0, "{}", v.name());
    }
}

#[test]
fn conjugate_reduction_matches_full_sum() {
    let pencil = diag_pencil();
    let contour = EllipseContour::build(1.5, 2.5, 5.0, 12).unwrap();
    let cache = FactorizationCache::new();
    let rhs: DenseMatrix<f64> = gaussian_matrix(6, 3, &mut seeded_rng(3));
    let reduced = resolvent_sum(&pencil, &contour, &cache, &rhs, true).unwrap();
    let full = resolvent_sum(&pencil, &contour, &cache, &rhs, false).unwrap();
    assert!(reduced.sub(&full).max_abs() <= 1e-14);
}

#[test]
fn approximate_projector_on_separated_spectrum() {
    // Singular values well inside (0.9, 1.1)-centred circle or far outside it.
    let a = SparseMatrix::from_dense(&DenseMatrix::diag_real(&[1.0, 1.02, 0.98, 3.0, 0.2]));
    let pencil = SparsePencil::svd(a).unwrap();
    let contour = EllipseContour::build(0.9, 1.1, 1.0, 12).unwrap();
    let p = dense_filter_matrix(&pencil, &contour).unwrap();
    assert!(p.matmul(&p).sub(&p).two_norm() <= 0.05);
}

#[test]
fn variant_names_parse_back() {
    for v in FilterVariant::ALL {
        assert_eq!(v.name().parse::<FilterVariant>().unwrap(), v);
    }
    assert!("both".parse::<FilterVariant>().is_err());
    assert_eq!(FilterVariant::default(), FilterVariant::AugmentedPair);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn matches_dense_filter_matrix(seed in 0u64..10_000, m in 4usize..20, n in 2usize..12) {
        let pencil = random_gsvd_pencil(m, n, seed);
        let contour = EllipseContour::build(0.2, 1.5, 5.0, 12).unwrap();
        let cache = FactorizationCache::new();
        let z: DenseMatrix<f64> = gaussian_matrix(m + n, 3, &mut seeded_rng(seed ^ 1));
        let out = apply_filter(&pencil, &contour, &cache, &z).unwrap();
        let expect = dense_filter_matrix(&pencil, &contour).unwrap().matmul(&z);
        prop_assert!(out.sub(&expect).frobenius_norm() <= 1e-10 * expect.frobenius_norm().max(1e-300));
    }

    #[test]
    fn sum_variant_commutes_with_sign_flip(seed in 0u64..10_000) {
        let pencil = random_gsvd_pencil(9, 6, seed);
        let contour = EllipseContour::build(0.3, 1.0, 5.0, 12).unwrap();
        let cache = FactorizationCache::new();
        let z: DenseMatrix<f64> = gaussian_matrix(15, 2, &mut seeded_rng(seed ^ 2));
        let a = apply_variant(&pencil, &contour, &cache, &SubspacePair::from_stacked(&z, 9), FilterVariant::SumPlusMinus, false).unwrap();
        let dz = z.flip_rows_from(9);
        let b = apply_variant(&pencil, &contour, &cache, &SubspacePair::from_stacked(&dz, 9), FilterVariant::SumPlusMinus, false).unwrap();
        prop_assert!(b.sub(&a.flip_rows_from(9)).max_abs() <= 1e-12 * a.max_abs().max(1.0));
    }

    #[test]
    fn augmented_span_contains_simple_span(seed in 0u64..10_000) {
        let pencil = random_gsvd_pencil(10, 7, seed);
        let contour = EllipseContour::build(0.3, 1.0, 5.0, 12).unwrap();
        let cache = FactorizationCache::new();
        let z: DenseMatrix<f64> = gaussian_matrix(17, 3, &mut seeded_rng(seed ^ 3));
        let pair = SubspacePair::from_stacked(&z, 10);
        let aug = apply_variant(&pencil, &contour, &cache, &pair, FilterVariant::AugmentedPair, true).unwrap();
        let simple = apply_variant(&pencil, &contour, &cache, &pair, FilterVariant::SimplePlus, true).unwrap();
        // Component of the simple block outside span(aug), relative to its size.
        let (q, _) = qr_orthonormalize(&aug, 1e-14).unwrap();
        let outside = simple.sub(&q.matmul(&q.adjoint_matmul(&simple)));
        prop_assert!(outside.two_norm() <= 1e-10 * simple.two_norm());
    }
}
