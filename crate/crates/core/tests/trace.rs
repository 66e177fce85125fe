use feast_gsvd::contour::EllipseContour;
use feast_gsvd::dense::{dot, DenseMatrix};
use feast_gsvd::filter::resolvent_sum;
use feast_gsvd::oracle::{filter_trace, make_synthetic_gsvd};
use feast_gsvd::random::{gaussian_matrix, seeded_rng};
use feast_gsvd::solver::FactorizationCache;
use feast_gsvd::sparse::{random_sparse, SparseMatrix, SparsePencil};
use feast_gsvd::trace::{auto_subspace_size, estimate_count, estimate_count_gsvd, estimate_count_svd, naive_gsvd_samples, TraceOptions};
use num_complex::Complex64;

fn diag_pencil(values: &[f64]) -> SparsePencil<f64> {
    SparsePencil::svd(SparseMatrix::from_dense(&DenseMatrix::diag_real(values))).unwrap()
}

fn opts(seed: u64) -> TraceOptions {
    TraceOptions { samples: 30, seed, conjugate_reduction: true }
}

#[test]
fn diagonal_single_value() {
    let pencil = diag_pencil(&[1.0, 2.0, 3.0]);
    let contour = EllipseContour::build(1.5, 2.5, 5.0, 12).unwrap();
    let est = estimate_count_svd(&pencil, &contour, opts(0), &FactorizationCache::new()).unwrap();
    assert!((0.8..=1.2).contains(&est.k_hat), "k_hat {}", est.k_hat);
    assert_eq!(est.samples, 30);
    let mean = est.values.iter().sum::<f64>() / 30.0;
    assert!((mean - est.k_hat).abs() < 1e-14);
}

#[test]
fn empty_contour_gives_near_zero() {
    let pencil = diag_pencil(&[1.0, 2.0, 3.0]);
    let contour = EllipseContour::build(10.0, 12.0, 5.0, 12).unwrap();
    let est = estimate_count_svd(&pencil, &contour, opts(1), &FactorizationCache::new()).unwrap();
    assert!(est.k_hat.abs() <= 0.2, "k_hat {}", est.k_hat);
}

#[test]
fn single_probe_on_eigenvector() {
    // y = c [u; w] with y^* y = m + n gives y^* P y = (m + n) h(sigma).
    let pencil = diag_pencil(&[1.0, 2.0, 3.0]);
    let contour = EllipseContour::build(1.5, 2.5, 5.0, 12).unwrap();
    let mut y = DenseMatrix::zeros(6, 1);
    let c = (6.0f64 / 2.0).sqrt();
    y[(1, 0)] = Complex64::new(c, 0.0);
    y[(4, 0)] = Complex64::new(c, 0.0);
    let py = resolvent_sum(&pencil, &contour, &FactorizationCache::new(), &y, true).unwrap();
    let v = dot(y.col(0), py.col(0));
    assert!((v.re - 6.0 * contour.filter_real(2.0)).abs() < 1e-12);
}

#[test]
fn gsvd_with_identity_matches_svd() {
    let a = random_sparse::<f64>(12, 8, 40, &mut seeded_rng(3));
    let svd = SparsePencil::svd(a.clone()).unwrap();
    let gsvd = SparsePencil::gsvd(a, SparseMatrix::from_dense(&DenseMatrix::identity(8))).unwrap();
    // With B = I the probes have length m + p = m + n, so the same seed draws the same probes.
    let contour = EllipseContour::build(0.5, 1.5, 5.0, 12).unwrap();
    let s = estimate_count_svd(&svd, &contour, opts(4), &FactorizationCache::new()).unwrap();
    let g = estimate_count_gsvd(&gsvd, &contour, opts(4), &FactorizationCache::new()).unwrap();
    for (x, y) in s.values.iter().zip(&g.values) {
        assert!((x - y).abs() < 1e-12, "{x} vs {y}");
    }
}

#[test]
fn constructed_pencil_two_inside() {
    let syn = make_synthetic_gsvd(10, 8, 6, &[0.1, 0.4, 1.0, 1.6, 5.0, 9.0], 4.0, 7).unwrap();
    let pencil = syn.pencil().unwrap();
    let contour = EllipseContour::build(0.8, 2.0, 5.0, 12).unwrap();
    let est = estimate_count(&pencil, &contour, opts(2), &FactorizationCache::new()).unwrap();
    assert!((1.5..=2.5).contains(&est.k_hat), "k_hat {}", est.k_hat);
}

#[test]
fn mean_over_seeds_tracks_filter_trace() {
    let a = random_sparse::<f64>(30, 20, 120, &mut seeded_rng(11));
    let pencil = SparsePencil::svd(a).unwrap();
    let contour = EllipseContour::build(0.6, 1.8, 5.0, 12).unwrap();
    let exact = filter_trace(&pencil, &contour).unwrap();
    let cache = FactorizationCache::new();
    let mean = (0..50).map(|s| estimate_count(&pencil, &contour, opts(100 + s), &cache).unwrap().k_hat).sum::<f64>() / 50.0;
    assert!((mean - exact).abs() <= 0.05 * exact, "mean {mean}, trace {exact}");
}

#[test]
fn hermitian_form_is_real_for_complex_data() {
    let mut rng = seeded_rng(13);
    let cplx = |g: DenseMatrix<f64>, h: DenseMatrix<f64>| DenseMatrix::from_fn(g.rows(), g.cols(), |i, j| Complex64::new(g[(i, j)].re, h[(i, j)].re));
    let a = cplx(gaussian_matrix(14, 8, &mut rng), gaussian_matrix(14, 8, &mut rng));
    let b = cplx(gaussian_matrix(10, 8, &mut rng), gaussian_matrix(10, 8, &mut rng));
    let pencil = SparsePencil::gsvd(SparseMatrix::from_dense(&a), SparseMatrix::from_dense(&b)).unwrap();
    let contour = EllipseContour::build(0.3, 1.5, 5.0, 12).unwrap();
    let o = TraceOptions { samples: 30, seed: 5, conjugate_reduction: false };
    let cache = FactorizationCache::new();
    let herm = estimate_count_gsvd(&pencil, &contour, o, &cache).unwrap();
    let naive = naive_gsvd_samples(&pencil, &contour, o, &cache).unwrap();
    assert!(herm.max_relative_imag() <= 1e-8, "{}", herm.max_relative_imag());
    // The plain form has no Hermitian structure and shows imaginary parts.
    assert!(naive.max_relative_imag() > 1e-6, "{}", naive.max_relative_imag());
}

#[test]
fn subspace_size_rule() {
    assert_eq!(auto_subspace_size(8.42), 18);
    assert_eq!(auto_subspace_size(0.0), 5);
    assert_eq!(auto_subspace_size(16.47), 30);
}
