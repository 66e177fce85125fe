use feast_gsvd::dense::DenseMatrix;
use feast_gsvd::diagnostics::{
    hermitian_with_spectrum, lemma0_check, perturbation_check, random_psd, rate_check, tan_angle, thm1_block_check,
};
use feast_gsvd::error::Error;
use feast_gsvd::random::{gaussian_matrix, seeded_rng};
use proptest::prelude::*;
use rand::Rng;

/// Distinct moduli in decreasing order with a clear drop after position `l`.
fn split_spectrum(n: usize, l: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut mods: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    mods.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for v in mods.iter_mut().take(l) {
        *v += 1.0;
    }
    mods.into_iter().map(|v| if rng.random_bool(0.5) { v } else { -v }).collect()
}

#[test]
fn lemma_examples() {
    let r = lemma0_check(&DenseMatrix::<f64>::zeros(3, 3)).unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    assert!(r.holds);
    let r = lemma0_check(&DenseMatrix::<f64>::identity(4)).unwrap();
    assert!((r.lhs - (1.0 - 0.5f64.sqrt())).abs() < 1e-14 && (r.rhs - 0.5).abs() < 1e-15 && r.holds);
    let not_psd = DenseMatrix::diag_real(&[1.0, -0.5]);
    assert!(matches!(lemma0_check(&not_psd), Err(Error::NotPsd(_))));
}

#[test]
fn lemma_random() {
    for seed in 0..500 {
        let n = 1 + (seed % 12) as usize;
        let scale = [1e-3, 0.1, 1.0, 10.0, 1e3][(seed % 5) as usize];
        let m = random_psd::<f64>(n, 1 + (seed as usize % n), scale, seed);
        let r = lemma0_check(&m).unwrap();
        assert!(r.holds, "seed {seed}: {} > {}", r.lhs, r.rhs);
    }
}

#[test]
fn block_check_exact_subspace() {
    let a = DenseMatrix::diag_real(&[5.0, -4.0, 3.0, 1.0, 0.5]);
    let mut x = DenseMatrix::zeros(5, 3);
    for i in 0..3 {
        x[(i, i)] = num_complex::Complex64::new(1.0, 0.0);
    }
    let r = thm1_block_check(&a, &x, 2).unwrap();
    assert_eq!((r.eta_tilde, r.eta_hat), (0.0, 0.0));
    for v in [r.e11, r.e12, r.e21, r.e22, r.f1, r.f2] {
        assert!(v <= 1e-15);
    }
    assert!(r.all_hold());
}

#[test]
fn block_check_hand_computed_etas() {
    let a = DenseMatrix::diag_real(&[4.0, 3.0, 2.0, 1.0]);
    let x = DenseMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[0.1, 0.2], &[0.3, 0.4]]);
    let r = thm1_block_check(&a, &x, 1).unwrap();
    // eta~ = ||diag(2,1) [0.1; 0.3] / 4||, eta^ = ||diag(2,1) [0.2; 0.4] / 3||.
    assert!((r.eta_tilde - 0.008125f64.sqrt()).abs() < 1e-13, "{}", r.eta_tilde);
    assert!((r.eta_hat - 0.4 * 2f64.sqrt() / 3.0).abs() < 1e-13, "{}", r.eta_hat);
    assert!(r.all_hold());
}

#[test]
fn block_check_needs_a_gap() {
    let a = DenseMatrix::diag_real(&[3.0, 2.0, -2.0, 1.0]);
    let x: DenseMatrix<f64> = gaussian_matrix(4, 2, &mut seeded_rng(0));
    assert!(matches!(thm1_block_check(&a, &x, 1), Err(Error::DegenerateSplit(_))));
}

#[test]
fn block_check_random() {
    for seed in 0..500u64 {
        let mut rng = seeded_rng(seed);
        let n = rng.random_range(4..=30);
        let l = rng.random_range(1..n);
        let k = rng.random_range(1..=l);
        let lam = split_spectrum(n, l, &mut rng);
        let a = hermitian_with_spectrum(&lam, &mut rng);
        let x: DenseMatrix<f64> = gaussian_matrix(n, l, &mut rng);
        let r = thm1_block_check(&a, &x, k).unwrap();
        assert!(r.all_hold(), "seed {seed}: {r:?}");
        assert!(r.orthonormality < 1e-10 && r.span_defect < 1e-8, "seed {seed}: {r:?}");
    }
}

#[test]
fn perturbation_examples() {
    let lambda = [0.2, 0.5, 3.0, -2.5];
    let r = perturbation_check(&lambda, &DenseMatrix::zeros(4, 4), 2, 1.0).unwrap();
    assert!(r.d11 <= 1e-15 && r.d12 <= 1e-15 && r.d21 <= 1e-15 && r.d22 <= 1e-15);
    let v = DenseMatrix::from_real_rows(&[&[1.0], &[1.0], &[1.0], &[1.0]]).scale_real(0.5);
    let dh = v.matmul(&v.adjoint()).scale_real(1e-3);
    let r = perturbation_check(&lambda, &dh, 2, 1.0).unwrap();
    assert!(r.d12 <= 1e-3 && r.d21 <= 1e-3, "{r:?}");
    assert!(r.d11 <= 1e-6 && r.d22 <= 1e-6, "{r:?}");
    assert!(r.all_hold());
}

#[test]
fn perturbation_split_violation() {
    let lambda = [0.2, 0.5, 0.6];
    assert!(matches!(perturbation_check(&lambda, &DenseMatrix::zeros(3, 3), 2, 1.0), Err(Error::SplitViolated(_))));
}

#[test]
fn perturbation_random() {
    for seed in 0..500u64 {
        let mut rng = seeded_rng(seed);
        let l = rng.random_range(2..=16);
        let k = rng.random_range(1..l);
        let delta = 1.0;
        let mut lambda: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        lambda.extend((k..l).map(|_| {
            let v = rng.random_range(2.5..5.0);
            if rng.random_bool(0.5) { v } else { -v }
        }));
        let g: DenseMatrix<f64> = gaussian_matrix(l, l, &mut rng);
        let sym = g.add(&g.adjoint());
        let size = rng.random_range(1e-4..0.1);
        let dh = sym.scale_real(size / sym.two_norm());
        let r = perturbation_check(&lambda, &dh, k, delta).unwrap();
        assert!(r.all_hold(), "seed {seed}: {r:?}");
    }
}

#[test]
fn rate_exact_subspace() {
    let a = DenseMatrix::diag_real(&[4.0, 3.0, 2.0, 1.0, 0.1]);
    let mut x = DenseMatrix::zeros(5, 2);
    x[(0, 0)] = num_complex::Complex64::new(1.0, 0.0);
    x[(1, 1)] = num_complex::Complex64::new(1.0, 0.0);
    let r = rate_check(&a, &x, 2, 3).unwrap();
    assert!(r.lhs <= 1e-15 && r.holds);
}

#[test]
fn rate_dominant_factor() {
    let a = DenseMatrix::diag_real(&[4.0, 3.0, 2.0, 1.0, 0.1]);
    for seed in 0..20 {
        let x: DenseMatrix<f64> = gaussian_matrix(5, 2, &mut seeded_rng(seed));
        let r = rate_check(&a, &x, 2, 2).unwrap();
        assert!((r.dominant_rate - 2.0 / 3.0).abs() < 1e-15);
        assert!(r.ratio <= r.dominant_rate * (1.0 + 1e-10), "seed {seed}: {r:?}");
        assert!(r.holds && r.ratio_holds);
    }
}

#[test]
fn rate_random() {
    for seed in 0..500u64 {
        let mut rng = seeded_rng(seed);
        let n = rng.random_range(4..=30);
        let l = rng.random_range(1..n);
        let k = rng.random_range(1..=l);
        let lam = split_spectrum(n, l, &mut rng);
        let a = hermitian_with_spectrum(&lam, &mut rng);
        let x: DenseMatrix<f64> = gaussian_matrix(n, k, &mut rng);
        let r = rate_check(&a, &x, k, l).unwrap();
        assert!(r.holds && r.ratio_holds, "seed {seed}: {r:?}");
    }
}

#[test]
fn rate_singular_leading_block() {
    let a = DenseMatrix::diag_real(&[4.0, 3.0, 2.0, 1.0]);
    let x = DenseMatrix::from_real_rows(&[&[0.0], &[0.0], &[1.0], &[1.0]]);
    assert!(rate_check(&a, &x, 1, 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tangent_vanishes_exactly_on_contained_spans(seed in 0u64..1_000_000, n in 4usize..20, extra in 1usize..3) {
        let mut rng = seeded_rng(seed);
        let u: DenseMatrix<f64> = gaussian_matrix(n, n / 2, &mut rng);
        let c: DenseMatrix<f64> = gaussian_matrix(n / 2, extra.min(n / 2), &mut rng);
        let inside = u.matmul(&c);
        prop_assert!(tan_angle(&u, &inside).unwrap() <= 1e-12);
        let outside = inside.add(&gaussian_matrix::<f64>(n, inside.cols(), &mut rng).scale_real(1e-3));
        prop_assert!(tan_angle(&u, &outside).unwrap() > 1e-12);
    }
}
