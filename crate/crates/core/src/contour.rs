//! Elliptic contours around a real interval and their trapezoidal
//! quadrature rules.
//!
//! Weights absorb both the `1/(2 pi i)` prefactor and the `d theta` measure, so
//! the rational filter is literally `h(z) = sum_j w_j / (xi_j - z)` and the
//! discretized projector is `sum_j w_j (xi_j B - A)^{-1} B`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureNode<T: Real> {
    pub xi: Complex<T>,
    pub omega: Complex<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipseContour<T: Real> {
    pub center: T,
    pub semi_major: T,
    pub semi_minor: T,
    pub nodes: Vec<QuadratureNode<T>>,
}

impl<T: Real> EllipseContour<T> {
    /// Ellipse with major axis `[alpha, beta]` and aspect ratio `rho = a/b`,
    /// discretized at the midpoint angles `2 pi (j + 1/2) / N`.
    pub fn build(alpha: T, beta: T, rho: T, n_nodes: usize) -> Result<Self> {
        if !(beta > alpha) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::DegenerateInterval { alpha: alpha.to_f64_lossy(), beta: beta.to_f64_lossy() });
        }
        if !(rho > T::zero()) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("aspect ratio must be positive, got {rho}")));
        }
        if n_nodes < 2 || n_nodes % 2 != 0 {
            return Err(Error::InvalidParameter(format!("node count must be even and >= 2, got {n_nodes}")));
        }
        let half = T::of(0.5);
        let center = (alpha + beta) * half;
        let a = (beta - alpha) * half;
        let b = a / rho;
        let nf = T::of_usize(n_nodes);
        let i = Complex::new(T::zero(), T::one());
        let nodes = (0..n_nodes)
            .map(|j| {
                let theta = T::TAU() * (T::of_usize(j) + half) / nf;
                let (s, c) = theta.sin_cos();
                let xi = Complex::new(center + a * c, b * s);
                let omega = Complex::new(-a * s, b * c) / (i * nf);
                QuadratureNode { xi, omega }
            })
            .collect();
        Ok(EllipseContour { center, semi_major: a, semi_minor: b, nodes })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn aspect_ratio(&self) -> T {
        self.semi_major / self.semi_minor
    }

    /// Rational filter `h(z) = sum_j w_j / (xi_j - z)`.
    pub fn filter_value(&self, z: Complex<T>) -> Complex<T> {
        self.nodes.iter().fold(Complex::new(T::zero(), T::zero()), |acc, nd| acc + nd.omega / (nd.xi - z))
    }

    /// Filter at a real argument.
    pub fn filter_real(&self, x: T) -> T {
        self.filter_value(Complex::new(x, T::zero())).re
    }

    /// Mirror image through the origin: nodes `-xi_j`, weights `-w_j`, so
    /// that the reflected filter satisfies `h_reflected(z) = h(-z)`.
    pub fn reflect(&self) -> Self {
        EllipseContour {
            center: -self.center,
            semi_major: self.semi_major,
            semi_minor: self.semi_minor,
            nodes: self.nodes.iter().map(|nd| QuadratureNode { xi: -nd.xi, omega: -nd.omega }).collect(),
        }
    }

    /// The nodes in the open upper half-plane. For a real pencil and a real
    /// block `Z`, the full quadrature sum equals `2 Re(sum_upper w_j X_j)`,
    /// because the solve at a conjugate node is the conjugate solve and the
    /// weights come in conjugate pairs.
    pub fn conjugate_reduction(&self) -> Result<Vec<QuadratureNode<T>>> {
        let tol = T::of(64.0) * T::epsilon() * (self.center.abs() + self.semi_major + self.semi_minor);
        let upper: Vec<_> = self.nodes.iter().copied().filter(|nd| nd.xi.im > T::zero()).collect();
        if upper.len() * 2 != self.nodes.len() {
            return Err(Error::NotConjugateSymmetric);
        }
        for u in &upper {
            let partner = self
                .nodes
                .iter()
                .any(|nd| (nd.xi - u.xi.conj()).norm() <= tol && (nd.omega - u.omega.conj()).norm() <= tol);
            if !partner {
                return Err(Error::NotConjugateSymmetric);
            }
        }
        Ok(upper)
    }
}

/// Convenience wrapper for [`EllipseContour::build`].
pub fn build_ellipse<T: Real>(alpha: T, beta: T, rho: T, n_nodes: usize) -> Result<EllipseContour<T>> {
    EllipseContour::build(alpha, beta, rho, n_nodes)
}
