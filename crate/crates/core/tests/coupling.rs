//! Lattice covariances of first-order integrals against the continuum cross moments.

use anderson_chaos::chaos_quadrature::{chaos_cross_moment, QuadratureConfig};
use anderson_chaos::model_params::{EquationKind, NoiseParam};
use anderson_chaos::spectral_noise::{lattice_covariance, Lattice};
use num_complex::Complex64;

/// Time-space transform of s ↦ G_{1−s}(−y) on [0, 1] for the heat equation.
fn heat_kernel(tau: f64, xi: &[f64]) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let a = 0.5 * xi[0] * xi[0];
    let d = a - i * tau;
    if d.norm() < 1e-12 {
        return Complex64::from(1.0);
    }
    ((-i * tau).exp() - (-a).exp()) / d
}

#[test]
fn cross_covariance_matches_the_mixed_density() {
    let lattice = Lattice::default_for(1.0, 1).unwrap();
    let cfg = QuadratureConfig::default();
    let pairs = [(0.5, 0.5), (0.5, 0.75), (0.5, 0.5078125), (0.3, 0.9)];
    for (a, b) in pairs {
        let p1 = NoiseParam::regular(a, 1, 0.75).unwrap();
        let p2 = NoiseParam::regular(b, 1, 0.75).unwrap();
        let lat = lattice_covariance(&lattice, &p1, &p2, &heat_kernel, &heat_kernel).unwrap();
        let exact = chaos_cross_moment(&p1, &p2, EquationKind::Heat, 1.0, &[0.0], 1, &cfg).unwrap().value;
        assert!((lat - exact).abs() < 0.01 * exact, "alpha {a} vs {b}: lattice {lat} continuum {exact}");
    }
}

#[test]
fn gap_of_nearby_parameters_is_resolved_at_the_origin() {
    // the gap is a small difference of large terms and is dominated by small |ξ|
    let lattice = Lattice::default_for(1.0, 1).unwrap();
    let cfg = QuadratureConfig::default();
    let p = NoiseParam::regular(0.5, 1, 0.75).unwrap();
    for b in [0.75, 0.5078125] {
        let q = NoiseParam::regular(b, 1, 0.75).unwrap();
        let cov = |x: &NoiseParam, y: &NoiseParam| lattice_covariance(&lattice, x, y, &heat_kernel, &heat_kernel).unwrap();
        let gap = cov(&p, &p) + cov(&q, &q) - 2.0 * cov(&p, &q);
        let m = |x: &NoiseParam, y: &NoiseParam| chaos_cross_moment(x, y, EquationKind::Heat, 1.0, &[0.0], 1, &cfg).unwrap().value;
        let exact = m(&p, &p) + m(&q, &q) - 2.0 * m(&p, &q);
        assert!((gap - exact).abs() < 0.03 * exact, "alpha {b}: lattice gap {gap} continuum {exact}");
    }
}
