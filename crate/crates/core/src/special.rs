//! Gamma-function helpers shared by the closed forms and quadrature rules.

use std::f64::consts::PI;

/// Argmin of the Gamma function on (0, ∞).
pub const GAMMA_ARGMIN: f64 = 1.461632144968362;

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Surface measure of the unit sphere in R^d; d = 1 gives the counting measure on {±1}.
pub fn sphere_area(d: usize) -> f64 {
    assert!(d >= 1, "sphere_area needs d >= 1");
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// ∫_0^∞ (1 − cos x) x^{−1−ν} dx for ν ∈ (0, 2).
pub fn one_minus_cos_mellin(nu: f64) -> f64 {
    PI / (2.0 * gamma(1.0 + nu) * (PI * nu / 2.0).sin())
}
