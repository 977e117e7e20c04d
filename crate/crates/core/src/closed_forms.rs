//! Exact integral formulas, named constants and the dominating tail series.

use crate::error::{domain, ChaosError, Result};
use crate::model_params::EquationKind;
use crate::quad::gauss_jacobi01;
use crate::special::{gamma, ln_gamma, one_minus_cos_mellin, GAMMA_ARGMIN};
use std::f64::consts::PI;

pub use crate::special::sphere_area;

/// ∫_{T_n(t)} ∏ (t_{j+1} − t_j)^{β_j} dt with t_{n+1} = t.
pub fn simplex_power_integral(t: f64, betas: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    if let Some(b) = betas.iter().find(|&&b| !(b > -1.0)) {
        return domain(format!("exponent {b} must exceed -1"));
    }
    let n = betas.len() as f64;
    let s: f64 = betas.iter().sum::<f64>() + n;
    let log = betas.iter().map(|b| ln_gamma(b + 1.0)).sum::<f64>() + s * t.ln() - ln_gamma(s + 1.0);
    let sign: f64 = betas.iter().map(|b| gamma(b + 1.0).signum()).product();
    Ok(sign * log.exp())
}

/// ∫_R e^{−tξ²}|ξ|^a dξ.
pub fn gaussian_freq_moment(t: f64, a: f64) -> Result<f64> {
    if !(t > 0.0 && a > -1.0) {
        return domain(format!("need t > 0 and a > -1, got t = {t}, a = {a}"));
    }
    Ok(gamma((1.0 + a) / 2.0) * t.powf(-(1.0 + a) / 2.0))
}

/// C̃_a of the wave frequency moment, a ∈ (−1, 1).
pub fn wave_moment_coefficient(a: f64) -> Result<f64> {
    if !(a > -1.0 && a < 1.0) {
        return domain(format!("a = {a} must lie in (-1, 1)"));
    }
    Ok(if a > 0.0 {
        gamma(a) * (PI * a / 2.0).sin() / (1.0 - a)
    } else if a < 0.0 {
        gamma(1.0 + a) * (PI * a / 2.0).sin() / (a * (1.0 - a))
    } else {
        PI / 2.0
    })
}

/// ∫_R sin²(t|ξ|)/|ξ|² · |ξ|^a dξ.
pub fn wave_freq_moment(t: f64, a: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    Ok(2f64.powf(1.0 - a) * wave_moment_coefficient(a)? * t.powf(1.0 - a))
}

/// ∫_{R^d} e^{−c|ξ|²}|ξ|^p dξ, c > 0, d + p > 0.
pub fn heat_freq_integral(d: usize, p: f64, c: f64) -> f64 {
    let s = (d as f64 + p) / 2.0;
    0.5 * sphere_area(d) * gamma(s) * c.powf(-s)
}

/// ∫_{R^d} sin(u|ξ|) sin(v|ξ|) |ξ|^{p−2} dξ for u, v ≥ 0 and ν = 2 − d − p ∈ (0, 2).
pub fn wave_cross_freq_integral(d: usize, p: f64, u: f64, v: f64) -> f64 {
    let nu = 2.0 - d as f64 - p;
    0.5 * sphere_area(d) * one_minus_cos_mellin(nu) * ((u + v).abs().powf(nu) - (u - v).abs().powf(nu))
}

/// (α_{H₀}, c_{H₀}).
pub fn riesz_time_constants(h0: f64) -> Result<(f64, f64)> {
    if !(h0 > 0.5 && h0 < 1.0) {
        return domain(format!("h0 = {h0} must lie in (1/2, 1)"));
    }
    Ok((h0 * (2.0 * h0 - 1.0), riesz_space_constant_unchecked(h0)))
}

/// c_H = Γ(2H+1) sin(πH)/(2π).
pub fn riesz_space_constant(h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return domain(format!("h = {h} must lie in (0, 1)"));
    }
    Ok(riesz_space_constant_unchecked(h))
}

pub(crate) fn riesz_space_constant_unchecked(h: f64) -> f64 {
    gamma(2.0 * h + 1.0) * (PI * h).sin() / (2.0 * PI)
}

/// Mean of |s|^q over [a, b], q > −1.
pub fn power_average(a: f64, b: f64, q: f64) -> f64 {
    debug_assert!(b > a && q > -1.0);
    let prim = |x: f64| x.signum() * x.abs().powf(q + 1.0) / (q + 1.0);
    (prim(b) - prim(a)) / (b - a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DalangConstant {
    pub value: f64,
    pub bound: f64,
    pub r_heat: f64,
    pub r_wave: f64,
}

impl DalangConstant {
    pub fn r(&self, eq: EquationKind) -> f64 {
        match eq {
            EquationKind::Heat => self.r_heat,
            EquationKind::Wave => self.r_wave,
        }
    }
}

fn check_strip(d: usize, alpha: f64) -> Result<()> {
    let df = d as f64;
    if d == 0 || !(alpha > (df - 2.0).max(0.0) && alpha < df) {
        return domain(format!("alpha = {alpha} outside (max(d-2,0), d) for d = {d}"));
    }
    Ok(())
}

/// K_{d,α} = ∫(1+|ξ|²)^{−1}|ξ|^{−α}dξ by radial quadrature, its explicit bound, and r_α.
pub fn dalang_constant(d: usize, alpha: f64) -> Result<DalangConstant> {
    check_strip(d, alpha)?;
    let df = d as f64;
    // ∫_0^1 r^{d−1−α}/(1+r²) dr + ∫_0^1 s^{α+1−d}/(1+s²) ds, each with a power-exact Jacobi rule.
    let inner = |q: f64| gauss_jacobi01(40, q).apply(|s| 1.0 / (1.0 + s * s));
    let value = sphere_area(d) * (inner(df - 1.0 - alpha) + inner(alpha + 1.0 - df));
    let bound = sphere_area(d) * (1.0 / (df - alpha) + 1.0 / (2.0 - (df - alpha)));
    Ok(DalangConstant { value, bound, r_heat: -(df - alpha) / 2.0, r_wave: 2.0 - (df - alpha) })
}

/// k_α(t) = (c_d/2) Γ((d−α)/2) t^{−(d−α)/2}.
pub fn heat_k_alpha(t: f64, d: usize, alpha: f64) -> Result<f64> {
    check_strip(d, alpha)?;
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    Ok(heat_freq_integral(d, -alpha, t))
}

/// Γ_{0,t} = ∫_{−t}^{t} γ₀ = 2H₀ t^{2H₀−1}.
pub fn gamma0_window(t: f64, h0: f64) -> Result<f64> {
    if !(h0 > 0.5 && h0 < 1.0) || !(t > 0.0) {
        return domain(format!("need t > 0 and h0 in (1/2,1), got t = {t}, h0 = {h0}"));
    }
    Ok(2.0 * h0 * t.powf(2.0 * h0 - 1.0))
}

fn tail_exponents(eq: EquationKind, d: usize, a: f64, b: f64) -> (f64, f64, f64) {
    let df = d as f64;
    match eq {
        // (denominator rate, (t∨1) rate, per-term Γ factor)
        EquationKind::Heat => (1.0 - (df - a) / 2.0, 1.0 - (df - b) / 2.0, gamma(1.0 - (df - a) / 2.0)),
        EquationKind::Wave => (3.0 - df + a, 3.0 - df + b, 2.0),
    }
}

/// Smallest m with m·rate > x₀, below which the tail series is not a valid bound.
pub fn tail_threshold(eq: EquationKind, d: usize, a: f64, b: f64) -> Result<usize> {
    check_strip(d, a)?;
    check_strip(d, b)?;
    let (rate, _, _) = tail_exponents(eq, d, a, b);
    let mut m = 1usize;
    while (m as f64) * rate <= GAMMA_ARGMIN {
        m += 1;
    }
    Ok(m)
}

/// k-th term of the dominating series uniform over α ∈ [a, b].
pub fn tail_term(eq: EquationKind, d: usize, a: f64, b: f64, t: f64, k: usize, gamma0t: f64) -> Result<f64> {
    check_strip(d, a)?;
    check_strip(d, b)?;
    let df = d as f64;
    let kab = sphere_area(d) * (1.0 / (df - b) + 1.0 / (2.0 - (df - a)));
    let (rate, trate, gfac) = tail_exponents(eq, d, a, b);
    let kf = k as f64;
    let log = kf * (gamma0t.ln() + kab.ln() + gfac.ln() + trate * t.max(1.0).ln()) - ln_gamma(kf * rate + 1.0);
    Ok(log.exp())
}

/// Σ_{k ≥ m+1} of the dominating series, summed until terms fall below 1e−16 of the total.
pub fn chaos_tail_bound(eq: EquationKind, d: usize, a: f64, b: f64, t: f64, m: usize, gamma0t: f64) -> Result<f64> {
    if !(a < b) {
        return domain(format!("need a < b, got a = {a}, b = {b}"));
    }
    if !(t > 0.0 && gamma0t > 0.0) {
        return domain("t and the window mass must be positive");
    }
    let m0 = tail_threshold(eq, d, a, b)?;
    if m < m0 {
        return Err(ChaosError::Domain(format!("m = {m} is below the threshold m0 = {m0}")));
    }
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut k = m + 1;
    loop {
        let term = tail_term(eq, d, a, b, t, k, gamma0t)?;
        sum += term;
        if term <= 1e-16 * sum && term <= prev {
            break;
        }
        prev = term;
        k += 1;
        if k > m + 1_000_000 {
            return Err(ChaosError::NonConvergence { estimate: term, tolerance: 1e-16 * sum });
        }
    }
    Ok(sum)
}

/// (C_{H,1}, C_{H,2}); C_{H,2} depends on the temporal index h0 as well.
pub fn rough_constants(eq: EquationKind, h: f64, h0: f64) -> Result<(f64, f64)> {
    if !(h > 0.0 && h < 0.5) {
        return domain(format!("h = {h} must lie in (0, 1/2)"));
    }
    if !(h0 > 0.5 && h0 < 1.0) {
        return domain(format!("h0 = {h0} must lie in (1/2, 1)"));
    }
    let checked = |args: &[f64]| -> Result<f64> {
        if let Some(x) = args.iter().find(|&&x| !(x > 0.0)) {
            return domain(format!("Gamma argument {x} is not positive"));
        }
        Ok(args.iter().map(|&x| gamma(x)).fold(f64::NEG_INFINITY, f64::max))
    };
    match eq {
        EquationKind::Heat => {
            let c1 = checked(&[0.5, 1.0 - h, (3.0 - 4.0 * h) / 2.0])?;
            let c2 = checked(&[1.0 - 1.0 / (4.0 * h0), 1.0 - (1.0 - h) / (2.0 * h0), 1.0 - (3.0 - 4.0 * h) / (4.0 * h0)])?;
            Ok((c1, c2))
        }
        EquationKind::Wave => {
            if !(h > 0.25) {
                return domain(format!("h = {h} must exceed 1/4 for the wave constants"));
            }
            let c1 = PI
                .max(gamma(1.0 - 2.0 * h) / h)
                .max(2.0 * gamma(2.0 - 4.0 * h) / (4.0 * h - 1.0));
            let c2 = checked(&[1.0 + 1.0 / (2.0 * h0), 1.0 + h / h0, 1.0 + (4.0 * h - 1.0) / (2.0 * h0)])?;
            Ok((c1, c2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simplex_examples() {
        assert_relative_eq!(simplex_power_integral(1.0, &[0.0, 0.0]).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(simplex_power_integral(2.0, &[0.0]).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(simplex_power_integral(1.0, &[-0.5]).unwrap(), 2.0, max_relative = 1e-14);
        assert!(simplex_power_integral(1.0, &[-1.0]).is_err());
    }

    #[test]
    fn gaussian_examples() {
        assert_relative_eq!(gaussian_freq_moment(1.0, 0.0).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gaussian_freq_moment(4.0, 0.0).unwrap(), PI.sqrt() / 2.0, max_relative = 1e-14);
        assert_relative_eq!(gaussian_freq_moment(1.0, 1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert!(gaussian_freq_moment(1.0, -1.0).is_err());
    }

    #[test]
    fn wave_examples() {
        assert_relative_eq!(wave_freq_moment(1.0, 0.0).unwrap(), PI, max_relative = 1e-14);
        assert_relative_eq!(wave_freq_moment(2.0, 0.0).unwrap(), 2.0 * PI, max_relative = 1e-14);
        let expected = 2f64.sqrt() * 2.0 * PI.sqrt() * (PI / 4.0).sin();
        assert_relative_eq!(wave_freq_moment(1.0, 0.5).unwrap(), expected, max_relative = 1e-13);
        assert!(wave_freq_moment(1.0, 1.0).is_err());
        // continuity through a = 0
        let l = wave_freq_moment(1.0, -1e-9).unwrap();
        let r = wave_freq_moment(1.0, 1e-9).unwrap();
        assert_relative_eq!(l, r, max_relative = 1e-7);
    }

    #[test]
    fn wave_cross_reduces_to_moment() {
        for &p in &[-0.6, -0.2, 0.3] {
            let lhs = wave_cross_freq_integral(1, p, 1.3, 1.3);
            assert_relative_eq!(lhs, wave_freq_moment(1.3, p).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn riesz_constants() {
        let (a, _) = riesz_time_constants(0.75).unwrap();
        assert_relative_eq!(a, 0.375, max_relative = 1e-14);
        assert_relative_eq!(riesz_space_constant(0.5).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-14);
        let expect = gamma(1.5) * (PI / 4.0).sin() / (2.0 * PI);
        assert_relative_eq!(riesz_space_constant(0.25).unwrap(), expect, max_relative = 1e-14);
        assert!(riesz_time_constants(0.5).is_err());
    }

    #[test]
    fn dalang_examples() {
        let k = dalang_constant(1, 0.5).unwrap();
        assert_relative_eq!(k.value, PI * 2f64.sqrt(), max_relative = 1e-10);
        assert_relative_eq!(k.bound, 2.0 * (1.0 / 0.5 + 1.0 / 1.5), max_relative = 1e-14);
        assert!(k.value <= k.bound);
        assert_relative_eq!(k.r_heat, -0.25, max_relative = 1e-14);
        assert_relative_eq!(k.r_wave, 1.5, max_relative = 1e-14);
        assert!(dalang_constant(3, 0.9).is_err());
        // closed form c_d π / (2 sin(π(d−α)/2))
        for &(d, a) in &[(2usize, 0.7), (3, 1.4), (3, 2.9)] {
            let v = dalang_constant(d, a).unwrap().value;
            let exact = sphere_area(d) * PI / (2.0 * (PI * (d as f64 - a) / 2.0).sin());
            assert_relative_eq!(v, exact, max_relative = 1e-9);
        }
    }

    #[test]
    fn heat_k_alpha_examples() {
        assert!(heat_k_alpha(1.0, 1, 0.0).is_err());
        assert_relative_eq!(heat_k_alpha(1.0, 1, 0.5).unwrap(), gamma(0.25), max_relative = 1e-14);
        let r = heat_k_alpha(4.0, 1, 0.5).unwrap() / heat_k_alpha(1.0, 1, 0.5).unwrap();
        assert_relative_eq!(r, 4f64.powf(-0.25), max_relative = 1e-14);
    }

    #[test]
    fn window_examples() {
        assert_relative_eq!(gamma0_window(1.0, 0.75).unwrap(), 1.5, max_relative = 1e-14);
        assert_relative_eq!(gamma0_window(4.0, 0.75).unwrap(), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn tail_monotone_and_vanishing() {
        let g = gamma0_window(1.0, 0.75).unwrap();
        for eq in [EquationKind::Heat, EquationKind::Wave] {
            let m0 = tail_threshold(eq, 1, 0.4, 0.6).unwrap();
            assert!(chaos_tail_bound(eq, 1, 0.4, 0.6, 1.0, m0.saturating_sub(1), g).is_err() || m0 == 0);
            let tails: Vec<f64> =
                (0..40).map(|i| chaos_tail_bound(eq, 1, 0.4, 0.6, 1.0, m0 + 25 * i, g).unwrap()).collect();
            assert!(tails[0] > 0.0 && tails.windows(2).all(|w| w[1] <= w[0]));
            assert!(tails.last().unwrap() < &(1e-12 * tails[0]));
        }
    }

    #[test]
    fn tail_ratio_superlinear() {
        let g = gamma0_window(1.0, 0.75).unwrap();
        let m0 = tail_threshold(EquationKind::Heat, 1, 0.4, 0.6).unwrap();
        let tails: Vec<f64> =
            (m0..m0 + 12).map(|m| chaos_tail_bound(EquationKind::Heat, 1, 0.4, 0.6, 1.0, m, g).unwrap()).collect();
        let ratios: Vec<f64> = tails.windows(2).map(|w| w[0] / w[1]).collect();
        // ratio ~ Γ(k e + 1)/Γ((k−1)e + 1) growth: eventually increasing in m
        assert!(ratios.windows(2).skip(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rough_constant_examples() {
        let (c1, _) = rough_constants(EquationKind::Heat, 0.4, 0.75).unwrap();
        assert_relative_eq!(c1, gamma(0.5), max_relative = 1e-14);
        for &h in &[0.05, 0.2, 0.45] {
            assert!(rough_constants(EquationKind::Heat, h, 0.9).unwrap().0 >= gamma(0.5));
        }
        let near = rough_constants(EquationKind::Wave, 0.25 + 1e-6, 0.75).unwrap().0;
        assert!(near > 1e5);
        assert!(rough_constants(EquationKind::Wave, 0.2, 0.75).is_err());
        assert!(rough_constants(EquationKind::Heat, 0.1, 0.6).is_err());
    }
}
