//! Parameter space of the noise and the existence conditions for the chaos series.

use crate::error::{domain, ChaosError, Result};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquationKind {
    Heat,
    Wave,
}

impl fmt::Display for EquationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquationKind::Heat => "heat",
            EquationKind::Wave => "wave",
        })
    }
}

/// Non-negative even spectral density given by samples on 0 = τ_0 < τ_1 < … ;
/// linear between samples, zero beyond the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    tau: Vec<f64>,
    g: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(tau: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if tau.len() != g.len() || tau.len() < 2 {
            return domain("tabulated density needs at least two (tau, g) samples of equal length");
        }
        if tau[0] != 0.0 {
            return domain("tabulated density must start at tau = 0");
        }
        if tau.windows(2).any(|w| !(w[1] > w[0])) || tau.iter().any(|t| !t.is_finite()) {
            return domain("tabulated tau grid must be finite and strictly increasing");
        }
        if g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return domain("tabulated density must be finite and non-negative");
        }
        Ok(TabulatedDensity { tau, g })
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn values(&self) -> &[f64] {
        &self.g
    }

    pub fn eval(&self, tau: f64) -> f64 {
        let a = tau.abs();
        let last = *self.tau.last().expect("non-empty");
        if a >= last {
            return if a == last { *self.g.last().expect("non-empty") } else { 0.0 };
        }
        let i = self.tau.partition_point(|&t| t <= a) - 1;
        let (t0, t1) = (self.tau[i], self.tau[i + 1]);
        let s = (a - t0) / (t1 - t0);
        self.g[i] * (1.0 - s) + self.g[i + 1] * s
    }

    /// ∫_a^b g(τ) dτ over a ≤ b (any signs).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if a < 0.0 && b > 0.0 {
            return self.integral_pos(0.0, -a) + self.integral_pos(0.0, b);
        }
        if b <= 0.0 {
            return self.integral_pos(-b, -a);
        }
        self.integral_pos(a, b)
    }

    fn integral_pos(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.tau.len() - 1 {
            let (t0, t1) = (self.tau[i], self.tau[i + 1]);
            let lo = a.max(t0);
            let hi = b.min(t1);
            if hi > lo {
                total += 0.5 * (hi - lo) * (self.eval(lo) + self.eval(hi));
            }
        }
        total
    }

    /// Time-domain covariance γ₀(s) = 2∫_0^∞ g(τ) cos(τ s) dτ, exact for the piecewise-linear density.
    pub fn covariance(&self, s: f64) -> f64 {
        let s = s.abs();
        let mut total = 0.0;
        for i in 0..self.tau.len() - 1 {
            let (a, b) = (self.tau[i], self.tau[i + 1]);
            let (ga, gb) = (self.g[i], self.g[i + 1]);
            if s * (b - a) < 1e-4 {
                // cos expanded to second order on the panel
                let m0 = 0.5 * (b - a) * (ga + gb);
                let m2 = (b - a) * (ga * (3.0 * a * a + 2.0 * a * b + b * b) + gb * (a * a + 2.0 * a * b + 3.0 * b * b)) / 12.0;
                total += m0 - 0.5 * s * s * m2;
            } else {
                let slope = (gb - ga) / (b - a);
                // ∫ (ga + slope (τ−a)) cos(sτ) dτ
                let prim = |t: f64| -> f64 {
                    let gv = ga + slope * (t - a);
                    gv * (s * t).sin() / s + slope * (s * t).cos() / (s * s)
                };
                total += prim(b) - prim(a);
            }
        }
        2.0 * total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemporalKernel {
    /// γ₀(t) = α_{H₀}|t|^{2H₀−2}, h0 ∈ (1/2, 1).
    Fractional { h0: f64 },
    Tabulated(TabulatedDensity),
}

impl TemporalKernel {
    pub fn fractional(h0: f64) -> Result<Self> {
        if !(h0 > 0.5 && h0 < 1.0) {
            return domain(format!("h0 = {h0} must lie in (1/2, 1)"));
        }
        Ok(TemporalKernel::Fractional { h0 })
    }

    pub fn h0(&self) -> Option<f64> {
        match self {
            TemporalKernel::Fractional { h0 } => Some(*h0),
            TemporalKernel::Tabulated(_) => None,
        }
    }

    /// Spectral density g₀(τ).
    pub fn density(&self, tau: f64) -> f64 {
        match self {
            TemporalKernel::Fractional { h0 } => {
                crate::closed_forms::riesz_space_constant_unchecked(*h0) * tau.abs().powf(1.0 - 2.0 * h0)
            }
            TemporalKernel::Tabulated(t) => t.eval(tau),
        }
    }

    /// Mean of g₀ over [a, b].
    pub fn density_average(&self, a: f64, b: f64) -> f64 {
        match self {
            TemporalKernel::Fractional { h0 } => {
                let c = crate::closed_forms::riesz_space_constant_unchecked(*h0);
                c * crate::closed_forms::power_average(a, b, 1.0 - 2.0 * h0)
            }
            TemporalKernel::Tabulated(t) => t.integral(a, b) / (b - a),
        }
    }

    /// Exponent e with γ₀(s) = |s|^e · regular_part(s).
    pub fn singular_exponent(&self) -> f64 {
        match self {
            TemporalKernel::Fractional { h0 } => 2.0 * h0 - 2.0,
            TemporalKernel::Tabulated(_) => 0.0,
        }
    }

    /// γ₀(s)/|s|^e for the exponent of `singular_exponent`.
    pub fn regular_part(&self, s: f64) -> f64 {
        match self {
            TemporalKernel::Fractional { h0 } => h0 * (2.0 * h0 - 1.0),
            TemporalKernel::Tabulated(t) => t.covariance(s),
        }
    }

    pub fn covariance(&self, s: f64) -> f64 {
        match self {
            TemporalKernel::Fractional { h0 } => h0 * (2.0 * h0 - 1.0) * s.abs().powf(2.0 * h0 - 2.0),
            TemporalKernel::Tabulated(t) => t.covariance(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// μ(dξ) = |ξ|^{−α} dξ on R^dim.
    Regular { alpha: f64, dim: usize },
    /// μ(dξ) = c_H |ξ|^{1−2H} dξ on R.
    Rough { h: f64 },
}

/// Spatial spectral density coef·|ξ|^power on R^dim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialDensity {
    pub coef: f64,
    pub power: f64,
    pub dim: usize,
}

impl SpatialDensity {
    pub fn eval(&self, xi_norm: f64) -> f64 {
        self.coef * xi_norm.powf(self.power)
    }

    /// Density of the cross term w_{θ₁}·w_{θ₂}.
    pub fn mixed(&self, other: &SpatialDensity) -> Result<SpatialDensity> {
        if self.dim != other.dim {
            return Err(ChaosError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(SpatialDensity {
            coef: (self.coef * other.coef).sqrt(),
            power: 0.5 * (self.power + other.power),
            dim: self.dim,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseParam {
    pub regime: Regime,
    pub temporal: TemporalKernel,
}

impl NoiseParam {
    pub fn new(regime: Regime, temporal: TemporalKernel) -> Result<Self> {
        match regime {
            Regime::Regular { alpha, dim } => {
                if dim == 0 {
                    return domain("dimension must be positive");
                }
                if !(alpha > 0.0 && alpha < dim as f64) {
                    return domain(format!("alpha = {alpha} must lie in (0, {dim})"));
                }
            }
            Regime::Rough { h } => {
                if !(h > 0.0 && h < 0.5) {
                    return domain(format!("H = {h} must lie in (0, 1/2)"));
                }
                if !matches!(temporal, TemporalKernel::Fractional { .. }) {
                    return Err(ChaosError::Unsupported(
                        "the rough regime requires the fractional temporal kernel".into(),
                    ));
                }
            }
        }
        if let TemporalKernel::Fractional { h0 } = temporal {
            TemporalKernel::fractional(h0)?;
        }
        Ok(NoiseParam { regime, temporal })
    }

    pub fn regular(alpha: f64, dim: usize, h0: f64) -> Result<Self> {
        NoiseParam::new(Regime::Regular { alpha, dim }, TemporalKernel::fractional(h0)?)
    }

    pub fn rough(h: f64, h0: f64) -> Result<Self> {
        NoiseParam::new(Regime::Rough { h }, TemporalKernel::fractional(h0)?)
    }

    pub fn dim(&self) -> usize {
        match self.regime {
            Regime::Regular { dim, .. } => dim,
            Regime::Rough { .. } => 1,
        }
    }

    /// Scalar coordinate along a one-parameter family: α or H.
    pub fn theta(&self) -> f64 {
        match self.regime {
            Regime::Regular { alpha, .. } => alpha,
            Regime::Rough { h } => h,
        }
    }

    /// Same family with the scalar coordinate replaced.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        let regime = match self.regime {
            Regime::Regular { dim, .. } => Regime::Regular { alpha: theta, dim },
            Regime::Rough { .. } => Regime::Rough { h: theta },
        };
        NoiseParam::new(regime, self.temporal.clone())
    }

    pub fn same_family(&self, other: &NoiseParam) -> bool {
        match (self.regime, other.regime) {
            (Regime::Regular { dim: a, .. }, Regime::Regular { dim: b, .. }) => a == b && self.temporal == other.temporal,
            (Regime::Rough { .. }, Regime::Rough { .. }) => self.temporal == other.temporal,
            _ => false,
        }
    }

    pub fn spatial_density(&self) -> SpatialDensity {
        match self.regime {
            Regime::Regular { alpha, dim } => SpatialDensity { coef: 1.0, power: -alpha, dim },
            Regime::Rough { h } => SpatialDensity {
                coef: crate::closed_forms::riesz_space_constant_unchecked(h),
                power: 1.0 - 2.0 * h,
                dim: 1,
            },
        }
    }

    /// Label used in tables: `regular:alpha=0.5,d=1` or `rough:H=0.3`.
    pub fn label(&self) -> String {
        match self.regime {
            Regime::Regular { alpha, dim } => format!("regular:alpha={alpha},d={dim}"),
            Regime::Rough { h } => format!("rough:H={h}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceReport {
    pub admissible: bool,
    pub condition_checked: String,
    pub margin: f64,
}

pub fn lower_endpoint_ell(eq: EquationKind, h0: f64) -> Result<f64> {
    TemporalKernel::fractional(h0)?;
    Ok(match eq {
        EquationKind::Heat => (0.75 - h0).max(0.0),
        EquationKind::Wave => 0.25,
    })
}

pub fn validate_existence(p: &NoiseParam, eq: EquationKind) -> ExistenceReport {
    let (condition, margin) = match (p.regime, eq) {
        (Regime::Regular { alpha, dim }, EquationKind::Heat) => {
            let d = dim as f64;
            ("d - alpha < 2".to_string(), (2.0 - (d - alpha)).min(alpha).min(d - alpha))
        }
        (Regime::Regular { alpha, dim }, EquationKind::Wave) => {
            let d = dim as f64;
            match p.temporal.h0() {
                Some(h0) => (
                    "d - alpha < 2 H0 + 1".to_string(),
                    (2.0 * h0 + 1.0 - (d - alpha)).min(alpha).min(d - alpha),
                ),
                None => ("d - alpha < 2".to_string(), (2.0 - (d - alpha)).min(alpha).min(d - alpha)),
            }
        }
        (Regime::Rough { h }, EquationKind::Heat) => {
            let h0 = p.temporal.h0().unwrap_or(f64::NAN);
            (
                "H0 + H > 3/4 (sufficient condition)".to_string(),
                (h - (0.75 - h0)).min(h).min(0.5 - h),
            )
        }
        (Regime::Rough { h }, EquationKind::Wave) => {
            ("H > 1/4 (sufficient condition)".to_string(), (h - 0.25).min(0.5 - h))
        }
    };
    let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
    ExistenceReport { admissible: margin > 0.0, condition_checked: condition, margin }
}

pub(crate) fn require_admissible(p: &NoiseParam, eq: EquationKind) -> Result<()> {
    let r = validate_existence(p, eq);
    if r.admissible {
        Ok(())
    } else {
        Err(ChaosError::Inadmissible(format!(
            "{} for {eq}: {} fails (margin {})",
            p.label(),
            r.condition_checked,
            r.margin
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ell_values() {
        assert_eq!(lower_endpoint_ell(EquationKind::Heat, 0.8).unwrap(), 0.0);
        assert_eq!(lower_endpoint_ell(EquationKind::Wave, 0.6).unwrap(), 0.25);
        assert_relative_eq!(lower_endpoint_ell(EquationKind::Heat, 0.6).unwrap(), 0.15, max_relative = 1e-12);
        assert!(lower_endpoint_ell(EquationKind::Heat, 0.5).is_err());
        assert!(lower_endpoint_ell(EquationKind::Heat, 1.0).is_err());
    }

    #[test]
    fn existence_examples() {
        let p = NoiseParam::regular(0.5, 2, 0.75).unwrap();
        let r = validate_existence(&p, EquationKind::Heat);
        assert!(r.admissible);
        assert_relative_eq!(r.margin, 0.5, max_relative = 1e-12);

        let p = NoiseParam::rough(0.2, 0.75).unwrap();
        assert!(!validate_existence(&p, EquationKind::Wave).admissible);

        for eps in [1e-1, 1e-3, 1e-6] {
            let p = NoiseParam::regular(1.0 - eps, 1, 0.7).unwrap();
            assert!(validate_existence(&p, EquationKind::Heat).admissible);
            assert!(validate_existence(&p, EquationKind::Wave).admissible);
        }
    }

    #[test]
    fn boundary_is_inadmissible() {
        let p = NoiseParam::rough(0.25, 0.75).unwrap();
        let r = validate_existence(&p, EquationKind::Wave);
        assert_eq!(r.margin, 0.0);
        assert!(!r.admissible);
        let p = NoiseParam::rough(0.125, 0.625).unwrap();
        assert!(!validate_existence(&p, EquationKind::Heat).admissible);
    }

    #[test]
    fn structural_invariants() {
        assert!(NoiseParam::regular(0.0, 1, 0.7).is_err());
        assert!(NoiseParam::regular(1.0, 1, 0.7).is_err());
        assert!(NoiseParam::rough(0.5, 0.7).is_err());
        let tab = TabulatedDensity::new(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert!(NoiseParam::new(Regime::Rough { h: 0.3 }, TemporalKernel::Tabulated(tab)).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(NoiseParam::regular(0.5, 1, 0.75).unwrap().label(), "regular:alpha=0.5,d=1");
        assert_eq!(NoiseParam::rough(0.3, 0.75).unwrap().label(), "rough:H=0.3");
    }

    #[test]
    fn tabulated_covariance_matches_quadrature() {
        let tab = TabulatedDensity::new(vec![0.0, 0.5, 2.0, 3.0], vec![1.0, 0.8, 0.2, 0.0]).unwrap();
        for &s in &[0.0, 1e-6, 0.3, 2.7] {
            let q = crate::quad::adaptive(|t| 2.0 * tab.eval(t) * (t * s).cos(), 0.0, 3.0, 1e-13, 1e-12);
            let q = q.value;
            assert_relative_eq!(tab.covariance(s), q, max_relative = 1e-8, epsilon = 1e-12);
        }
        assert_relative_eq!(tab.integral(-1.0, 1.0), 2.0 * (0.45 + 0.5 * (0.8 + 0.8 - 0.6 * 0.5 / 1.5) * 0.5), max_relative = 1e-12);
    }

    #[test]
    fn rough_admissibility_matches_ell() {
        for &h0 in &[0.55, 0.6, 0.7, 0.8, 0.95] {
            for i in 1..50 {
                let h = i as f64 / 100.0;
                let p = NoiseParam::rough(h, h0).unwrap();
                for eq in [EquationKind::Heat, EquationKind::Wave] {
                    let ell = lower_endpoint_ell(eq, h0).unwrap();
                    assert_eq!(validate_existence(&p, eq).admissible, h > ell, "h={h} h0={h0} {eq}");
                }
            }
        }
    }
}
