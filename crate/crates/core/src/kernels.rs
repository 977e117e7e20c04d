//! Fundamental solutions of the heat and wave operators and the chaos kernels built from them.

use crate::error::{domain, ChaosError, Result};
use crate::model_params::EquationKind;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimePoint {
    pub t: f64,
    pub x: Vec<f64>,
}

/// 0 < t₁ < … < t_k < horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedTimes {
    times: Vec<f64>,
    horizon: f64,
}

impl OrderedTimes {
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self> {
        if !is_ordered_inside(&times, horizon) {
            return domain(format!("times {times:?} are not strictly ordered inside (0, {horizon})"));
        }
        Ok(OrderedTimes { times, horizon })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Gaps t_{j+1} − t_j with t_{k+1} = horizon.
    pub fn gaps(&self) -> Vec<f64> {
        let k = self.times.len();
        (0..k)
            .map(|j| if j + 1 < k { self.times[j + 1] } else { self.horizon } - self.times[j])
            .collect()
    }
}

fn is_ordered_inside(times: &[f64], horizon: f64) -> bool {
    times.first().map_or(true, |&t| t > 0.0)
        && times.last().map_or(true, |&t| t < horizon)
        && times.windows(2).all(|w| w[0] < w[1])
}

/// FG_t(ξ): e^{−t|ξ|²/2} (heat) or sin(t|ξ|)/|ξ| (wave); zero for t < 0.
pub fn green_fourier(eq: EquationKind, t: f64, xi_norm: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    match eq {
        EquationKind::Heat => (-0.5 * t * xi_norm * xi_norm).exp(),
        EquationKind::Wave => sinc_t(t, xi_norm),
    }
}

/// sin(t r)/r with the series branch for small t r.
pub fn sinc_t(t: f64, r: f64) -> f64 {
    let z = t * r;
    if z.abs() < 1e-4 {
        t * (1.0 - z * z / 6.0)
    } else {
        (z).sin() / r
    }
}

pub fn green_physical(eq: EquationKind, d: usize, t: f64, x: &[f64]) -> Result<f64> {
    if x.len() != d {
        return Err(ChaosError::DimensionMismatch { expected: d, got: x.len() });
    }
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    match eq {
        EquationKind::Heat => Ok((2.0 * PI * t).powf(-(d as f64) / 2.0) * (-r2 / (2.0 * t)).exp()),
        EquationKind::Wave => match d {
            1 => Ok(if r2.sqrt() < t { 0.5 } else { 0.0 }),
            2 => Ok(if r2 < t * t { 1.0 / (2.0 * PI * (t * t - r2).sqrt()) } else { 0.0 }),
            _ => Err(ChaosError::Unsupported(format!("wave fundamental solution in d = {d} is not a function"))),
        },
    }
}

fn check_xis(xis: &[Vec<f64>], x: &[f64], k: usize) -> Result<()> {
    if xis.len() != k {
        return Err(ChaosError::DimensionMismatch { expected: k, got: xis.len() });
    }
    if let Some(v) = xis.iter().find(|v| v.len() != x.len()) {
        return Err(ChaosError::DimensionMismatch { expected: x.len(), got: v.len() });
    }
    Ok(())
}

/// e^{−i(ξ₁+…+ξ_k)·x} ∏ FG_{t_{j+1}−t_j}(ξ₁+…+ξ_j).
pub fn chaos_kernel_fourier(
    eq: EquationKind,
    t: f64,
    x: &[f64],
    times: &OrderedTimes,
    xis: &[Vec<f64>],
) -> Result<Complex64> {
    if times.horizon() != t {
        return domain("ordered times carry a different horizon");
    }
    check_xis(xis, x, times.times().len())?;
    Ok(kernel_unchecked(eq, t, x, times.times(), xis))
}

fn kernel_unchecked(eq: EquationKind, t: f64, x: &[f64], times: &[f64], xis: &[Vec<f64>]) -> Complex64 {
    let d = x.len();
    let k = times.len();
    let mut eta = vec![0.0; d];
    let mut value = 1.0;
    for j in 0..k {
        for (e, v) in eta.iter_mut().zip(&xis[j]) {
            *e += v;
        }
        let gap = if j + 1 < k { times[j + 1] } else { t } - times[j];
        let norm = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
        value *= green_fourier(eq, gap, norm);
    }
    let phase: f64 = eta.iter().zip(x).map(|(e, xx)| e * xx).sum();
    Complex64::from_polar(value, -phase)
}

pub const SYMMETRIZATION_LIMIT: usize = 6;

/// (1/k!) Σ_ρ of the ordered kernel (indicator of ordering included) at permuted pairs.
pub fn symmetrized_kernel_fourier(
    eq: EquationKind,
    t: f64,
    x: &[f64],
    times: &[f64],
    xis: &[Vec<f64>],
) -> Result<Complex64> {
    let k = times.len();
    if k > SYMMETRIZATION_LIMIT {
        return Err(ChaosError::OrderTooLarge { k, limit: SYMMETRIZATION_LIMIT });
    }
    check_xis(xis, x, k)?;
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut count = 0usize;
    loop {
        let pt: Vec<f64> = perm.iter().map(|&i| times[i]).collect();
        if is_ordered_inside(&pt, t) {
            let px: Vec<Vec<f64>> = perm.iter().map(|&i| xis[i].clone()).collect();
            total += kernel_unchecked(eq, t, x, &pt, &px);
        }
        count += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(total / count as f64)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
