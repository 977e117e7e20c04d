use super::lattice::{shell_fractions, CellBox, Lattice};
use crate::closed_forms::power_average;
use crate::error::{domain, ChaosError, Result};
use crate::model_params::{NoiseParam, SpatialDensity, TemporalKernel};
use crate::quad::{gauss_legendre01, Rule};

/// Spectral weight w with w² = g₀(τ)·μ-density(ξ). Pointwise at (τ, ξ) when `cell` is `None`,
/// otherwise the root mean square of w over the cell.
pub fn spectral_weight(p: &NoiseParam, tau: f64, xi: &[f64], cell: Option<&CellBox>) -> Result<f64> {
    if xi.len() != p.dim() {
        return Err(ChaosError::DimensionMismatch { expected: p.dim(), got: xi.len() });
    }
    let density = p.spatial_density();
    let w2 = match cell {
        None => {
            let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            p.temporal.density(tau) * density.eval(r)
        }
        Some(b) => {
            if b.xi.len() != p.dim() {
                return Err(ChaosError::DimensionMismatch { expected: p.dim(), got: b.xi.len() });
            }
            if !(b.tau.1 > b.tau.0) || b.xi.iter().any(|&(lo, hi)| !(hi > lo)) {
                return domain("cell must have positive extent");
            }
            temporal_cell_mean(&p.temporal, b.tau) * spatial_cell_mean(&density, &b.xi)
        }
    };
    if !w2.is_finite() {
        return domain("weight is singular at this point; pass the enclosing cell");
    }
    Ok(w2.sqrt())
}

pub(crate) fn temporal_cell_mean(k: &TemporalKernel, (a, b): (f64, f64)) -> f64 {
    k.density_average(a, b)
}

/// Mean of coef·|ξ|^power over an axis-aligned box.
pub(crate) fn spatial_cell_mean(density: &SpatialDensity, bounds: &[(f64, f64)]) -> f64 {
    let volume: f64 = bounds.iter().map(|(lo, hi)| hi - lo).product();
    if bounds.len() == 1 {
        let (lo, hi) = bounds[0];
        return density.coef * power_average(lo, hi, density.power);
    }
    let contains_origin = bounds.iter().all(|&(lo, hi)| lo <= 0.0 && hi >= 0.0);
    let integral = if contains_origin {
        orthant_split(bounds, density.power)
    } else {
        box_integral(bounds, density.power)
    };
    density.coef * integral / volume
}

/// ∫ |ξ|^p over a box containing the origin, as a sum over orthant boxes with a corner at 0.
fn orthant_split(bounds: &[(f64, f64)], p: f64) -> f64 {
    let d = bounds.len();
    let mut total = 0.0;
    'mask: for mask in 0..(1usize << d) {
        let mut sides = Vec::with_capacity(d);
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            let a = if mask >> i & 1 == 0 { hi } else { -lo };
            if a <= 0.0 {
                continue 'mask;
            }
            sides.push(a);
        }
        total += corner_box_integral(&sides, p);
    }
    total
}

/// ∫ |ξ|^p over ∏[0, a_i], split into pyramids with apex at the origin.
fn corner_box_integral(sides: &[f64], p: f64) -> f64 {
    let d = sides.len();
    let rule = gauss_legendre01(10);
    let mut total = 0.0;
    for i in 0..d {
        let face: Vec<(f64, f64)> = (0..d).filter(|&j| j != i).map(|j| (0.0, sides[j])).collect();
        let ai = sides[i];
        let face_int = tensor_integral(&face, &rule, |y2| (ai * ai + y2).powf(0.5 * p));
        total += ai / (d as f64 + p) * face_int;
    }
    total
}

/// ∫ |ξ|^p over a box away from the origin.
fn box_integral(bounds: &[(f64, f64)], p: f64) -> f64 {
    let (dist2, diam2) = bounds.iter().fold((0.0, 0.0), |(d2, m2), &(lo, hi)| {
        let near = if lo > 0.0 { lo } else if hi < 0.0 { -hi } else { 0.0 };
        (d2 + near * near, m2 + (hi - lo) * (hi - lo))
    });
    let n = if dist2 < 4.0 * diam2 { 10 } else { 4 };
    tensor_integral(bounds, &gauss_legendre01(n), |r2| r2.powf(0.5 * p))
}

/// Product Gauss rule over a box for an integrand of |y|².
fn tensor_integral(bounds: &[(f64, f64)], rule: &Rule, f: impl Fn(f64) -> f64) -> f64 {
    let maps: Vec<Rule> = bounds.iter().map(|&(lo, hi)| rule.mapped(lo, hi)).collect();
    let n = rule.len();
    let d = bounds.len();
    if d == 0 {
        return f(0.0);
    }
    let mut idx = vec![0usize; d];
    let mut total = 0.0;
    loop {
        let mut r2 = 0.0;
        let mut w = 1.0;
        for (k, &i) in idx.iter().enumerate() {
            r2 += maps[k].nodes[i] * maps[k].nodes[i];
            w *= maps[k].weights[i];
        }
        total += w * f(r2);
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == d {
                return total;
            }
        }
    }
}

/// Separable lattice weights: w(cell) = tau_factor(m) · xi_factor(x), each the RMS over its side.
/// The ξ origin cell is further split into shells with factors a_s, Σ a_s² = xi_factor(origin)².
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWeight {
    tau: Vec<f64>,
    xi: Vec<f64>,
    shells: Vec<f64>,
}

impl SpectralWeight {
    pub fn on_lattice(p: &NoiseParam, lattice: &Lattice) -> Result<Self> {
        if p.dim() != lattice.dim {
            return Err(ChaosError::DimensionMismatch { expected: lattice.dim, got: p.dim() });
        }
        let density = p.spatial_density();
        let xi = spatial_factors(&density, lattice);
        let shells = shell_factors(&density, xi[lattice.origin_xi()]);
        Ok(SpectralWeight { tau: temporal_factors(&p.temporal, lattice), xi, shells })
    }

    pub fn tau_factors(&self) -> &[f64] {
        &self.tau
    }

    pub fn xi_factors(&self) -> &[f64] {
        &self.xi
    }

    pub fn origin_shell_factors(&self) -> &[f64] {
        &self.shells
    }

    pub fn cell(&self, lattice: &Lattice, cell: usize) -> f64 {
        let (m, x) = lattice.split(cell);
        self.tau[m] * self.xi[x]
    }
}

pub(crate) fn temporal_factors(k: &TemporalKernel, lattice: &Lattice) -> Vec<f64> {
    let h = 0.5 * lattice.d_tau;
    (0..lattice.n_tau())
        .map(|m| {
            let c = lattice.tau_centre(m);
            temporal_cell_mean(k, (c - h, c + h)).sqrt()
        })
        .collect()
}

/// a_s for a homogeneous density; `origin` is the RMS factor of the whole origin cell.
pub(crate) fn shell_factors(density: &SpatialDensity, origin: f64) -> Vec<f64> {
    let q = density.dim as f64 + density.power;
    shell_fractions(q).into_iter().map(|f| origin * f.sqrt()).collect()
}

pub(crate) fn spatial_factors(density: &SpatialDensity, lattice: &Lattice) -> Vec<f64> {
    let h = 0.5 * lattice.d_xi;
    (0..lattice.n_xi_cells())
        .map(|x| {
            let bounds: Vec<(f64, f64)> = lattice.xi_centre(x).iter().map(|&c| (c - h, c + h)).collect();
            spatial_cell_mean(density, &bounds).sqrt()
        })
        .collect()
}
