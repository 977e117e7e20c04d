//! Sampling of discrete multiple Wiener integrals on a noise lattice and coupled ensembles over
//! several noise parameters sharing one draw per seed.
//!
//! A k-th order integral is the sum over ordered k-tuples of cells whose unordered pairs {c, ιc}
//! are pairwise distinct of F_k(c₁, …, c_k)·∏ w(c_j)Ŵ(c_j), where F_k is the space-time Fourier
//! transform of the chaos kernel. On the ξ origin column w(c)Ŵ(c) is replaced by the shell sum
//! w_τ(m)·Σ_s a_s Z_s(m) of the parameter's own shell factors. Time integrals use exponential product integration on a grid
//! with [`DEFAULT_TIME_STEPS`] steps over the horizon.

mod direct;
mod fast;
mod propagator;
mod stats;

use std::io::Write;

use rayon::prelude::*;

use crate::error::{domain, ChaosError, Result};
use crate::kernels::SpaceTimePoint;
use crate::model_params::{require_admissible, EquationKind, NoiseParam, TemporalKernel};
use crate::spectral_noise::{draw_noise, shell_factors, spatial_factors, Lattice, NoiseDraw};

pub use direct::{DIRECT_TABLE_BUDGET, DIRECT_WORK_BUDGET};
pub use stats::{chaos_gap, increment_moments, jackknife_mean, ks_two_sample, Direction, IncrementStat};

/// Highest chaos order the samplers support.
pub const MC_ORDER_LIMIT: usize = 3;
/// Highest order of the FFT path (one-dimensional lattices only).
pub const FFT_ORDER_LIMIT: usize = 2;
pub const DEFAULT_TIME_STEPS: usize = 256;

/// Precomputed evaluator for fixed equation, temporal kernel, lattice and points.
pub struct Sampler {
    eq: EquationKind,
    temporal: TemporalKernel,
    lattice: Lattice,
    points: Vec<SpaceTimePoint>,
    point_times: Vec<usize>,
    max_order: usize,
    fast_order: usize,
    fast: Option<fast::FastEngine>,
    direct: Option<direct::DirectEngine>,
}

/// Spatial lattice weights of a list of noise parameters.
pub struct WeightSet {
    xi: Vec<Vec<f64>>,
    shells: Vec<Vec<f64>>,
}

/// ξ factors of one parameter and the shell factors of its origin cell.
#[derive(Debug, Clone, Copy)]
pub(crate) struct XiWeights<'a> {
    pub xi: &'a [f64],
    pub shells: &'a [f64],
}

impl Sampler {
    pub fn new(
        eq: EquationKind,
        temporal: &TemporalKernel,
        lattice: &Lattice,
        points: &[SpaceTimePoint],
        max_order: usize,
        time_steps: usize,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(ChaosError::Empty("no evaluation points".into()));
        }
        if max_order > MC_ORDER_LIMIT {
            return Err(ChaosError::OrderTooLarge { k: max_order, limit: MC_ORDER_LIMIT });
        }
        if max_order == 0 {
            return domain("order must be at least one");
        }
        for pt in points {
            if pt.x.len() != lattice.dim {
                return Err(ChaosError::DimensionMismatch { expected: lattice.dim, got: pt.x.len() });
            }
            if pt.x.iter().any(|v| !v.is_finite()) {
                return domain("point coordinates must be finite");
            }
        }
        let mut times: Vec<f64> = Vec::new();
        let point_times = points
            .iter()
            .map(|pt| match times.iter().position(|&t| t == pt.t) {
                Some(i) => i,
                None => {
                    times.push(pt.t);
                    times.len() - 1
                }
            })
            .collect();
        let fast_order = if lattice.dim == 1 { max_order.min(FFT_ORDER_LIMIT) } else { 0 };
        let fast = if fast_order > 0 {
            Some(fast::FastEngine::new(eq, temporal, lattice, &times, fast_order, time_steps)?)
        } else {
            None
        };
        let direct = if max_order > fast_order {
            Some(direct::DirectEngine::new(eq, temporal, lattice, &times, max_order, time_steps)?)
        } else {
            None
        };
        Ok(Sampler {
            eq,
            temporal: temporal.clone(),
            lattice: lattice.clone(),
            points: points.to_vec(),
            point_times,
            max_order,
            fast_order,
            fast,
            direct,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn points(&self) -> &[SpaceTimePoint] {
        &self.points
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Validates the parameters against this sampler and tabulates their spatial weights.
    pub fn weights(&self, params: &[NoiseParam]) -> Result<WeightSet> {
        let xi = params
            .iter()
            .map(|p| {
                if p.dim() != self.lattice.dim {
                    return Err(ChaosError::DimensionMismatch { expected: self.lattice.dim, got: p.dim() });
                }
                if p.temporal != self.temporal {
                    return domain("all parameters must share the sampler's temporal kernel");
                }
                require_admissible(p, self.eq)?;
                let density = p.spatial_density();
                let xi = spatial_factors(&density, &self.lattice);
                let shells = shell_factors(&density, xi[self.lattice.origin_xi()]);
                Ok((xi, shells))
            })
            .collect::<Result<Vec<_>>>()?;
        let (xi, shells) = xi.into_iter().unzip();
        Ok(WeightSet { xi, shells })
    }

    /// Chaos components I_1..I_max_order, indexed [parameter][point][order − 1].
    pub fn sample(&self, draw: &NoiseDraw, weights: &WeightSet) -> Result<Vec<Vec<Vec<f64>>>> {
        if draw.lattice() != &self.lattice {
            return domain("draw lattice differs from the sampler lattice");
        }
        let wx: Vec<XiWeights> =
            weights.xi.iter().zip(&weights.shells).map(|(xi, shells)| XiWeights { xi, shells }).collect();
        let mut out: Vec<Vec<Vec<f64>>> = vec![vec![vec![0.0; self.max_order]; self.points.len()]; wx.len()];
        if let Some(f) = &self.fast {
            let pts: Vec<(usize, f64)> = self.points.iter().zip(&self.point_times).map(|(p, &ti)| (ti, p.x[0])).collect();
            for (w, per_w) in f.evaluate(draw, &wx, &pts).into_iter().enumerate() {
                for (i, v) in per_w.into_iter().enumerate() {
                    out[w][i][..self.fast_order].copy_from_slice(&v[..self.fast_order]);
                }
            }
        }
        if let Some(d) = &self.direct {
            let pts: Vec<(usize, &[f64])> =
                self.points.iter().zip(&self.point_times).map(|(p, &ti)| (ti, p.x.as_slice())).collect();
            for (w, per_w) in d.evaluate(draw, &wx, &pts).into_iter().enumerate() {
                for (i, v) in per_w.into_iter().enumerate() {
                    out[w][i][self.fast_order..].copy_from_slice(&v[self.fast_order..]);
                }
            }
        }
        Ok(out)
    }
}

fn single(draw: &NoiseDraw, p: &NoiseParam, eq: EquationKind, t: f64, x: &[f64], m: usize) -> Result<Vec<f64>> {
    let pt = SpaceTimePoint { t, x: x.to_vec() };
    let sampler = Sampler::new(eq, &p.temporal, draw.lattice(), &[pt], m, DEFAULT_TIME_STEPS)?;
    let w = sampler.weights(std::slice::from_ref(p))?;
    Ok(sampler.sample(draw, &w)?.remove(0).remove(0))
}

/// Discrete k-th order integral of the chaos kernel at (t, x); k = 0 gives 1.
pub fn discrete_multiple_integral(draw: &NoiseDraw, p: &NoiseParam, eq: EquationKind, t: f64, x: &[f64], k: usize) -> Result<f64> {
    if k == 0 {
        require_admissible(p, eq)?;
        return Ok(1.0);
    }
    Ok(single(draw, p, eq, t, x, k)?[k - 1])
}

/// u_m(t, x) = 1 + Σ_{k ≤ m} I_k.
pub fn truncated_solution(draw: &NoiseDraw, p: &NoiseParam, eq: EquationKind, t: f64, x: &[f64], m: usize) -> Result<f64> {
    if m == 0 {
        require_admissible(p, eq)?;
        return Ok(1.0);
    }
    Ok(1.0 + single(draw, p, eq, t, x, m)?.iter().sum::<f64>())
}

/// Chaos components for every (seed, parameter, point), all parameters driven by the same draw.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleTable {
    seeds: Vec<u64>,
    labels: Vec<String>,
    thetas: Vec<f64>,
    points: Vec<SpaceTimePoint>,
    max_order: usize,
    /// [((seed · n_theta + theta) · n_points + point) · max_order + k − 1]
    values: Vec<f64>,
}

impl EnsembleTable {
    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn points(&self) -> &[SpaceTimePoint] {
        &self.points
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn index(&self, seed: usize, theta: usize, point: usize) -> usize {
        ((seed * self.thetas.len() + theta) * self.points.len() + point) * self.max_order
    }

    /// I_k at (seed index, parameter index, point index), 1 ≤ k ≤ max_order.
    pub fn chaos(&self, seed: usize, theta: usize, point: usize, k: usize) -> f64 {
        assert!(k >= 1 && k <= self.max_order, "order {k} not in table");
        self.values[self.index(seed, theta, point) + k - 1]
    }

    pub fn solution(&self, seed: usize, theta: usize, point: usize) -> f64 {
        if self.max_order == 0 {
            return 1.0;
        }
        let i = self.index(seed, theta, point);
        1.0 + self.values[i..i + self.max_order].iter().sum::<f64>()
    }

    /// Rows `seed,theta,t,x,value` with the parameter label as theta and the truncated solution as
    /// value, quoted per RFC 4180. Coordinates of multi-dimensional points are joined by ';'.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let io = |e: std::io::Error| ChaosError::Io(e.to_string());
        let mut out = String::from("seed,theta,t,x,value\n");
        for (s, seed) in self.seeds.iter().enumerate() {
            for (th, label) in self.labels.iter().enumerate() {
                let label = csv_field(label);
                for (pi, pt) in self.points.iter().enumerate() {
                    let x: Vec<String> = pt.x.iter().map(|v| v.to_string()).collect();
                    out.push_str(&format!("{seed},{label},{},{},{}\n", pt.t, x.join(";"), self.solution(s, th, pi)));
                }
            }
        }
        w.write_all(out.as_bytes()).map_err(io)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Samples every seed on `lattice` and evaluates all parameters against the same draw.
pub fn coupled_ensemble(
    seeds: &[u64],
    params: &[NoiseParam],
    eq: EquationKind,
    points: &[SpaceTimePoint],
    m: usize,
    lattice: &Lattice,
) -> Result<EnsembleTable> {
    coupled_ensemble_with_steps(seeds, params, eq, points, m, lattice, DEFAULT_TIME_STEPS)
}

pub fn coupled_ensemble_with_steps(
    seeds: &[u64],
    params: &[NoiseParam],
    eq: EquationKind,
    points: &[SpaceTimePoint],
    m: usize,
    lattice: &Lattice,
    time_steps: usize,
) -> Result<EnsembleTable> {
    if seeds.is_empty() {
        return Err(ChaosError::Empty("no seeds".into()));
    }
    if params.is_empty() {
        return Err(ChaosError::Empty("no noise parameters".into()));
    }
    if m == 0 {
        for p in params {
            require_admissible(p, eq)?;
        }
        return Ok(EnsembleTable {
            seeds: seeds.to_vec(),
            labels: params.iter().map(|p| p.label()).collect(),
            thetas: params.iter().map(|p| p.theta()).collect(),
            points: points.to_vec(),
            max_order: 0,
            values: Vec::new(),
        });
    }
    let temporal = &params[0].temporal;
    let sampler = Sampler::new(eq, temporal, lattice, points, m, time_steps)?;
    let weights = sampler.weights(params)?;
    let per_seed: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| {
            let draw = draw_noise(lattice, seed);
            let s = sampler.sample(&draw, &weights)?;
            Ok(s.into_iter().flatten().flatten().collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleTable {
        seeds: seeds.to_vec(),
        labels: params.iter().map(|p| p.label()).collect(),
        thetas: params.iter().map(|p| p.theta()).collect(),
        points: points.to_vec(),
        max_order: m,
        values: per_seed.concat(),
    })
}

#[cfg(test)]
mod tests;
