//! Explicit enumeration of lattice tuples for orders up to three in any dimension. Kernel values
//! at the target times are tabulated once; a draw then costs one pass over the allowed tuples.

use num_complex::Complex64;
use rayon::prelude::*;

use super::propagator::{propagate, step_table, StepCoef, TimeGrid};
use super::XiWeights;
use crate::error::{domain, ChaosError, Result};
use crate::model_params::{EquationKind, TemporalKernel};
use crate::spectral_noise::{temporal_factors, Lattice, NoiseDraw};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Upper bound on cells^k · time nodes spent tabulating kernels.
pub const DIRECT_WORK_BUDGET: f64 = 4e8;
/// Upper bound on cells^k · target times stored.
pub const DIRECT_TABLE_BUDGET: f64 = 3e7;

pub(crate) struct DirectEngine {
    lattice: Lattice,
    n_times: usize,
    max_order: usize,
    tau_w: Vec<f64>,
    /// Orders 1..=max_order, each [tuple][time] with tuples in lexicographic cell order.
    tables: Vec<Vec<Complex64>>,
}

impl DirectEngine {
    pub fn new(
        eq: EquationKind,
        temporal: &TemporalKernel,
        lattice: &Lattice,
        times: &[f64],
        max_order: usize,
        steps: usize,
    ) -> Result<Self> {
        if !(1..=3).contains(&max_order) {
            return domain("direct enumeration covers orders 1 to 3");
        }
        let grid = TimeGrid::new(times, steps)?;
        let n = lattice.len();
        let nn = grid.nodes.len();
        let work = (n as f64).powi(max_order as i32) * nn as f64;
        let table = (n as f64).powi(max_order as i32) * times.len() as f64;
        if work > DIRECT_WORK_BUDGET || table > DIRECT_TABLE_BUDGET {
            return Err(ChaosError::Budget(format!(
                "{n} cells at order {max_order} need {work:.2e} steps and {table:.2e} table entries"
            )));
        }
        let coords: Vec<Vec<i64>> = (0..n).map(|c| lattice.xi_coords(lattice.split(c).1)).collect();
        let taus: Vec<f64> = (0..n).map(|c| lattice.tau_centre(lattice.split(c).0)).collect();
        let reach = max_order as i64 * lattice.half_xi() as i64;
        let max_norm2 = lattice.dim as i64 * reach * reach;
        let coefs: Vec<Vec<StepCoef>> =
            (0..=max_norm2).into_par_iter().map(|q| step_table(eq, &grid, (q as f64).sqrt() * lattice.d_xi)).collect();
        let norm2 = |v: &[i64]| v.iter().map(|a| a * a).sum::<i64>() as usize;
        let phases: Vec<Vec<Complex64>> =
            taus.iter().map(|&tau| grid.nodes.iter().map(|&r| Complex64::new(0.0, -tau * r).exp()).collect()).collect();
        let targets = &grid.target_nodes;

        let level1: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|c| {
                let mut out = vec![ZERO; nn];
                propagate(&coefs[norm2(&coords[c])], |i| phases[c][i], &mut out);
                out
            })
            .collect();
        let mut tables = vec![level1.iter().flat_map(|r| targets.iter().map(|&i| r[i])).collect::<Vec<_>>()];
        if max_order >= 2 {
            let per_first: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..n)
                .into_par_iter()
                .map(|c1| {
                    let mut t2 = Vec::with_capacity(n * targets.len());
                    let mut t3 = Vec::new();
                    let mut r2 = vec![ZERO; nn];
                    let mut r3 = vec![ZERO; nn];
                    let mut sum = coords[c1].clone();
                    for c2 in 0..n {
                        for (s, (a, b)) in sum.iter_mut().zip(coords[c1].iter().zip(&coords[c2])) {
                            *s = a + b;
                        }
                        propagate(&coefs[norm2(&sum)], |i| level1[c1][i] * phases[c2][i], &mut r2);
                        t2.extend(targets.iter().map(|&i| r2[i]));
                        if max_order >= 3 {
                            let mut sum3 = sum.clone();
                            for c3 in 0..n {
                                for (s, (a, b)) in sum3.iter_mut().zip(sum.iter().zip(&coords[c3])) {
                                    *s = a + b;
                                }
                                propagate(&coefs[norm2(&sum3)], |i| r2[i] * phases[c3][i], &mut r3);
                                t3.extend(targets.iter().map(|&i| r3[i]));
                            }
                        }
                    }
                    (t2, t3)
                })
                .collect();
            let (t2, t3): (Vec<_>, Vec<_>) = per_first.into_iter().unzip();
            tables.push(t2.concat());
            if max_order >= 3 {
                tables.push(t3.concat());
            }
        }
        Ok(DirectEngine {
            lattice: lattice.clone(),
            n_times: times.len(),
            max_order,
            tau_w: temporal_factors(temporal, lattice),
            tables,
        })
    }

    /// `points` are (target time index, x). Returns [weight][point][order − 1].
    pub fn evaluate(&self, draw: &NoiseDraw, xi_weights: &[XiWeights], points: &[(usize, &[f64])]) -> Vec<Vec<Vec<f64>>> {
        let lat = &self.lattice;
        let n = lat.len();
        let nt = self.n_times;
        let class: Vec<usize> = (0..n).map(|c| c.min(lat.mirror(c))).collect();
        let centres: Vec<Vec<f64>> = (0..n).map(|c| lat.centre(c).1).collect();
        let origin = lat.origin_xi();
        xi_weights
            .iter()
            .map(|wx| {
                let v: Vec<Complex64> = (0..n)
                    .map(|c| {
                        let (m, x) = lat.split(c);
                        let noise = if x == origin { draw.origin_value(m, wx.shells) } else { draw.value(c) * wx.xi[x] };
                        noise * self.tau_w[m]
                    })
                    .collect();
                points
                    .iter()
                    .map(|&(ti, x)| {
                        let a: Vec<Complex64> = (0..n)
                            .map(|c| {
                                let dot: f64 = centres[c].iter().zip(x).map(|(u, w)| u * w).sum();
                                v[c] * Complex64::new(0.0, -dot).exp()
                            })
                            .collect();
                        let mut out = vec![0.0; self.max_order];
                        out[0] = (0..n).map(|c| a[c] * self.tables[0][c * nt + ti]).sum::<Complex64>().re;
                        if self.max_order >= 2 {
                            let mut s2 = ZERO;
                            let mut s3 = ZERO;
                            for c1 in 0..n {
                                for c2 in 0..n {
                                    if class[c2] == class[c1] {
                                        continue;
                                    }
                                    let p12 = a[c1] * a[c2];
                                    let i12 = c1 * n + c2;
                                    s2 += p12 * self.tables[1][i12 * nt + ti];
                                    if self.max_order >= 3 {
                                        for c3 in 0..n {
                                            if class[c3] == class[c1] || class[c3] == class[c2] {
                                                continue;
                                            }
                                            s3 += p12 * a[c3] * self.tables[2][(i12 * n + c3) * nt + ti];
                                        }
                                    }
                                }
                            }
                            out[1] = s2.re;
                            if self.max_order >= 3 {
                                out[2] = s3.re;
                            }
                        }
                        out
                    })
                    .collect()
            })
            .collect()
    }
}
