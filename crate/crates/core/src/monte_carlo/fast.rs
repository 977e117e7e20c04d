//! Orders one and two on a one-dimensional lattice in O(cells) per draw. The τ sum is a dense
//! product onto the time grid, the ξ convolution of the second order is an FFT per node, and the
//! repeated-pair terms {c, ιc} are subtracted from per-cell tables precomputed on construction.
//! The ξ = 0 column is carried per origin shell through the linear first level and combined
//! with each parameter's shell factors afterwards.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::propagator::{propagate, step_table, StepCoef, TimeGrid};
use super::XiWeights;
use crate::error::{domain, Result};
use crate::model_params::{EquationKind, TemporalKernel};
use crate::spectral_noise::{temporal_factors, Lattice, NoiseDraw, ORIGIN_SHELLS};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) struct FastEngine {
    lattice: Lattice,
    grid: TimeGrid,
    /// Distinct target times and their node indices.
    time_nodes: Vec<usize>,
    max_order: usize,
    tau_w: Vec<f64>,
    e_re: DMatrix<f64>,
    e_im: DMatrix<f64>,
    /// [j][step], j = 0..=K.
    coef1: Vec<Vec<StepCoef>>,
    /// [η][step], η = 0..=2K.
    coef2: Vec<Vec<StepCoef>>,
    /// [(time · n_tau + m) · (K+1) + j] for the pairs (c, c) and (c, ιc).
    diag_same: Vec<Complex64>,
    diag_mirror: Vec<Complex64>,
    fft_len: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

/// Orders 1..=max_order at one point for one spatial weight.
pub(crate) type OrderValues = [f64; 2];

fn smooth_len(min: usize) -> usize {
    (min..).find(|&n| {
        let mut r = n;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        r == 1
    })
    .unwrap()
}

impl FastEngine {
    pub fn new(
        eq: EquationKind,
        temporal: &TemporalKernel,
        lattice: &Lattice,
        times: &[f64],
        max_order: usize,
        steps: usize,
    ) -> Result<Self> {
        if lattice.dim != 1 {
            return domain("the FFT path needs a one-dimensional lattice");
        }
        if !(1..=2).contains(&max_order) {
            return domain("the FFT path covers orders 1 and 2");
        }
        let grid = TimeGrid::new(times, steps)?;
        let time_nodes = grid.target_nodes.clone();
        let k = lattice.half_xi();
        let nt = lattice.n_tau();
        let nn = grid.nodes.len();
        let mut e_re = DMatrix::zeros(nn, nt);
        let mut e_im = DMatrix::zeros(nn, nt);
        for m in 0..nt {
            let tau = lattice.tau_centre(m);
            for (n, &r) in grid.nodes.iter().enumerate() {
                let (s, c) = (tau * r).sin_cos();
                e_re[(n, m)] = c;
                e_im[(n, m)] = -s;
            }
        }
        let dxi = lattice.d_xi;
        let coef1: Vec<Vec<StepCoef>> = (0..=k).map(|j| step_table(eq, &grid, j as f64 * dxi)).collect();
        let coef2: Vec<Vec<StepCoef>> =
            if max_order >= 2 { (0..=2 * k).map(|j| step_table(eq, &grid, j as f64 * dxi)).collect() } else { Vec::new() };
        let fft_len = smooth_len(4 * k + 1);
        let mut planner = FftPlanner::new();
        let mut engine = FastEngine {
            lattice: lattice.clone(),
            time_nodes,
            max_order,
            tau_w: temporal_factors(temporal, lattice),
            e_re,
            e_im,
            coef1,
            coef2,
            diag_same: Vec::new(),
            diag_mirror: Vec::new(),
            fft_len,
            fft: planner.plan_fft_forward(fft_len),
            ifft: planner.plan_fft_inverse(fft_len),
            grid,
        };
        if max_order >= 2 {
            engine.build_diagonal();
        }
        Ok(engine)
    }

    /// Second-order kernel values of the pairs (c, c) and (c, ιc) at every target time, without
    /// weights, noise or spatial phase.
    fn build_diagonal(&mut self) {
        let k = self.lattice.half_xi();
        let nt = self.lattice.n_tau();
        let nn = self.grid.nodes.len();
        let nodes = &self.grid.nodes;
        let times = &self.time_nodes;
        let per_m: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..nt)
            .into_par_iter()
            .map(|m| {
                let tau = self.lattice.tau_centre(m);
                let phase: Vec<Complex64> = nodes.iter().map(|&r| Complex64::new(0.0, -tau * r).exp()).collect();
                let mut r1 = vec![ZERO; nn];
                let mut r2 = vec![ZERO; nn];
                let mut same = vec![ZERO; times.len() * (k + 1)];
                let mut mirror = vec![ZERO; times.len() * (k + 1)];
                for j in 0..=k {
                    propagate(&self.coef1[j], |n| phase[n], &mut r1);
                    propagate(&self.coef2[2 * j], |n| r1[n] * phase[n], &mut r2);
                    for (ti, &node) in times.iter().enumerate() {
                        same[ti * (k + 1) + j] = r2[node];
                    }
                    propagate(&self.coef2[0], |n| r1[n] * phase[n].conj(), &mut r2);
                    for (ti, &node) in times.iter().enumerate() {
                        mirror[ti * (k + 1) + j] = r2[node];
                    }
                }
                (same, mirror)
            })
            .collect();
        let nk = k + 1;
        let mut same = vec![ZERO; times.len() * nt * nk];
        let mut mirror = vec![ZERO; times.len() * nt * nk];
        for (m, (s, mi)) in per_m.into_iter().enumerate() {
            for ti in 0..times.len() {
                let dst = (ti * nt + m) * nk;
                same[dst..dst + nk].copy_from_slice(&s[ti * nk..(ti + 1) * nk]);
                mirror[dst..dst + nk].copy_from_slice(&mi[ti * nk..(ti + 1) * nk]);
            }
        }
        self.diag_same = same;
        self.diag_mirror = mirror;
    }

    /// `points` are (target time index, x). Returns [weight][point] order values.
    pub fn evaluate(&self, draw: &NoiseDraw, xi_weights: &[XiWeights], points: &[(usize, f64)]) -> Vec<Vec<OrderValues>> {
        let lat = &self.lattice;
        let k = lat.half_xi();
        let nk = k + 1;
        let nt = lat.n_tau();
        let nx = lat.n_xi();
        let nn = self.grid.nodes.len();
        let ns = ORIGIN_SHELLS;
        let vals = draw.values();

        // level one: Ŷ(r_n, j) = Σ_m wτ(m) Ŵ(m, j) e^{−iτ_m r_n}, j ≥ 0, then one column per
        // origin shell
        let mut b_re = DMatrix::zeros(nt, nk + ns);
        let mut b_im = DMatrix::zeros(nt, nk + ns);
        for m in 0..nt {
            for j in 0..nk {
                let v = vals[m * nx + k + j] * self.tau_w[m];
                b_re[(m, j)] = v.re;
                b_im[(m, j)] = v.im;
            }
            for (s, z) in draw.shells(m).iter().enumerate() {
                let v = z * self.tau_w[m];
                b_re[(m, nk + s)] = v.re;
                b_im[(m, nk + s)] = v.im;
            }
        }
        let y_re = &self.e_re * &b_re - &self.e_im * &b_im;
        let y_im = &self.e_re * &b_im + &self.e_im * &b_re;
        let y_all: Vec<Complex64> = y_re.iter().zip(y_im.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect();
        // column-major: y[j * nn + n]
        let (y, y_shell) = y_all.split_at(nk * nn);
        let mut r1 = vec![ZERO; nn * nk];
        for j in 0..nk {
            let col = &y[j * nn..(j + 1) * nn];
            propagate(&self.coef1[j], |n| col[n], &mut r1[j * nn..(j + 1) * nn]);
        }
        let mut r1_shell = vec![ZERO; nn * ns];
        for s in 0..ns {
            let col = &y_shell[s * nn..(s + 1) * nn];
            propagate(&self.coef1[0], |n| col[n], &mut r1_shell[s * nn..(s + 1) * nn]);
        }

        let sums = if self.max_order >= 2 { self.diagonal_sums(draw) } else { Vec::new() };

        xi_weights
            .iter()
            .map(|w| {
                let mut y = y.to_vec();
                let mut r1 = r1.clone();
                for n in 0..nn {
                    y[n] = (0..ns).map(|s| y_shell[s * nn + n] * w.shells[s]).sum();
                    r1[n] = (0..ns).map(|s| r1_shell[s * nn + n] * w.shells[s]).sum();
                }
                let mut wx = w.xi.to_vec();
                wx[k] = 1.0;
                let origin_diag = if self.max_order >= 2 { self.origin_diagonal(draw, w.shells) } else { Vec::new() };
                let r2 = if self.max_order >= 2 { Some(self.second_order(&y, &r1, &wx)) } else { None };
                points
                    .iter()
                    .map(|&(ti, x)| {
                        let node = self.time_nodes[ti];
                        let dxi = lat.d_xi;
                        let mut first = r1[node].re;
                        for j in 1..nk {
                            let ph = Complex64::new(0.0, -x * j as f64 * dxi).exp();
                            first += 2.0 * wx[k + j] * (ph * r1[j * nn + node]).re;
                        }
                        let mut second = 0.0;
                        if let Some(r2) = &r2 {
                            let row = &r2[ti * (2 * k + 1)..(ti + 1) * (2 * k + 1)];
                            let mut total = row[0].re;
                            for (eta, v) in row.iter().enumerate().skip(1) {
                                total += 2.0 * (Complex64::new(0.0, -x * eta as f64 * dxi).exp() * v).re;
                            }
                            let (s_same, s_mirror) = &sums[ti];
                            let (o_same, o_mirror) = origin_diag[ti];
                            let mut diag = o_same + o_mirror;
                            for jj in (0..nx).filter(|&jj| jj != k) {
                                let xi = (jj as f64 - k as f64) * dxi;
                                let w2 = wx[jj] * wx[jj];
                                diag += (Complex64::new(0.0, -2.0 * x * xi).exp() * s_same[jj] + s_mirror[jj]) * w2;
                            }
                            second = total - diag.re;
                        }
                        [first, second]
                    })
                    .collect()
            })
            .collect()
    }

    /// Repeated-pair sums of the ξ = 0 column for one set of shell factors, per target time.
    fn origin_diagonal(&self, draw: &NoiseDraw, shells: &[f64]) -> Vec<(Complex64, Complex64)> {
        let nt = self.lattice.n_tau();
        let nk = self.lattice.half_xi() + 1;
        let mid = self.lattice.half_tau();
        let v: Vec<Complex64> = (0..nt).map(|m| draw.origin_value(m, shells) * self.tau_w[m]).collect();
        (0..self.time_nodes.len())
            .map(|ti| {
                let mut same = ZERO;
                let mut mirror = ZERO;
                for (m, v) in v.iter().enumerate() {
                    let base = (ti * nt + m) * nk;
                    same += v * v * self.diag_same[base];
                    if m != mid {
                        mirror += self.diag_mirror[base] * v.norm_sqr();
                    }
                }
                (same, mirror)
            })
            .collect()
    }

    /// Per target time and ξ index: Σ_m wτ² Ŵ² F₂(c, c) and Σ_m wτ² |Ŵ|² F₂(c, ιc).
    fn diagonal_sums(&self, draw: &NoiseDraw) -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
        let lat = &self.lattice;
        let k = lat.half_xi();
        let nk = k + 1;
        let nt = lat.n_tau();
        let nx = lat.n_xi();
        let centre = lat.centre_cell();
        let vals = draw.values();
        (0..self.time_nodes.len())
            .map(|ti| {
                let mut same = vec![ZERO; nx];
                let mut mirror = vec![ZERO; nx];
                for m in 0..nt {
                    let wt2 = self.tau_w[m] * self.tau_w[m];
                    let base = (ti * nt + m) * nk;
                    for jj in 0..nx {
                        let cell = m * nx + jj;
                        let v = vals[cell];
                        let j = jj.abs_diff(k);
                        same[jj] += v * v * self.diag_same[base + j] * wt2;
                        if cell != centre {
                            mirror[jj] += self.diag_mirror[base + j] * (v.norm_sqr() * wt2);
                        }
                    }
                }
                (same, mirror)
            })
            .collect()
    }

    /// R₂(t, η) for η = 0..=2K at each target time, flattened [time][η].
    fn second_order(&self, y: &[Complex64], r1: &[Complex64], wx: &[f64]) -> Vec<Complex64> {
        let lat = &self.lattice;
        let k = lat.half_xi();
        let nn = self.grid.nodes.len();
        let l = self.fft_len;
        let ne = 2 * k + 1;
        let mut z = vec![ZERO; ne * nn];
        let mut spec = vec![ZERO; l];
        let mut prod = vec![ZERO; l];
        let mut scratch = vec![ZERO; self.fft.get_inplace_scratch_len().max(self.ifft.get_inplace_scratch_len())];
        let scale = 1.0 / l as f64;
        let mut n = 0;
        while n < nn {
            let pair = (n + 1 < nn) as usize;
            prod.iter_mut().for_each(|v| *v = ZERO);
            for slot in 0..=pair {
                let node = n + slot;
                // A = wξ R₁ and B = wξ Ŷ are Hermitian in j, so FFT(A + iB) = FFT(A) + i FFT(B)
                // with both transforms real.
                spec.iter_mut().for_each(|v| *v = ZERO);
                for j in 0..=k {
                    let a = r1[j * nn + node] * wx[k + j];
                    let b = y[j * nn + node] * wx[k + j];
                    spec[j] = a + Complex64::new(-b.im, b.re);
                    if j > 0 {
                        let (ac, bc) = (a.conj(), b.conj());
                        spec[l - j] = ac + Complex64::new(-bc.im, bc.re);
                    }
                }
                self.fft.process_with_scratch(&mut spec, &mut scratch);
                for (p, s) in prod.iter_mut().zip(&spec) {
                    let v = s.re * s.im;
                    if slot == 0 {
                        p.re += v;
                    } else {
                        p.im += v;
                    }
                }
            }
            self.ifft.process_with_scratch(&mut prod, &mut scratch);
            for eta in 0..ne {
                let w = prod[eta] * scale;
                let wm = prod[(l - eta) % l].conj() * scale;
                z[eta * nn + n] = (w + wm) * 0.5;
                if pair == 1 {
                    let d = (w - wm) * 0.5;
                    z[eta * nn + n + 1] = Complex64::new(d.im, -d.re);
                }
            }
            n += 2;
        }
        let nts = self.time_nodes.len();
        let mut out = vec![ZERO; nts * ne];
        let mut r2 = vec![ZERO; nn];
        for eta in 0..ne {
            let col = &z[eta * nn..(eta + 1) * nn];
            propagate(&self.coef2[eta], |n| col[n], &mut r2);
            for (ti, &node) in self.time_nodes.iter().enumerate() {
                out[ti * ne + eta] = r2[node];
            }
        }
        out
    }
}
