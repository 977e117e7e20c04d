//! Exponential product integration of s ↦ ∫_0^s FG_{s−r}(ξ) Y(r) dr on a time grid, with Y
//! linear between nodes. The state (c, s) holds the cosine and sine/|ξ| convolutions for the wave
//! kernel; the heat kernel only uses s.

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::model_params::EquationKind;

/// Grid nodes starting at 0, containing every target time.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TimeGrid {
    pub nodes: Vec<f64>,
    /// Node index of each target time, in the order given.
    pub target_nodes: Vec<usize>,
}

impl TimeGrid {
    /// Uniform grid of `steps` intervals on [0, max target], merged with the targets.
    pub fn new(targets: &[f64], steps: usize) -> Result<Self> {
        if targets.is_empty() {
            return domain("no target times");
        }
        if targets.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return domain("target times must be positive and finite");
        }
        if steps == 0 {
            return domain("time grid needs at least one step");
        }
        let t_max = targets.iter().cloned().fold(0.0, f64::max);
        let h = t_max / steps as f64;
        let snap = 1e-9 * h;
        let mut nodes: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
        nodes[steps] = t_max;
        for &t in targets {
            match nodes.iter().position(|&n| (n - t).abs() <= snap) {
                Some(i) => nodes[i] = t,
                None => nodes.push(t),
            }
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let target_nodes = targets.iter().map(|t| nodes.iter().position(|n| n == t).unwrap()).collect();
        Ok(TimeGrid { nodes, target_nodes })
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn step(&self, n: usize) -> f64 {
        self.nodes[n + 1] - self.nodes[n]
    }
}

/// One step of the linear recursion (c, s) ↦ (c', s') driven by node inputs y_old, y_new.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct StepCoef {
    cc: f64,
    cs: f64,
    sc: f64,
    ss: f64,
    c_new: f64,
    c_old: f64,
    s_new: f64,
    s_old: f64,
}

impl StepCoef {
    pub fn new(eq: EquationKind, b: f64, h: f64) -> Self {
        match eq {
            EquationKind::Heat => {
                let z = 0.5 * b * b * h;
                let em1 = (-z).exp_m1();
                let phi1 = if z < 1e-8 { 1.0 - 0.5 * z } else { -em1 / z };
                let phi2 = if z < 1e-4 { 0.5 - z / 6.0 + z * z / 24.0 } else { (z + em1) / (z * z) };
                StepCoef { ss: (-z).exp(), s_new: h * phi2, s_old: h * (phi1 - phi2), ..Default::default() }
            }
            EquationKind::Wave => {
                let th = b * h;
                let (sn, cs) = th.sin_cos();
                // ∫_0^h cos(bv)dv, ∫ v cos(bv)dv, ∫ sin(bv)/b dv, ∫ v sin(bv)/b dv
                let (i0c, i1c, i0s, i1s, sinc) = if th < 1e-2 {
                    let t2 = th * th;
                    (
                        h * (1.0 - t2 / 6.0 + t2 * t2 / 120.0),
                        h * h * (0.5 - t2 / 8.0 + t2 * t2 / 144.0),
                        h * h * (0.5 - t2 / 24.0 + t2 * t2 / 720.0),
                        h * h * h * (1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0),
                        h * (1.0 - t2 / 6.0 + t2 * t2 / 120.0),
                    )
                } else {
                    let b2 = b * b;
                    (sn / b, h * sn / b + (cs - 1.0) / b2, (1.0 - cs) / b2, sn / (b2 * b) - h * cs / b2, sn / b)
                };
                StepCoef {
                    cc: cs,
                    cs: -b * sn,
                    sc: sinc,
                    ss: cs,
                    c_new: i0c - i1c / h,
                    c_old: i1c / h,
                    s_new: i0s - i1s / h,
                    s_old: i1s / h,
                }
            }
        }
    }

    #[inline]
    pub fn apply(&self, c: Complex64, s: Complex64, y_old: Complex64, y_new: Complex64) -> (Complex64, Complex64) {
        (
            c * self.cc + s * self.cs + y_new * self.c_new + y_old * self.c_old,
            c * self.sc + s * self.ss + y_new * self.s_new + y_old * self.s_old,
        )
    }
}

/// Coefficients for every step of `grid` at frequency magnitude `b`.
pub(crate) fn step_table(eq: EquationKind, grid: &TimeGrid, b: f64) -> Vec<StepCoef> {
    (0..grid.steps()).map(|n| StepCoef::new(eq, b, grid.step(n))).collect()
}

/// Runs the recursion; `out[n]` is the convolution at node n, given inputs at every node.
#[inline]
pub(crate) fn propagate(coefs: &[StepCoef], input: impl Fn(usize) -> Complex64, out: &mut [Complex64]) {
    let zero = Complex64::new(0.0, 0.0);
    let (mut c, mut s) = (zero, zero);
    out[0] = zero;
    let mut y_old = input(0);
    for (n, coef) in coefs.iter().enumerate() {
        let y_new = input(n + 1);
        (c, s) = coef.apply(c, s, y_old, y_new);
        out[n + 1] = s;
        y_old = y_new;
    }
}
