//! Randomized quasi-Monte Carlo over the time coordinates combined with exact radial
//! sampling of the frequencies (heat equation, any order and dimension).

use super::integrand::{chain_order, heat_chain_form, heat_scaling_exponent, pair_factor, pair_point, FreqWeight, MAX_ORDER};
use crate::closed_forms::sphere_area;
use crate::error::{ChaosError, Result};
use crate::model_params::TemporalKernel;
use crate::special::{gamma, ln_gamma};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

const PRIMES: [f64; 18] = [2., 3., 5., 7., 11., 13., 17., 19., 23., 29., 31., 37., 41., 43., 47., 53., 59., 61.];

#[derive(Debug, Clone, Copy)]
pub(crate) struct McOutput {
    pub value: f64,
    pub std_error: f64,
    /// Same-ordering restriction, an upper bound for gap quantities.
    pub unsymmetrized: f64,
}

pub(crate) struct McPlan<'a> {
    pub temporal: &'a TemporalKernel,
    pub t: f64,
    pub k: usize,
    pub weight: FreqWeight,
    pub samples: usize,
    pub replicates: usize,
    pub seed: u64,
}

pub(crate) fn estimate(plan: &McPlan) -> Result<McOutput> {
    let k = plan.k;
    if k == 0 || k > MAX_ORDER {
        return Err(ChaosError::OrderTooLarge { k, limit: MAX_ORDER });
    }
    if plan.replicates < 2 || plan.samples == 0 {
        return Err(ChaosError::Domain("need at least two replicates and one sample".into()));
    }
    let d = plan.weight.dim();
    let pbar = plan.weight.base_power();
    let ebar = heat_scaling_exponent(d, pbar);
    let e0 = plan.temporal.singular_exponent();
    let cu = 2.0 + e0 + ebar;
    let cw = 1.0 + e0;
    if !(cu > 0.0 && cw > 0.0) {
        return Err(ChaosError::Inadmissible(format!("time weights u^{} w^{} are not integrable", cu - 1.0, cw - 1.0)));
    }
    let shape = (d as f64 + pbar) / 2.0;
    let radial = Gamma::new(shape, 1.0).map_err(|e| ChaosError::Domain(e.to_string()))?;
    let s_total = k as f64 * shape;
    let outer_radial = Gamma::new(s_total, 1.0).map_err(|e| ChaosError::Domain(e.to_string()))?;
    // ∫_{R^d} |z|^p e^{−|z|²} dz
    let z_norm = 0.5 * sphere_area(d) * gamma(shape);
    let kfact = ln_gamma(k as f64 + 1.0).exp().round();
    let pair_const = 2.0 / (cu * cw);
    let gens: Vec<f64> = PRIMES[..3 * k].iter().map(|p| p.sqrt().fract()).collect();

    let reps: Vec<(f64, f64)> = (0..plan.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(r as u64 + 1);
            let shift: Vec<f64> = (0..3 * k).map(|_| rng.random::<f64>()).collect();
            let mut x = vec![0.0; 3 * k];
            let mut omega = vec![0.0; k * d];
            let mut a = [0.0f64; MAX_ORDER];
            let mut b = [0.0f64; MAX_ORDER];
            let mut oa = [0usize; MAX_ORDER];
            let mut ob = [0usize; MAX_ORDER];
            let (mut sum, mut sum_same) = (0.0, 0.0);
            for i in 0..plan.samples {
                for m in 0..3 * k {
                    x[m] = ((i as f64 + 1.0) * gens[m] + shift[m]).fract();
                }
                let mut wt = 1.0;
                for j in 0..k {
                    let u = x[3 * j + 1].powf(1.0 / cu);
                    let w = x[3 * j + 2].powf(1.0 / cw);
                    let (aj, bj) = pair_point(plan.t, u, w, x[3 * j] < 0.5);
                    a[j] = aj;
                    b[j] = bj;
                    wt *= pair_const * pair_factor(plan.temporal, plan.t, u, w, ebar);
                }
                let mut norm2 = 0.0;
                for j in 0..k {
                    let g: f64 = radial.sample(&mut rng);
                    let r = g.sqrt();
                    if d == 1 {
                        omega[j] = if rng.random::<bool>() { r } else { -r };
                    } else {
                        let block = &mut omega[j * d..(j + 1) * d];
                        let mut n2 = 0.0;
                        for v in block.iter_mut() {
                            *v = StandardNormal.sample(&mut rng);
                            n2 += *v * *v;
                        }
                        let scale = r / n2.sqrt();
                        block.iter_mut().for_each(|v| *v *= scale);
                    }
                    norm2 += g;
                }
                chain_order(&a[..k], &mut oa[..k]);
                chain_order(&b[..k], &mut ob[..k]);
                // q at the unit vector ω/|ω|
                let q = (heat_chain_form(&a[..k], &oa[..k], &omega, d) + heat_chain_form(&b[..k], &ob[..k], &omega, d))
                    / norm2;
                let value = match plan.weight {
                    FreqWeight::Single(s) => wt * (s.coef * z_norm).powi(k as i32) * q.powf(-s_total),
                    FreqWeight::Gap(s1, s2) => {
                        let big_g: f64 = outer_radial.sample(&mut rng);
                        // ln|ξ_j| = ½ln(G/q) + ln|ω_j| − ½ln|ω|²
                        let base = 0.5 * (big_g / q).ln() - 0.5 * norm2.ln();
                        let mut log_sum = 0.0;
                        for j in 0..k {
                            let n2: f64 = omega[j * d..(j + 1) * d].iter().map(|v| v * v).sum();
                            log_sum += base + 0.5 * n2.ln();
                        }
                        let kf = k as f64;
                        let t1 = (0.5 * kf * s1.coef.ln() + 0.5 * (s1.power - pbar) * log_sum).exp();
                        let t2 = (0.5 * kf * s2.coef.ln() + 0.5 * (s2.power - pbar) * log_sum).exp();
                        wt * z_norm.powi(k as i32) * q.powf(-s_total) * (t1 - t2) * (t1 - t2)
                    }
                };
                if value.is_finite() {
                    sum += value / kfact;
                    if oa[..k] == ob[..k] {
                        sum_same += value;
                    }
                }
            }
            (sum / plan.samples as f64, sum_same / plan.samples as f64)
        })
        .collect();
    let rn = reps.len() as f64;
    let mean = reps.iter().map(|r| r.0).sum::<f64>() / rn;
    let var = reps.iter().map(|r| (r.0 - mean).powi(2)).sum::<f64>() / (rn - 1.0);
    let unsym = reps.iter().map(|r| r.1).sum::<f64>() / rn;
    Ok(McOutput { value: mean, std_error: (var / rn).sqrt(), unsymmetrized: unsym })
}
