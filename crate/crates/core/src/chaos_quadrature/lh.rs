use crate::closed_forms::riesz_time_constants;
use crate::error::{domain, ChaosError, Result};
use crate::quad::{gauss_jacobi01, gauss_legendre01};

/// Nonnegative function on the box [0, side]^k, zero outside.
pub struct LhTestFunction<'a> {
    pub side: f64,
    pub f: &'a (dyn Fn(&[f64]) -> f64 + Sync),
}

const LH_NODES: [usize; 2] = [48, 14];

/// max over the sample of α_{H₀}^k ∬ ∏|t_j − s_j|^{2H₀−2} φ(t)φ(s) / (∫ φ^{1/H₀})^{2H₀}.
pub fn lh_ratio(h0: f64, k: usize, test_functions: &[LhTestFunction]) -> Result<f64> {
    let (alpha_h0, _) = riesz_time_constants(h0)?;
    if !(1..=2).contains(&k) {
        return domain(format!("k = {k} must be 1 or 2"));
    }
    if test_functions.is_empty() {
        return Err(ChaosError::Empty("no test functions".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for tf in test_functions {
        let ratio = alpha_h0.powi(k as i32) * numerator(h0, k, tf)? / denominator(h0, k, tf)?;
        if !ratio.is_finite() {
            return domain("test function is not integrable to the power 1/H0");
        }
        best = best.max(ratio);
    }
    Ok(best)
}

fn eval(tf: &LhTestFunction, x: &[f64]) -> Result<f64> {
    let v = (tf.f)(x);
    if !(v >= 0.0 && v.is_finite()) {
        return domain(format!("test function value {v} at {x:?} is not a finite nonnegative number"));
    }
    Ok(v)
}

/// ∬ ∏|t_j − s_j|^{2H₀−2} φ(t)φ(s) with r_j = |t_j − s_j| on a Jacobi rule.
fn numerator(h0: f64, k: usize, tf: &LhTestFunction) -> Result<f64> {
    let l = tf.side;
    let e = 2.0 * h0 - 2.0;
    let n = LH_NODES[k - 1];
    let rr = gauss_jacobi01(n, e);
    let rs = gauss_legendre01(n);
    let scale = l.powf(e + 1.0);
    let mut total = 0.0;
    if k == 1 {
        for (&x, &wx) in rr.nodes.iter().zip(&rr.weights) {
            let r = l * x;
            let span = l - r;
            let mut inner = 0.0;
            for (&y, &wy) in rs.nodes.iter().zip(&rs.weights) {
                let s = span * y;
                inner += wy * eval(tf, &[s + r])? * eval(tf, &[s])?;
            }
            total += wx * scale * span * inner;
        }
        return Ok(2.0 * total);
    }
    // Orientations (+,+) and (+,−); their mirrors contribute equally.
    for cross in [false, true] {
        for (&x1, &w1) in rr.nodes.iter().zip(&rr.weights) {
            let r1 = l * x1;
            let span1 = l - r1;
            for (&x2, &w2) in rr.nodes.iter().zip(&rr.weights) {
                let r2 = l * x2;
                let span2 = l - r2;
                let mut inner = 0.0;
                for (&y1, &v1) in rs.nodes.iter().zip(&rs.weights) {
                    let s1 = span1 * y1;
                    for (&y2, &v2) in rs.nodes.iter().zip(&rs.weights) {
                        let s2 = span2 * y2;
                        let (t_pt, s_pt) =
                            if cross { ([s1 + r1, s2], [s1, s2 + r2]) } else { ([s1 + r1, s2 + r2], [s1, s2]) };
                        inner += v1 * v2 * eval(tf, &t_pt)? * eval(tf, &s_pt)?;
                    }
                }
                total += w1 * w2 * scale * scale * span1 * span2 * inner;
            }
        }
    }
    Ok(2.0 * total)
}

fn denominator(h0: f64, k: usize, tf: &LhTestFunction) -> Result<f64> {
    let l = tf.side;
    let rule = gauss_legendre01(64);
    let q = 1.0 / h0;
    let mut total = 0.0;
    if k == 1 {
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            total += w * l * eval(tf, &[l * x])?.powf(q);
        }
    } else {
        for (&x, &wx) in rule.nodes.iter().zip(&rule.weights) {
            for (&y, &wy) in rule.nodes.iter().zip(&rule.weights) {
                total += wx * wy * l * l * eval(tf, &[l * x, l * y])?.powf(q);
            }
        }
    }
    Ok(total.powf(2.0 * h0))
}
