//! One-dimensional quadrature building blocks: Gauss rules from three-term
//! recurrences, adaptive Gauss–Kronrod, and tanh-sinh for endpoint singularities.

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights of a fixed rule; weights already include the rule's weight function.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Affine image of a rule on [0, 1] onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let h = b - a;
        Rule {
            nodes: self.nodes.iter().map(|&x| a + h * x).collect(),
            weights: self.weights.iter().map(|&w| w * h).collect(),
        }
    }
}

/// Golub–Welsch: monic recurrence diagonal `a`, squared off-diagonal `b` (len n−1), total mass `mu0`.
fn golub_welsch(a: &[f64], b: &[f64], mu0: f64) -> Rule {
    let n = a.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = a[i];
        if i + 1 < n {
            let s = b[i].sqrt();
            j[(i, i + 1)] = s;
            j[(i + 1, i)] = s;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss rule for ∫_0^1 x^p f(x) dx, p > −1.
pub fn gauss_jacobi01(n: usize, p: f64) -> Rule {
    assert!(n >= 1 && p > -1.0, "gauss_jacobi01 needs n >= 1 and p > -1");
    // Jacobi (α=0, β=p) on [−1, 1] mapped through x = (1+y)/2.
    let beta = p;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + beta;
        let ak = if k == 0 { beta / (beta + 2.0) } else { beta * beta / (s * (s + 2.0)) };
        a.push((1.0 + ak) / 2.0);
        if k >= 1 {
            let bk = if k == 1 {
                4.0 * (1.0 + beta) / ((2.0 + beta).powi(2) * (3.0 + beta))
            } else {
                4.0 * kf * kf * (kf + beta) * (kf + beta) / (s * s * (s + 1.0) * (s - 1.0))
            };
            b.push(bk / 4.0);
        }
    }
    golub_welsch(&a, &b, 1.0 / (p + 1.0))
}

/// Gauss–Legendre on [0, 1].
pub fn gauss_legendre01(n: usize) -> Rule {
    gauss_jacobi01(n, 0.0)
}

/// Gauss rule for ∫_R |z|^p e^{−z²} f(z) dz, p > −1.
pub fn gauss_gen_hermite(n: usize, p: f64) -> Rule {
    assert!(n >= 1 && p > -1.0, "gauss_gen_hermite needs n >= 1 and p > -1");
    let a = vec![0.0; n];
    let b: Vec<f64> = (1..n)
        .map(|k| if k % 2 == 0 { k as f64 / 2.0 } else { (k as f64 + p) / 2.0 })
        .collect();
    golub_welsch(&a, &b, crate::special::gamma((p + 1.0) / 2.0))
}

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = GK_WK[7] * fc;
    let mut g = GK_WG[3] * fc;
    for i in 0..7 {
        let dx = h * GK_X[i];
        let s = f(c - dx) + f(c + dx);
        k += GK_WK[i] * s;
        if i % 2 == 1 {
            g += GK_WG[i / 2] * s;
        }
    }
    Estimate { value: k * h, error: ((k - g) * h).abs() }
}

/// Globally adaptive Gauss–Kronrod (7/15) on a finite interval.
pub fn adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Estimate {
    adaptive_with_limit(&mut f, a, b, abs_tol, rel_tol, 2000)
}

pub fn adaptive_with_limit(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Estimate {
    if a == b {
        return Estimate { value: 0.0, error: 0.0 };
    }
    let mut parts = vec![(a, b, gk15(f, a, b))];
    loop {
        let value: f64 = parts.iter().map(|p| p.2.value).sum();
        let error: f64 = parts.iter().map(|p| p.2.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) || parts.len() >= max_intervals {
            return Estimate { value, error };
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .expect("non-empty");
        let (lo, hi, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Estimate { value, error };
        }
        parts.push((lo, mid, gk15(f, lo, mid)));
        parts.push((mid, hi, gk15(f, mid, hi)));
    }
}

/// Double-exponential quadrature on a finite interval; tolerates integrable endpoint singularities.
pub fn tanh_sinh(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Estimate {
    use std::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    // Node at parameter s: distance to the nearer endpoint in units of `half`.
    let mut term = |s: f64| -> f64 {
        let u = FRAC_PI_2 * s.sinh();
        let ch = u.cosh();
        let w = FRAC_PI_2 * s.cosh() / (ch * ch);
        let delta = 1.0 / (u.abs().exp() * ch);
        if delta == 0.0 || w == 0.0 {
            return 0.0;
        }
        let x = if s < 0.0 { a + half * delta } else { b - half * delta };
        if x <= a || x >= b {
            return 0.0;
        }
        let v = f(x) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let tmax = 4.5;
    let mut h = 0.5;
    let mut sum = term(0.0);
    let mut k = 1;
    while (k as f64) * h <= tmax {
        let s = k as f64 * h;
        sum += term(s) + term(-s);
        k += 1;
    }
    let mut prev = sum * h * half;
    for _level in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            let s = k as f64 * h;
            sum += term(s) + term(-s);
            k += 2;
        }
        let cur = sum * h * half;
        let err = (cur - prev).abs();
        if err <= rel_tol * cur.abs() {
            return Estimate { value: cur, error: err };
        }
        prev = cur;
    }
    Estimate { value: prev, error: (prev.abs() * rel_tol).max(f64::EPSILON) }
}
