//! Pieces shared by both backends: the frequency weight of the second moment and the
//! per-pair change of variables around the corner (t, t).

use crate::model_params::{SpatialDensity, TemporalKernel};

pub(crate) const MAX_ORDER: usize = 6;

/// Spatial weight of the quantity being integrated.
#[derive(Debug, Clone, Copy)]
pub(crate) enum FreqWeight {
    /// ∏ density(ξ_j): second moments and cross-moments.
    Single(SpatialDensity),
    /// (∏√density₁(ξ_j) − ∏√density₂(ξ_j))²: the continuity gap.
    Gap(SpatialDensity, SpatialDensity),
}

impl FreqWeight {
    /// Power used for importance sampling and for the time grading.
    pub(crate) fn base_power(&self) -> f64 {
        match self {
            FreqWeight::Single(s) => s.power,
            FreqWeight::Gap(a, b) => 0.5 * (a.power + b.power),
        }
    }

    pub(crate) fn dim(&self) -> usize {
        match self {
            FreqWeight::Single(s) | FreqWeight::Gap(s, _) => s.dim,
        }
    }

    /// Expansion into signed product densities.
    pub(crate) fn terms(&self) -> Vec<(f64, SpatialDensity)> {
        match self {
            FreqWeight::Single(s) => vec![(1.0, *s)],
            FreqWeight::Gap(a, b) => {
                let m = a.mixed(b).expect("gap densities share a dimension");
                vec![(1.0, *a), (1.0, *b), (-2.0, m)]
            }
        }
    }
}

/// Exponent e with the k = 1 heat frequency integral scaling like (time)^e.
pub(crate) fn heat_scaling_exponent(d: usize, p: f64) -> f64 {
    -(d as f64 + p) / 2.0
}

/// Pair (t − t_j, t − s_j) at Duffy coordinates; `flip` selects the triangle a > b.
#[inline]
pub(crate) fn pair_point(t: f64, u: f64, w: f64, flip: bool) -> (f64, f64) {
    let far = t * u;
    let near = far * (1.0 - w);
    if flip {
        (far, near)
    } else {
        (near, far)
    }
}

/// Temporal factor per pair left over after the weights u^{1+e₀+ē} w^{e₀}.
#[inline]
pub(crate) fn pair_factor(temporal: &TemporalKernel, t: f64, u: f64, w: f64, ebar: f64) -> f64 {
    let e0 = temporal.singular_exponent();
    t.powf(2.0 + e0) * temporal.regular_part(t * u * w) * u.powf(-ebar)
}

/// Indices sorted by increasing time, i.e. decreasing distance to the horizon.
#[inline]
pub(crate) fn chain_order(dist: &[f64], order: &mut [usize]) {
    let k = dist.len();
    for (i, o) in order.iter_mut().enumerate().take(k) {
        *o = i;
    }
    for i in 1..k {
        let mut j = i;
        while j > 0 && dist[order[j - 1]] < dist[order[j]] {
            order.swap(j - 1, j);
            j -= 1;
        }
    }
}

/// ½ Σ_i gap_i |ω_{ρ(1)} + … + ω_{ρ(i)}|² along one chain; ω stored as k blocks of d.
#[inline]
pub(crate) fn heat_chain_form(dist: &[f64], order: &[usize], omega: &[f64], d: usize) -> f64 {
    let k = dist.len();
    let mut prefix = [0.0f64; 3];
    let mut big;
    let prefix: &mut [f64] = if d <= 3 {
        &mut prefix[..d]
    } else {
        big = vec![0.0; d];
        &mut big[..]
    };
    let mut total = 0.0;
    for i in 0..k {
        let j = order[i];
        for (acc, v) in prefix.iter_mut().zip(&omega[j * d..(j + 1) * d]) {
            *acc += v;
        }
        let next = if i + 1 < k { dist[order[i + 1]] } else { 0.0 };
        let gap = dist[j] - next;
        total += gap * prefix.iter().map(|v| v * v).sum::<f64>();
    }
    0.5 * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_form_matches_hand_evaluation() {
        // times 0.2 < 0.5 < horizon 1: distances 0.8, 0.5
        let dist = [0.5, 0.8];
        let mut order = [0usize; 2];
        chain_order(&dist, &mut order);
        assert_eq!(order, [1, 0]);
        let omega = [1.0, 2.0];
        // gaps 0.3 on ω₂, then 0.5 on ω₁+ω₂
        let q = heat_chain_form(&dist, &order, &omega, 1);
        assert!((q - 0.5 * (0.3 * 4.0 + 0.5 * 9.0)).abs() < 1e-15);
    }
}
