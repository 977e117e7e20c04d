use super::EnsembleTable;
use crate::error::{domain, ChaosError, Result};

/// Transect direction of an ensemble's points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Time,
    Space,
}

/// Moment estimate of |u(·+lag) − u(·)|^p over all overlapping pairs of a transect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementStat {
    pub lag: f64,
    pub p: f64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Mean of per-seed values with its delete-one jackknife standard error.
pub fn jackknife_mean(values: &[f64]) -> Result<(f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(ChaosError::Empty("jackknife needs at least two samples".into()));
    }
    let total: f64 = values.iter().sum();
    let mean = total / n as f64;
    let nf = n as f64;
    let var: f64 = values
        .iter()
        .map(|v| {
            let loo = (total - v) / (nf - 1.0);
            (loo - mean) * (loo - mean)
        })
        .sum::<f64>()
        * (nf - 1.0)
        / nf;
    Ok((mean, var.sqrt()))
}

/// Spacing of a regular transect, or an error naming the first irregularity.
fn transect_step(table: &EnsembleTable, direction: Direction) -> Result<f64> {
    let pts = table.points();
    if pts.len() < 2 {
        return domain("a transect needs at least two points");
    }
    let tol = 1e-9;
    let step = match direction {
        Direction::Time => pts[1].t - pts[0].t,
        Direction::Space => pts[1].x[0] - pts[0].x[0],
    };
    if !(step > 0.0) {
        return domain("transect points must increase along the direction");
    }
    for w in pts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let ok = match direction {
            Direction::Time => ((b.t - a.t) - step).abs() <= tol * step.max(1.0) && a.x == b.x,
            Direction::Space => {
                a.t == b.t
                    && ((b.x[0] - a.x[0]) - step).abs() <= tol * step.max(1.0)
                    && a.x[1..] == b.x[1..]
            }
        };
        if !ok {
            return domain("points do not form a regular transect in the requested direction");
        }
    }
    Ok(step)
}

/// E|u(z + lag) − u(z)|^p for every lag of the transect, per weight index `theta`.
pub fn increment_moments(table: &EnsembleTable, theta: usize, direction: Direction, p: f64) -> Result<Vec<IncrementStat>> {
    if !(p >= 2.0 && p.is_finite()) {
        return domain("moment order must be at least 2");
    }
    if theta >= table.thetas().len() {
        return domain("weight index out of range");
    }
    let step = transect_step(table, direction)?;
    let np = table.points().len();
    (1..np)
        .map(|lag| {
            let per_seed: Vec<f64> = (0..table.seeds().len())
                .map(|s| {
                    (0..np - lag)
                        .map(|i| (table.solution(s, theta, i + lag) - table.solution(s, theta, i)).abs().powf(p))
                        .sum::<f64>()
                        / (np - lag) as f64
                })
                .collect();
            let (estimate, std_error) = jackknife_mean(&per_seed)?;
            Ok(IncrementStat { lag: lag as f64 * step, p, estimate, std_error })
        })
        .collect()
}

/// Mean and standard error of |I_k(θ_a) − I_k(θ_b)|² at one point over the seeds.
pub fn chaos_gap(table: &EnsembleTable, k: usize, theta_a: usize, theta_b: usize, point: usize) -> Result<(f64, f64)> {
    if k == 0 || k > table.max_order() {
        return domain("chaos order not present in the table");
    }
    let per_seed: Vec<f64> = (0..table.seeds().len())
        .map(|s| {
            let d = table.chaos(s, theta_a, point, k) - table.chaos(s, theta_b, point, k);
            d * d
        })
        .collect();
    jackknife_mean(&per_seed)
}

/// Two-sample Kolmogorov–Smirnov statistic: sup distance between the empirical CDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(ChaosError::Empty("both samples must be non-empty".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return domain("samples contain NaN");
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.partial_cmp(q).unwrap());
    y.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jackknife_of_mean_is_standard_error() {
        let v = [1.0, 2.0, 4.0, 7.0];
        let (m, se) = jackknife_mean(&v).unwrap();
        let mean = 3.5;
        let s2 = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 3.0;
        assert!((m - mean).abs() < 1e-15);
        assert!((se - (s2 / 4.0).sqrt()).abs() < 1e-14);
        assert!(jackknife_mean(&[1.0]).is_err());
    }

    #[test]
    fn ks_statistic_examples() {
        let a: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        let x: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let y: Vec<f64> = (50..150).map(|i| i as f64).collect();
        assert_eq!(ks_two_sample(&x, &y).unwrap(), 0.5);
        let far: Vec<f64> = a.iter().map(|v| v + 10.0).collect();
        assert_eq!(ks_two_sample(&a, &far).unwrap(), 1.0);
        assert!(ks_two_sample(&[], &a).is_err());
        assert!(ks_two_sample(&a, &[f64::NAN]).is_err());
    }
}
