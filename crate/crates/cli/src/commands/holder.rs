use anderson_chaos::kernels::SpaceTimePoint;
use anderson_chaos::monte_carlo::{coupled_ensemble_with_steps, increment_moments, Direction};
use serde_json::json;

use super::Outcome;
use crate::config::{theory_slope, RunConfig, TransectDirection, Validated};
use crate::output::{num, Report};

/// Least-squares slope of ln y on ln x; None when any y is not positive.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || ys.iter().any(|&y| !(y > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Some(sxy / sxx)
}

pub fn run(cfg: &RunConfig, v: &Validated) -> Outcome {
    let h = v.holder.as_ref().expect("validated");
    let points: Vec<SpaceTimePoint> = (0..h.count)
        .map(|i| {
            let s = h.start + i as f64 * h.step;
            match h.direction {
                TransectDirection::Time => SpaceTimePoint { t: s, x: vec![h.fixed_x] },
                TransectDirection::Space => SpaceTimePoint { t: h.fixed_t, x: vec![s] },
            }
        })
        .collect();
    let lags: Vec<usize> = h.lags.clone().unwrap_or_else(|| (0..).map(|j| 1usize << j).take_while(|&l| l < h.count).collect());
    let theory = theory_slope(v.eq, cfg.noise.regime, h.direction, h.p, h.exponent);
    let mut moments = Report::new("holder.csv", &["theta", "direction", "lag", "p", "estimate", "std_error"]);
    let mut slopes = Report::new("holder_slopes.csv", &["theta", "slope", "theory", "tolerance", "verdict"]);
    let dir_name = match h.direction {
        TransectDirection::Time => "time",
        TransectDirection::Space => "space",
    };
    let ens = match coupled_ensemble_with_steps(&v.seeds, &v.sequence, v.eq, &points, v.m, &v.lattice, v.time_steps) {
        Ok(e) => e,
        Err(e) => return Outcome { reports: vec![moments, slopes], summary: json!({}), failure: Some(e.to_string()) },
    };
    let direction = match h.direction {
        TransectDirection::Time => Direction::Time,
        TransectDirection::Space => Direction::Space,
    };
    let mut per_theta = Vec::new();
    let mut sup_curve = vec![0.0f64; lags.len()];
    for (ti, p) in v.sequence.iter().enumerate() {
        let stats = match increment_moments(&ens, ti, direction, h.p) {
            Ok(s) => s,
            Err(e) => return Outcome { reports: vec![moments, slopes], summary: json!({}), failure: Some(e.to_string()) },
        };
        for s in &stats {
            moments.push(vec![p.label(), dir_name.into(), num(s.lag), num(s.p), num(s.estimate), num(s.std_error)]);
        }
        let xs: Vec<f64> = lags.iter().map(|&l| stats[l - 1].lag).collect();
        let ys: Vec<f64> = lags.iter().map(|&l| stats[l - 1].estimate).collect();
        for (sup, y) in sup_curve.iter_mut().zip(&ys) {
            *sup = sup.max(*y);
        }
        let slope = log_log_slope(&xs, &ys);
        let verdict = match slope {
            Some(s) if s >= theory - h.tolerance => "PASS",
            Some(_) => "FAIL",
            None => "NA",
        };
        slopes.push(vec![p.label(), slope.map(num).unwrap_or_else(|| "NA".into()), num(theory), num(h.tolerance), verdict.into()]);
        per_theta.push(slope);
    }
    let xs: Vec<f64> = lags.iter().map(|&l| l as f64 * h.step).collect();
    let sup_slope = log_log_slope(&xs, &sup_curve);
    let min_slope = if per_theta.iter().all(|s| s.is_some()) {
        per_theta.iter().map(|s| s.unwrap()).reduce(f64::min)
    } else {
        None
    };
    let verdict = match min_slope {
        Some(s) if s >= theory - h.tolerance => "PASS",
        Some(_) => "FAIL",
        None => "NA",
    };
    slopes.push(vec!["min".into(), min_slope.map(num).unwrap_or_else(|| "NA".into()), num(theory), num(h.tolerance), verdict.into()]);
    slopes.push(vec![
        "sup-moment".into(),
        sup_slope.map(num).unwrap_or_else(|| "NA".into()),
        num(theory),
        num(h.tolerance),
        match sup_slope {
            Some(s) if s >= theory - h.tolerance => "PASS",
            Some(_) => "FAIL",
            None => "NA",
        }
        .into(),
    ]);
    Outcome {
        reports: vec![moments, slopes],
        summary: json!({ "min_slope": min_slope, "sup_moment_slope": sup_slope, "theory": theory, "verdict": verdict }),
        failure: None,
    }
}
