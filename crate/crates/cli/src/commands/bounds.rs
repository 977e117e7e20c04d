use anderson_chaos::closed_forms::{chaos_tail_bound, dalang_constant, gamma0_window, heat_k_alpha, rough_constants, tail_threshold};
use anderson_chaos::model_params::{lower_endpoint_ell, validate_existence, NoiseParam, Regime};
use serde_json::json;

use super::Outcome;
use crate::config::{RunConfig, Validated};
use crate::output::{num, Report};

fn params(v: &Validated) -> Vec<NoiseParam> {
    let mut out: Vec<NoiseParam> = Vec::new();
    for p in v.sequence.iter().chain(v.target.iter()) {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out
}

pub fn run(cfg: &RunConfig, v: &Validated) -> Outcome {
    let t = v.bounds.t;
    let mut table = Report::new(
        "bounds.csv",
        &[
            "theta", "equation", "d", "admissible", "condition", "margin", "k_value", "k_bound", "r", "k_alpha_t",
            "c_h1", "c_h2", "ell",
        ],
    );
    let mut tails = Report::new("bounds_tail.csv", &["a", "b", "t", "m", "tail", "valid_from_m"]);
    let mut failure = None;
    let mut all_below = true;
    let ps = params(v);
    for p in &ps {
        let ex = validate_existence(p, v.eq);
        let mut row = vec![
            p.label(),
            v.eq.to_string(),
            p.dim().to_string(),
            ex.admissible.to_string(),
            ex.condition_checked.clone(),
            num(ex.margin),
        ];
        let res = match p.regime {
            Regime::Regular { alpha, dim } => dalang_constant(dim, alpha).and_then(|k| {
                all_below &= k.value <= k.bound;
                Ok(vec![num(k.value), num(k.bound), num(k.r(v.eq)), num(heat_k_alpha(t, dim, alpha)?), "NA".into(), "NA".into(), "NA".into()])
            }),
            Regime::Rough { h } => {
                let h0 = p.temporal.h0().unwrap_or(f64::NAN);
                rough_constants(v.eq, h, h0).and_then(|(c1, c2)| {
                    Ok(vec!["NA".into(), "NA".into(), "NA".into(), "NA".into(), num(c1), num(c2), num(lower_endpoint_ell(v.eq, h0)?)])
                })
            }
        };
        match res {
            Ok(cols) => {
                row.extend(cols);
                table.push(row);
            }
            Err(e) => {
                failure = Some(format!("{}: {e}", p.label()));
                break;
            }
        }
    }

    // tail bound uniform over the θ range of the grid, regular noise only
    let regular: Vec<f64> = ps.iter().filter_map(|p| matches!(p.regime, Regime::Regular { .. }).then(|| p.theta())).collect();
    let mut tail_monotone = true;
    if failure.is_none() && regular.len() >= 2 {
        let a = regular.iter().cloned().fold(f64::INFINITY, f64::min);
        let b = regular.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let d = cfg.noise.dim;
        let res = (|| -> anderson_chaos::Result<()> {
            let g = gamma0_window(t, cfg.noise.h0)?;
            let m0 = tail_threshold(v.eq, d, a, b)?;
            let mut prev = f64::INFINITY;
            // the bound holds from m0 on
            for m in m0..=v.bounds.m_max.max(m0) {
                let tail = chaos_tail_bound(v.eq, d, a, b, t, m, g)?;
                tail_monotone &= tail <= prev;
                prev = tail;
                tails.push(vec![num(a), num(b), num(t), m.to_string(), num(tail), m0.to_string()]);
            }
            Ok(())
        })();
        if let Err(e) = res {
            failure = Some(format!("tail bound: {e}"));
        }
    }
    Outcome {
        reports: vec![table, tails],
        summary: json!({ "rows": ps.len(), "value_below_bound": all_below, "tail_monotone": tail_monotone }),
        failure,
    }
}
