use anderson_chaos::chaos_quadrature::continuity_gap;
use anderson_chaos::monte_carlo::{coupled_ensemble_with_steps, jackknife_mean, ks_two_sample};
use serde_json::json;

use super::{coord, Outcome};
use crate::config::Validated;
use crate::output::{num, Report};

pub fn run(v: &Validated) -> Outcome {
    let target = v.target.clone().expect("validated");
    let mut params = vec![target.clone()];
    params.extend(v.sequence.iter().cloned());
    let mut table = Report::new(
        "converge.csv",
        &["n", "theta", "target", "t", "x", "m", "l2_gap", "l2_gap_se", "ks", "sample_size", "quad_gap", "quad_gap_error"],
    );
    let ens = match coupled_ensemble_with_steps(&v.seeds, &params, v.eq, &v.points, v.m, &v.lattice, v.time_steps) {
        Ok(e) => e,
        Err(e) => return Outcome { reports: vec![table], summary: json!({}), failure: Some(e.to_string()) },
    };
    let ns = v.seeds.len();
    let mut failure = None;
    let mut reports = Vec::new();
    'outer: for (i, pt) in v.points.iter().enumerate() {
        let base: Vec<f64> = (0..ns).map(|s| ens.solution(s, 0, i)).collect();
        let mut gaps = Vec::new();
        let mut kss = Vec::new();
        for n in 1..params.len() {
            let other: Vec<f64> = (0..ns).map(|s| ens.solution(s, n, i)).collect();
            let sq: Vec<f64> = base.iter().zip(&other).map(|(a, b)| (a - b) * (a - b)).collect();
            let (gap, se) = if ns >= 2 { jackknife_mean(&sq).unwrap() } else { (sq[0], f64::NAN) };
            let ks = ks_two_sample(&other, &base).unwrap();
            let (mut qg, mut qe) = (f64::NAN, f64::NAN);
            if v.compare_quadrature {
                qg = 0.0;
                qe = 0.0;
                for k in 1..=v.m {
                    match continuity_gap(&params[n], &target, v.eq, pt.t, &pt.x, k, &v.quadrature) {
                        Ok(g) => {
                            qg += g.moment.value;
                            qe += g.moment.error_estimate;
                        }
                        Err(e) => {
                            failure = Some(format!("quadrature gap n={n}, k={k}: {e}"));
                            break 'outer;
                        }
                    }
                }
            }
            gaps.push(gap);
            kss.push(ks);
            table.push(vec![
                n.to_string(),
                params[n].label(),
                target.label(),
                num(pt.t),
                coord(pt),
                v.m.to_string(),
                num(gap),
                num(se),
                num(ks),
                ns.to_string(),
                num(qg),
                num(qe),
            ]);
        }
        reports.push(json!({ "t": pt.t, "x": pt.x, "l2_gap": gaps, "ks": kss }));
    }
    Outcome { reports: vec![table], summary: json!({ "points": reports }), failure }
}
