use anderson_chaos::chaos_quadrature::continuity_gap;
use serde_json::json;

use super::{coord, method_name, Outcome};
use crate::config::Validated;
use crate::output::{num, opt, Report};

pub fn run(v: &Validated) -> Outcome {
    let target = v.target.as_ref().expect("validated");
    let mut table = Report::new(
        "gap.csv",
        &["n", "theta", "target", "k", "t", "x", "q", "error", "method", "clipped", "unsymmetrized_bound"],
    );
    let mut summary = Report::new("gap_summary.csv", &["k", "t", "x", "final_q", "verdict"]);
    let mut verdicts = Vec::new();
    let mut failure = None;
    'outer: for &k in &v.orders {
        for pt in &v.points {
            let mut qs = Vec::new();
            for (n, p) in v.sequence.iter().enumerate() {
                match continuity_gap(p, target, v.eq, pt.t, &pt.x, k, &v.quadrature) {
                    Ok(g) => {
                        qs.push(g.moment.value);
                        table.push(vec![
                            (n + 1).to_string(),
                            p.label(),
                            target.label(),
                            k.to_string(),
                            num(pt.t),
                            coord(pt),
                            num(g.moment.value),
                            num(g.moment.error_estimate),
                            method_name(g.moment.method).into(),
                            g.clipped.to_string(),
                            opt(g.unsymmetrized_bound),
                        ]);
                    }
                    Err(e) => {
                        failure = Some(format!("n={}, k={k}, t={}: {e}", n + 1, pt.t));
                        break 'outer;
                    }
                }
            }
            let tail = &qs[qs.len().saturating_sub(3)..];
            let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
            let last = *qs.last().unwrap_or(&f64::NAN);
            let verdict = if decreasing && last < v.gap_tol { "CONVERGENT" } else { "NOT-CONVERGENT" };
            verdicts.push(json!({ "k": k, "t": pt.t, "x": pt.x, "verdict": verdict }));
            summary.push(vec![k.to_string(), num(pt.t), coord(pt), num(last), verdict.into()]);
        }
    }
    Outcome { reports: vec![table, summary], summary: json!({ "verdicts": verdicts }), failure }
}
