use anderson_chaos::monte_carlo::coupled_ensemble_with_steps;
use serde_json::json;

use super::{coord, Outcome};
use crate::config::Validated;
use crate::output::{num, Report};

pub fn run(v: &Validated) -> Outcome {
    let mut params = v.sequence.clone();
    if let Some(t) = &v.target {
        if !params.contains(t) {
            params.push(t.clone());
        }
    }
    let mut table = Report::new("simulate.csv", &["seed", "theta", "t", "x", "value"]);
    match coupled_ensemble_with_steps(&v.seeds, &params, v.eq, &v.points, v.m, &v.lattice, v.time_steps) {
        Ok(ens) => {
            for (s, seed) in ens.seeds().iter().enumerate() {
                for (th, label) in ens.labels().iter().enumerate() {
                    for (i, pt) in ens.points().iter().enumerate() {
                        table.push(vec![seed.to_string(), label.clone(), num(pt.t), coord(pt), num(ens.solution(s, th, i))]);
                    }
                }
            }
            Outcome { reports: vec![table], summary: json!({ "samples": v.seeds.len() * params.len() * v.points.len() }), failure: None }
        }
        Err(e) => Outcome { reports: vec![table], summary: json!({}), failure: Some(e.to_string()) },
    }
}
