mod bounds;
mod converge;
mod gap;
mod holder;
mod simulate;

use anderson_chaos::chaos_quadrature::QuadMethod;
use anderson_chaos::kernels::SpaceTimePoint;

use crate::config::{Command, RunConfig, Validated};
use crate::output::Report;

/// Tables produced by a command, a JSON summary, and the numerical failure that stopped it early.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub reports: Vec<Report>,
    pub summary: serde_json::Value,
    pub failure: Option<String>,
}

pub fn execute(cfg: &RunConfig, v: &Validated) -> Outcome {
    match v.command {
        Command::Bounds => bounds::run(cfg, v),
        Command::Gap => gap::run(v),
        Command::Converge => converge::run(v),
        Command::Holder => holder::run(cfg, v),
        Command::Simulate => simulate::run(v),
    }
}

pub(crate) fn method_name(m: QuadMethod) -> &'static str {
    match m {
        QuadMethod::TensorQuadrature => "tensor",
        QuadMethod::MCQuadrature => "monte-carlo",
    }
}

pub(crate) fn coord(pt: &SpaceTimePoint) -> String {
    pt.x.iter().map(|v| crate::output::num(*v)).collect::<Vec<_>>().join(";")
}
