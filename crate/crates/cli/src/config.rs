//! Run configuration: TOML with `[section]` tables. Unknown keys are rejected.

use std::fmt;

use anderson_chaos::chaos_quadrature::{MethodChoice, QuadratureConfig};
use anderson_chaos::kernels::SpaceTimePoint;
use anderson_chaos::model_params::{validate_existence, EquationKind, NoiseParam, Regime};
use anderson_chaos::monte_carlo::DEFAULT_TIME_STEPS;
use anderson_chaos::spectral_noise::Lattice;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Bounds,
    Gap,
    Converge,
    Holder,
    Simulate,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Bounds => "bounds",
            Command::Gap => "gap",
            Command::Converge => "converge",
            Command::Holder => "holder",
            Command::Simulate => "simulate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Heat,
    Wave,
}

impl From<Equation> for EquationKind {
    fn from(e: Equation) -> Self {
        match e {
            Equation::Heat => EquationKind::Heat,
            Equation::Wave => EquationKind::Wave,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeKind {
    Regular,
    Rough,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Auto,
    Tensor,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransectDirection {
    Time,
    Space,
}

/// Top-level configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; when present it must match the subcommand.
    pub command: Option<Command>,
    pub equation: Equation,
    pub noise: NoiseSection,
    #[serde(default)]
    pub points: PointsSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub lattice: LatticeSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub holder: Option<HolderSection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// Noise family and the θ sequence: explicit `thetas`, or the dyadic rule
/// θ_j = target + sign·scale·2^{−j} for j = start .. start + count − 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub regime: RegimeKind,
    #[serde(default = "one")]
    pub dim: usize,
    pub h0: f64,
    pub target: Option<f64>,
    pub thetas: Option<Vec<f64>>,
    pub dyadic: Option<DyadicRule>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadicRule {
    #[serde(default = "plus_one")]
    pub sign: f64,
    #[serde(default = "one_u32")]
    pub start: u32,
    #[serde(default = "six")]
    pub count: u32,
    #[serde(default = "plus_one")]
    pub scale: f64,
}

/// Product grid of evaluation points; `x` entries are numbers (d = 1) or arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsSection {
    #[serde(default = "unit_times")]
    pub t: Vec<f64>,
    #[serde(default = "origin")]
    pub x: Vec<Coord>,
}

impl Default for PointsSection {
    fn default() -> Self {
        PointsSection { t: unit_times(), x: origin() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Coord {
    fn to_vec(&self) -> Vec<f64> {
        match self {
            Coord::Scalar(v) => vec![*v],
            Coord::Vector(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    #[serde(default = "auto")]
    pub method: Method,
    pub nodes: Option<usize>,
    pub samples: Option<usize>,
    pub replicates: Option<usize>,
    pub seed: Option<u64>,
    pub rel_tol: Option<f64>,
    #[serde(default = "orders")]
    pub orders: Vec<usize>,
    /// Final Q_n must fall below this for a CONVERGENT verdict.
    #[serde(default = "gap_tol")]
    pub gap_tol: f64,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        QuadratureSection {
            method: Method::Auto,
            nodes: None,
            samples: None,
            replicates: None,
            seed: None,
            rel_tol: None,
            orders: orders(),
            gap_tol: gap_tol(),
        }
    }
}

/// Lattice overrides; unset fields take the default lattice for the largest target time.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub tau_max: Option<f64>,
    pub xi_max: Option<f64>,
    pub half_tau: Option<usize>,
    pub half_xi: Option<usize>,
    pub time_steps: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    #[serde(default = "thousand")]
    pub seeds: u64,
    #[serde(default)]
    pub first_seed: u64,
    #[serde(default = "two")]
    pub m: usize,
    /// Adds the quadrature value of Σ_k Q_n(k) to the converge report.
    #[serde(default)]
    pub compare_quadrature: bool,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        EnsembleSection { seeds: thousand(), first_seed: 0, m: two(), compare_quadrature: false }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    #[serde(default = "one_f")]
    pub t: f64,
    #[serde(default = "ten")]
    pub m_max: usize,
}

impl Default for BoundsSection {
    fn default() -> Self {
        BoundsSection { t: 1.0, m_max: 10 }
    }
}

/// Regular transect `start + i·step`, i < count, in one direction; the other coordinate is fixed.
/// `exponent` is β (regular noise) or δ (rough noise) of the moment bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderSection {
    pub direction: TransectDirection,
    pub start: f64,
    pub step: f64,
    pub count: usize,
    #[serde(default)]
    pub fixed_x: f64,
    #[serde(default = "one_f")]
    pub fixed_t: f64,
    #[serde(default = "two_f")]
    pub p: f64,
    pub exponent: f64,
    #[serde(default = "tenth")]
    pub tolerance: f64,
    /// Lags in units of `step` used for the regression; default 1, 2, 4, … below count.
    pub lags: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
}

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}
fn ten() -> usize {
    10
}
fn one_u32() -> u32 {
    1
}
fn six() -> u32 {
    6
}
fn plus_one() -> f64 {
    1.0
}
fn one_f() -> f64 {
    1.0
}
fn two_f() -> f64 {
    2.0
}
fn tenth() -> f64 {
    0.1
}
fn thousand() -> u64 {
    1000
}
fn unit_times() -> Vec<f64> {
    vec![1.0]
}
fn origin() -> Vec<Coord> {
    vec![Coord::Scalar(0.0)]
}
fn auto() -> Method {
    Method::Auto
}
fn orders() -> Vec<usize> {
    vec![1, 2]
}
fn gap_tol() -> f64 {
    1e-2
}

/// Configuration problems; all map to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
}

/// Configuration checked against the model before any computation.
#[derive(Debug, Clone)]
pub struct Validated {
    pub command: Command,
    pub eq: EquationKind,
    pub target: Option<NoiseParam>,
    pub sequence: Vec<NoiseParam>,
    pub points: Vec<SpaceTimePoint>,
    pub quadrature: QuadratureConfig,
    pub orders: Vec<usize>,
    pub gap_tol: f64,
    pub lattice: Lattice,
    pub time_steps: usize,
    pub seeds: Vec<u64>,
    pub m: usize,
    pub compare_quadrature: bool,
    pub bounds: BoundsSection,
    pub holder: Option<HolderSection>,
}

fn make_param(cfg: &NoiseSection, theta: f64) -> Result<NoiseParam, ConfigError> {
    let p = match cfg.regime {
        RegimeKind::Regular => NoiseParam::regular(theta, cfg.dim, cfg.h0),
        RegimeKind::Rough => {
            if cfg.dim != 1 {
                return bad("rough noise is one-dimensional");
            }
            NoiseParam::rough(theta, cfg.h0)
        }
    };
    p.map_err(|e| ConfigError(format!("theta = {theta}: {e}")))
}

fn check_admissible(p: &NoiseParam, eq: EquationKind) -> Result<(), ConfigError> {
    let r = validate_existence(p, eq);
    if r.admissible {
        Ok(())
    } else {
        bad(format!("{} is not admissible for {eq}: {} fails", p.label(), r.condition_checked))
    }
}

/// θ values of the sequence, explicit list first.
pub fn sequence_values(noise: &NoiseSection) -> Result<Vec<f64>, ConfigError> {
    match (&noise.thetas, &noise.dyadic) {
        (Some(_), Some(_)) => bad("give either noise.thetas or noise.dyadic, not both"),
        (Some(list), None) => Ok(list.clone()),
        (None, Some(rule)) => {
            let Some(target) = noise.target else {
                return bad("noise.dyadic needs noise.target");
            };
            if !(rule.sign == 1.0 || rule.sign == -1.0) {
                return bad("noise.dyadic.sign must be 1 or -1");
            }
            if !(rule.scale > 0.0 && rule.scale.is_finite()) {
                return bad("noise.dyadic.scale must be positive");
            }
            if rule.count == 0 || rule.start > 60 {
                return bad("noise.dyadic needs count >= 1 and start <= 60");
            }
            Ok((rule.start..rule.start + rule.count)
                .map(|j| target + rule.sign * rule.scale * 2f64.powi(-(j as i32)))
                .collect())
        }
        (None, None) => Ok(Vec::new()),
    }
}

pub fn validate(cfg: &RunConfig, command: Command, seed_offset: u64) -> Result<Validated, ConfigError> {
    if let Some(c) = cfg.command {
        if c != command {
            return bad(format!("config is for '{c}' but '{command}' was requested"));
        }
    }
    let eq: EquationKind = cfg.equation.into();
    let noise = &cfg.noise;
    if noise.dim == 0 {
        return bad("noise.dim must be at least 1");
    }
    let target = noise.target.map(|t| make_param(noise, t)).transpose()?;
    let sequence =
        sequence_values(noise)?.into_iter().map(|t| make_param(noise, t)).collect::<Result<Vec<_>, _>>()?;
    for p in target.iter().chain(&sequence) {
        check_admissible(p, eq)?;
    }

    let needs_target = matches!(command, Command::Gap | Command::Converge);
    if needs_target && target.is_none() {
        return bad(format!("'{command}' needs noise.target"));
    }
    if command != Command::Holder && command != Command::Simulate && sequence.is_empty() && target.is_none() {
        return bad("no noise parameters: set noise.thetas, noise.dyadic or noise.target");
    }
    if command == Command::Gap || command == Command::Converge {
        if sequence.is_empty() {
            return bad(format!("'{command}' needs a theta sequence"));
        }
    }

    let mut points = Vec::new();
    if cfg.points.t.is_empty() || cfg.points.x.is_empty() {
        return bad("points.t and points.x must be non-empty");
    }
    for &t in &cfg.points.t {
        if !(t > 0.0 && t.is_finite()) {
            return bad(format!("time {t} must be positive and finite"));
        }
        for x in &cfg.points.x {
            let x = x.to_vec();
            if x.len() != noise.dim {
                return bad(format!("point {x:?} has dimension {}, noise has {}", x.len(), noise.dim));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return bad("point coordinates must be finite");
            }
            points.push(SpaceTimePoint { t, x });
        }
    }

    let q = &cfg.quadrature;
    let mut quadrature = QuadratureConfig::default();
    quadrature.method = match q.method {
        Method::Auto => MethodChoice::Auto,
        Method::Tensor => MethodChoice::Tensor,
        Method::MonteCarlo => MethodChoice::MonteCarlo,
    };
    if let Some(n) = q.nodes {
        if n < 2 {
            return bad("quadrature.nodes must be at least 2");
        }
        quadrature.nodes = n;
    }
    if let Some(n) = q.samples {
        if n == 0 {
            return bad("quadrature.samples must be positive");
        }
        quadrature.samples = n;
    }
    if let Some(n) = q.replicates {
        if n < 2 {
            return bad("quadrature.replicates must be at least 2");
        }
        quadrature.replicates = n;
    }
    quadrature.seed = q.seed.unwrap_or(quadrature.seed).wrapping_add(seed_offset);
    if let Some(r) = q.rel_tol {
        if !(r > 0.0) {
            return bad("quadrature.rel_tol must be positive");
        }
        quadrature.rel_tol = Some(r);
    }
    if q.orders.is_empty() || q.orders.iter().any(|&k| k > 6) {
        return bad("quadrature.orders must be a non-empty list of orders up to 6");
    }
    if !(q.gap_tol > 0.0) {
        return bad("quadrature.gap_tol must be positive");
    }

    let t_max = match (&cfg.holder, command) {
        (Some(h), Command::Holder) if h.direction == TransectDirection::Time => {
            h.start + h.step * h.count.saturating_sub(1) as f64
        }
        (Some(h), Command::Holder) => h.fixed_t,
        _ => points.iter().map(|p| p.t).fold(0.0, f64::max),
    };
    if !(t_max > 0.0 && t_max.is_finite()) {
        return bad("largest time must be positive");
    }
    let base = Lattice::default_for(t_max, noise.dim).map_err(|e| ConfigError(e.to_string()))?;
    let l = &cfg.lattice;
    let lattice = Lattice::new(
        l.tau_max.unwrap_or(base.tau_max),
        l.half_tau.unwrap_or(base.half_tau()),
        l.xi_max.unwrap_or(base.xi_max),
        l.half_xi.unwrap_or(base.half_xi()),
        noise.dim,
    )
    .map_err(|e| ConfigError(format!("lattice: {e}")))?;
    let time_steps = l.time_steps.unwrap_or(DEFAULT_TIME_STEPS);
    if time_steps == 0 {
        return bad("lattice.time_steps must be positive");
    }

    let e = &cfg.ensemble;
    if e.m > 3 {
        return bad("ensemble.m must be at most 3");
    }
    if matches!(command, Command::Converge | Command::Holder | Command::Simulate) && e.seeds == 0 {
        return bad("ensemble.seeds must be positive");
    }
    let first = e.first_seed.checked_add(seed_offset).ok_or_else(|| ConfigError("seed range overflows".into()))?;
    if first.checked_add(e.seeds).is_none() {
        return bad("seed range overflows");
    }
    let seeds: Vec<u64> = (0..e.seeds).map(|i| first + i).collect();

    if !(cfg.bounds.t > 0.0 && cfg.bounds.t.is_finite()) {
        return bad("bounds.t must be positive");
    }

    let holder = cfg.holder.clone();
    if command == Command::Holder {
        let Some(h) = &holder else {
            return bad("'holder' needs a [holder] section");
        };
        validate_holder(h, noise, &sequence, eq)?;
        if sequence.is_empty() {
            return bad("'holder' needs a theta set in noise.thetas or noise.dyadic");
        }
    }
    if command == Command::Simulate && sequence.is_empty() && target.is_none() {
        return bad("'simulate' needs at least one noise parameter");
    }

    Ok(Validated {
        command,
        eq,
        target,
        sequence,
        points,
        quadrature,
        orders: q.orders.clone(),
        gap_tol: q.gap_tol,
        lattice,
        time_steps,
        seeds,
        m: e.m,
        compare_quadrature: e.compare_quadrature,
        bounds: cfg.bounds.clone(),
        holder,
    })
}

fn validate_holder(h: &HolderSection, noise: &NoiseSection, seq: &[NoiseParam], eq: EquationKind) -> Result<(), ConfigError> {
    if h.count < 2 {
        return bad("holder.count must be at least 2");
    }
    if !(h.step > 0.0 && h.step.is_finite()) {
        return bad("holder.step must be positive");
    }
    if !(h.p >= 2.0 && h.p.is_finite()) {
        return bad("holder.p must be at least 2");
    }
    if noise.dim != 1 {
        return bad("holder transects are one-dimensional");
    }
    match h.direction {
        TransectDirection::Time => {
            if !(h.start > 0.0) {
                return bad("time transects must start after 0");
            }
        }
        TransectDirection::Space => {
            if !(h.fixed_t > 0.0) {
                return bad("holder.fixed_t must be positive");
            }
        }
    }
    if let Some(lags) = &h.lags {
        if lags.len() < 2 || lags.iter().any(|&l| l == 0 || l >= h.count) {
            return bad("holder.lags needs at least two lags in 1..count");
        }
    }
    // admissible exponent range, with a = min θ of the compact set
    let a = seq.iter().map(|p| p.theta()).fold(f64::INFINITY, f64::min);
    let e = h.exponent;
    match (noise.regime, seq.first().map(|p| p.regime)) {
        (RegimeKind::Regular, _) => {
            let lo = (noise.dim as f64 - a) / 2.0;
            if !(e > lo && e < 1.0) {
                return bad(format!("holder.exponent (beta) must lie in ({lo}, 1)"));
            }
        }
        (RegimeKind::Rough, Some(Regime::Rough { .. })) | (RegimeKind::Rough, None) => {
            let hi = match eq {
                EquationKind::Heat => 2.0 * noise.h0 + a - 1.0,
                EquationKind::Wave => a,
            };
            if !(e > 0.0 && e < hi) {
                return bad(format!("holder.exponent (delta) must lie in (0, {hi})"));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Moment-bound slope of E|Δu|^p against the lag: p·γ (time) or p·(1 − β) (space) for regular
/// noise, p·δ/2 or p·δ (heat) and p·δ (wave) for rough noise.
pub fn theory_slope(eq: EquationKind, regime: RegimeKind, direction: TransectDirection, p: f64, exponent: f64) -> f64 {
    match (regime, eq, direction) {
        (RegimeKind::Regular, EquationKind::Heat, TransectDirection::Time) => p * (1.0 - exponent) / 2.0,
        (RegimeKind::Regular, _, _) => p * (1.0 - exponent),
        (RegimeKind::Rough, EquationKind::Heat, TransectDirection::Time) => p * exponent / 2.0,
        (RegimeKind::Rough, _, _) => p * exponent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
equation = "heat"
[noise]
regime = "regular"
h0 = 0.75
target = 0.5
dyadic = { start = 2, count = 6 }
"#;

    #[test]
    fn dyadic_rule_and_defaults() {
        let cfg = parse(BASE).unwrap();
        let v = validate(&cfg, Command::Gap, 0).unwrap();
        let th: Vec<f64> = v.sequence.iter().map(|p| p.theta()).collect();
        assert_eq!(th, vec![0.75, 0.625, 0.5625, 0.53125, 0.515625, 0.5078125]);
        assert_eq!(v.points.len(), 1);
        assert_eq!(v.lattice.n_tau(), 257);
        assert_eq!(v.seeds.len(), 1000);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(parse(&format!("{BASE}\n[points]\ntt = [1.0]\n")).is_err());
        assert!(parse(&format!("{BASE}\nextra = 1\n")).is_err());
        let cfg = parse(&BASE.replace("target = 0.5", "target = 1.5")).unwrap();
        assert!(validate(&cfg, Command::Gap, 0).is_err());
        let cfg = parse(&BASE.replace("dyadic = { start = 2, count = 6 }", "dyadic = { start = 1, count = 6 }")).unwrap();
        assert!(validate(&cfg, Command::Gap, 0).is_err());
        let cfg = parse(&format!("command = \"bounds\"\n{BASE}")).unwrap();
        assert!(validate(&cfg, Command::Gap, 0).is_err());
        let cfg = parse(&format!("{BASE}\n[points]\nx = [[0.0, 1.0]]\n")).unwrap();
        assert!(validate(&cfg, Command::Gap, 0).is_err());
    }

    #[test]
    fn seed_offset_shifts_seeds() {
        let cfg = parse(&format!("{BASE}\n[ensemble]\nseeds = 3\nfirst_seed = 10\n")).unwrap();
        let v = validate(&cfg, Command::Converge, 5).unwrap();
        assert_eq!(v.seeds, vec![15, 16, 17]);
    }

    #[test]
    fn holder_exponent_range_is_checked() {
        let text = format!(
            "{}\n[holder]\ndirection = \"time\"\nstart = 0.5\nstep = 0.015625\ncount = 33\nexponent = 0.2\n",
            BASE
        );
        let cfg = parse(&text).unwrap();
        assert!(validate(&cfg, Command::Holder, 0).is_err());
        let cfg = parse(&text.replace("exponent = 0.2", "exponent = 0.8")).unwrap();
        assert!(validate(&cfg, Command::Holder, 0).is_ok());
    }

    #[test]
    fn theory_slopes() {
        let s = theory_slope(EquationKind::Heat, RegimeKind::Regular, TransectDirection::Time, 2.0, 0.8);
        assert!((s - 0.2).abs() < 1e-12);
        let s = theory_slope(EquationKind::Heat, RegimeKind::Regular, TransectDirection::Space, 2.0, 0.8);
        assert!((s - 0.4).abs() < 1e-12);
        let s = theory_slope(EquationKind::Wave, RegimeKind::Rough, TransectDirection::Time, 2.0, 0.3);
        assert!((s - 0.6).abs() < 1e-12);
    }
}
