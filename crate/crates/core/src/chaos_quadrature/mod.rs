//! Second moments of chaos coefficients, cross-moments between noise parameters, the
//! continuity gap, and the multi-index and Littlewood–Hardy machinery.
//!
//! All moments use the time-domain form
//! E|I_k|² = (1/k!) ∫_{[0,t]^{2k}} ∏ γ₀(t_j − s_j) A_k(t, s) dt ds,
//! where A_k is the frequency integral of the two chain kernels against the spatial weight.
//! Each pair (t_j, s_j) is mapped to Duffy coordinates at the corner (t, t) so that the
//! diagonal singularity of γ₀ and the corner singularity of A_k become Jacobi weights.

mod combinatorics;
mod integrand;
mod lh;
mod mc;
mod tensor;

pub use combinatorics::{multiindex_set, product_bound_check, MultiIndexSet, MULTIINDEX_LIMIT};
pub use lh::{lh_ratio, LhTestFunction};
pub use tensor::planar_gaussian_power;

use crate::closed_forms::{dalang_constant, simplex_power_integral, wave_moment_coefficient};
use crate::error::{ChaosError, Result};
use crate::kernels::{chaos_kernel_fourier, OrderedTimes};
use crate::model_params::{require_admissible, EquationKind, NoiseParam, Regime, TemporalKernel};
use crate::special::gamma;
use integrand::{FreqWeight, MAX_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadMethod {
    TensorQuadrature,
    MCQuadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    /// Tensor rules where implemented (k = 1; k = 2 heat in d = 1), otherwise Monte Carlo.
    Auto,
    Tensor,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub method: MethodChoice,
    /// Nodes per coordinate of the order-2 tensor rule; order 1 uses three times as many.
    pub nodes: usize,
    /// Quasi-random points per replicate.
    pub samples: usize,
    pub replicates: usize,
    pub seed: u64,
    /// Fail with `NonConvergence` when error_estimate > rel_tol·|value| + abs_tol.
    pub rel_tol: Option<f64>,
    pub abs_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            method: MethodChoice::Auto,
            nodes: 12,
            samples: 8192,
            replicates: 16,
            seed: 0x5eed_c4a0,
            rel_tol: None,
            abs_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: QuadMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapResult {
    pub moment: MomentResult,
    /// A negative raw value was replaced by 0.
    pub clipped: bool,
    /// k!‖H_k‖² for the unsymmetrized difference kernel, when the backend provides it.
    pub unsymmetrized_bound: Option<f64>,
}

pub const TENSOR_ORDER_LIMIT: usize = 2;

fn check_common(p: &NoiseParam, eq: EquationKind, t: f64, x: &[f64], k: usize) -> Result<()> {
    require_admissible(p, eq)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(ChaosError::Domain(format!("t = {t} must be positive")));
    }
    if x.len() != p.dim() {
        return Err(ChaosError::DimensionMismatch { expected: p.dim(), got: x.len() });
    }
    if k > MAX_ORDER {
        return Err(ChaosError::OrderTooLarge { k, limit: MAX_ORDER });
    }
    if k > 0 {
        phase_cancels(eq, t, x, k)?;
    }
    Ok(())
}

/// The spatial phase e^{−i(Σξ)·x} is common to both chains, so the moment is independent of x.
fn phase_cancels(eq: EquationKind, t: f64, x: &[f64], k: usize) -> Result<()> {
    let times = OrderedTimes::new((1..=k).map(|j| t * j as f64 / (k + 1) as f64).collect(), t)?;
    let xis: Vec<Vec<f64>> = (0..k).map(|j| vec![0.37 * (j as f64 + 1.0); x.len()]).collect();
    let at_x = chaos_kernel_fourier(eq, t, x, &times, &xis)?;
    let at_0 = chaos_kernel_fourier(eq, t, &vec![0.0; x.len()], &times, &xis)?;
    let diff = (at_x * at_x.conj()).re - (at_0 * at_0.conj()).re;
    if diff.abs() > 1e-12 * (at_0.norm_sqr() + 1e-300) {
        return Err(ChaosError::Symmetry(format!("phase does not cancel at x = {x:?}")));
    }
    Ok(())
}

fn select_method(cfg: &QuadratureConfig, eq: EquationKind, k: usize, d: usize) -> Result<QuadMethod> {
    let tensor_ok = k == 1 || (k == 2 && eq == EquationKind::Heat && d == 1);
    let mc_ok = eq == EquationKind::Heat;
    match cfg.method {
        MethodChoice::Tensor if tensor_ok => Ok(QuadMethod::TensorQuadrature),
        MethodChoice::Tensor => Err(ChaosError::Unsupported(format!(
            "tensor quadrature covers k = 1 and k = 2 (heat, d = 1); got k = {k}, {eq}, d = {d}"
        ))),
        MethodChoice::MonteCarlo if mc_ok => Ok(QuadMethod::MCQuadrature),
        MethodChoice::Auto if tensor_ok => Ok(QuadMethod::TensorQuadrature),
        MethodChoice::Auto if mc_ok => Ok(QuadMethod::MCQuadrature),
        _ => Err(ChaosError::Unsupported(format!("{eq} equation moments of order k = {k} >= 2 are not implemented"))),
    }
}

fn run(
    eq: EquationKind,
    temporal: &TemporalKernel,
    t: f64,
    k: usize,
    weight: FreqWeight,
    cfg: &QuadratureConfig,
) -> Result<(MomentResult, Option<f64>)> {
    let method = select_method(cfg, eq, k, weight.dim())?;
    let (value, error, bound) = match method {
        QuadMethod::TensorQuadrature => {
            let eval = |n: usize| -> Result<f64> {
                if k == 1 {
                    weight
                        .terms()
                        .iter()
                        .map(|(c, s)| tensor::first_order(eq, temporal, t, s, n).map(|v| c * v))
                        .sum()
                } else {
                    tensor::second_order_heat_d1(temporal, t, &weight, n)
                }
            };
            let n = if k == 1 { 3 * cfg.nodes.max(4) } else { cfg.nodes.max(3) };
            let coarse = (2 * n / 3).max(2);
            let fine = eval(n)?;
            let rough = eval(coarse)?;
            (fine, (fine - rough).abs(), if k == 1 { Some(fine) } else { None })
        }
        QuadMethod::MCQuadrature => {
            let out = mc::estimate(&mc::McPlan {
                temporal,
                t,
                k,
                weight,
                samples: cfg.samples,
                replicates: cfg.replicates,
                seed: cfg.seed,
            })?;
            (out.value, out.std_error, Some(out.unsymmetrized))
        }
    };
    if !value.is_finite() {
        return Err(ChaosError::NonConvergence { estimate: value, tolerance: 0.0 });
    }
    if let Some(rel) = cfg.rel_tol {
        let tol = rel * value.abs() + cfg.abs_tol;
        if error > tol {
            return Err(ChaosError::NonConvergence { estimate: error, tolerance: tol });
        }
    }
    Ok((MomentResult { value, error_estimate: error, method }, bound))
}

/// E|I_k(f_{t,x,k})|²; independent of x.
pub fn chaos_moment(
    p: &NoiseParam,
    eq: EquationKind,
    t: f64,
    x: &[f64],
    k: usize,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    check_common(p, eq, t, x, k)?;
    if k == 0 {
        return Ok(MomentResult { value: 1.0, error_estimate: 0.0, method: QuadMethod::TensorQuadrature });
    }
    run(eq, &p.temporal, t, k, FreqWeight::Single(p.spatial_density()), cfg).map(|r| r.0)
}

fn check_pair(p1: &NoiseParam, p2: &NoiseParam) -> Result<()> {
    if !p1.same_family(p2) {
        return Err(ChaosError::Domain(format!("{} and {} are not in the same family", p1.label(), p2.label())));
    }
    Ok(())
}

/// E[I_k^{θ₁}(f) I_k^{θ₂}(f)] under the shared white noise.
pub fn chaos_cross_moment(
    p1: &NoiseParam,
    p2: &NoiseParam,
    eq: EquationKind,
    t: f64,
    x: &[f64],
    k: usize,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    check_pair(p1, p2)?;
    check_common(p1, eq, t, x, k)?;
    check_common(p2, eq, t, x, k)?;
    if k == 0 {
        return Ok(MomentResult { value: 1.0, error_estimate: 0.0, method: QuadMethod::TensorQuadrature });
    }
    let mixed = p1.spatial_density().mixed(&p2.spatial_density())?;
    run(eq, &p1.temporal, t, k, FreqWeight::Single(mixed), cfg).map(|r| r.0)
}

/// Q = E|I_k^{θ_n}(f) − I_k^{θ*}(f)|², integrated as one nonnegative combination.
pub fn continuity_gap(
    p_n: &NoiseParam,
    p_star: &NoiseParam,
    eq: EquationKind,
    t: f64,
    x: &[f64],
    k: usize,
    cfg: &QuadratureConfig,
) -> Result<GapResult> {
    check_pair(p_n, p_star)?;
    check_common(p_n, eq, t, x, k)?;
    check_common(p_star, eq, t, x, k)?;
    let zero = |method| GapResult {
        moment: MomentResult { value: 0.0, error_estimate: 0.0, method },
        clipped: false,
        unsymmetrized_bound: Some(0.0),
    };
    if k == 0 {
        return Ok(zero(QuadMethod::TensorQuadrature));
    }
    if p_n == p_star {
        return Ok(zero(select_method(cfg, eq, k, p_n.dim())?));
    }
    let weight = FreqWeight::Gap(p_n.spatial_density(), p_star.spatial_density());
    let (mut moment, bound) = run(eq, &p_n.temporal, t, k, weight, cfg)?;
    let clipped = moment.value < 0.0;
    if clipped {
        moment.error_estimate = moment.error_estimate.max(-moment.value);
        moment.value = 0.0;
    }
    Ok(GapResult { moment, clipped, unsymmetrized_bound: bound })
}

/// Γ_{0,t} = ∫_{−t}^{t} γ₀(s) ds.
pub fn gamma0_mass(temporal: &TemporalKernel, t: f64) -> Result<f64> {
    match temporal {
        TemporalKernel::Fractional { h0 } => crate::closed_forms::gamma0_window(t, *h0),
        TemporalKernel::Tabulated(tab) => {
            Ok(2.0 * crate::quad::adaptive(|s| tab.covariance(s), 0.0, t, 1e-14, 1e-12).value)
        }
    }
}

/// k-th term of the series dominating E|I_k|²: Γ_{0,t}^k ∫_{T_k} ∏ (frequency bound of each gap).
///
/// Regular: the frequency bound K_{d,α} gap^{r_α}. Rough: the multi-index expansion with the
/// exact moments ∫|FG_g(η)|²|η|^{α_j} dη for α_j = (1−2H)a_j, which requires H > 1/4.
pub fn dominating_term(p: &NoiseParam, eq: EquationKind, t: f64, k: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(ChaosError::Domain(format!("t = {t} must be positive")));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let g0 = gamma0_mass(&p.temporal, t)?;
    let kf = k as f64;
    match p.regime {
        Regime::Regular { alpha, dim } => {
            let dc = dalang_constant(dim, alpha)?;
            let r = dc.r(eq);
            let simplex = simplex_power_integral(t, &vec![r; k])?;
            Ok((g0 * dc.value).powf(kf) * simplex)
        }
        Regime::Rough { h } => {
            if !(h > 0.25) {
                return Err(ChaosError::Domain(format!("the rough dominating term needs H > 1/4, got {h}")));
            }
            let c_h = crate::closed_forms::riesz_space_constant(h)?;
            let set = multiindex_set(k)?;
            let mut total = 0.0;
            for a in &set.indices {
                let mut coef = 1.0;
                let mut betas = Vec::with_capacity(k);
                for &aj in a {
                    let al = (1.0 - 2.0 * h) * aj as f64;
                    let (c, beta) = match eq {
                        EquationKind::Heat => (gamma((1.0 + al) / 2.0), -(1.0 + al) / 2.0),
                        EquationKind::Wave => (2f64.powf(1.0 - al) * wave_moment_coefficient(al)?, 1.0 - al),
                    };
                    coef *= c;
                    betas.push(beta);
                }
                total += coef * simplex_power_integral(t, &betas)?;
            }
            Ok((g0 * c_h).powf(kf) * total)
        }
    }
}
