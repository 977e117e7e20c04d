//! Chaos expansions, spectral noise and Monte Carlo estimators for the stochastic heat and wave equations with multiplicative Gaussian noise.

pub mod chaos_quadrature;
pub mod closed_forms;
pub mod error;
pub mod kernels;
pub mod model_params;
pub mod monte_carlo;
pub mod quad;
pub mod special;
pub mod spectral_noise;

pub use error::{ChaosError, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
