//! Special functions and quadrature: complex log-gamma, complete and
//! incomplete beta integrals, and adaptive Gauss–Kronrod integration with
//! declared endpoint exponents.

mod beta;
mod gamma;
mod quad;

pub use beta::{beta_complete, beta_lower, beta_upper};
pub use gamma::{gamma_real, log_gamma, log_gamma_real};
pub use quad::{
    integrate, integrate_complex_line, integrate_weighted, integrate_weighted_complex, Quadrature,
    QuadratureC, QuadratureSpec,
};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum SpecialError {
    #[error("log-gamma pole at nonpositive integer {0}")]
    PoleAtNonpositiveInteger(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature exceeded depth limit: best estimate {value:e} +/- {err_estimate:e}")]
    MaxDepthExceeded { value: f64, err_estimate: f64 },
}
