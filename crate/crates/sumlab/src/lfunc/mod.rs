//! Self-dual L-functions: zeta-family evaluation on the complex plane,
//! descriptors of functional-equation data, eigenvalue tables for the
//! degree-two cusp form, and the named registry tying them together.
//!
//! The central consumer-facing object is [`LFunctionDescriptor`], which can
//! hand out local Euler-factor data for coefficient sieves, evaluate the
//! completed function `xi`, and form the spectral ratio
//! `theta(s) = xi(s - omega) / xi(s + omega)` in a factored form that never
//! divides one overflowing gamma value by another.

mod delta;
mod descriptor;
mod hurwitz;
mod registry;

pub use delta::{ramanujan_tau_table, LambdaTable};
pub use descriptor::{LFunctionDescriptor, LocalPolicy};
pub use hurwitz::{dirichlet_l, hurwitz_zeta_deflated, zeta, zeta_star, IM_LIMIT};
pub use registry::{Registry, REGISTRY_ENV};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LFuncError {
    #[error("accuracy window exceeded: {what}")]
    AccuracyWindowExceeded { what: String },
    #[error("parameter out of domain: {0}")]
    ParameterOutOfDomain(String),
    #[error("denominator within 1e-13 of an L-zero at s = {at} (|value| = {magnitude:e})")]
    DivisionNearZero { at: Complex64, magnitude: f64 },
    #[error("descriptor `{name}` is inconsistent: {message}")]
    BadDescriptor { name: String, message: String },
    #[error("registry parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown L-function: {0}")]
    UnknownLFunction(String),
    #[error("coefficient cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Special(#[from] crate::special::SpecialError),
}

/// The shift parameter must sit strictly inside `(0, 1/2)`.
pub fn validate_omega(omega: f64) -> Result<(), LFuncError> {
    if omega.is_finite() && omega > 0.0 && omega < 0.5 {
        Ok(())
    } else {
        Err(LFuncError::ParameterOutOfDomain(format!(
            "shift parameter must lie strictly in (0, 1/2), got {omega}"
        )))
    }
}
