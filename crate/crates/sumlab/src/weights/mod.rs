//! The archimedean weight pipeline: log-grid storage of regularized weight
//! profiles, multiplicative convolution, closed forms for the degree-one
//! cases, and the evaluator that assembles the full smoothing kernels
//! `g^{<k>}` for any registered L-function.
//!
//! Every stored profile is *regularized*: what sits on the grid is
//! `REG(x) = g(x) * (1 - x^2)^{-reg_exp}`, which extends analytically to
//! `x = 1` and is reconstructed with `1 - x^2` computed from `log x` without
//! cancellation. All quadrature against the endpoint behavior runs through
//! the weighted integrator, so the pipeline never samples a singular factor
//! it cannot represent.

mod closed;
mod convolve;
mod grid;
mod pipeline;

pub use closed::{g_char_closed, g_zeta_closed};
pub use convolve::mult_convolve;
pub use grid::{GridFn, STANDARD_CELLS, STANDARD_XI_LO};
pub use pipeline::{PowerCumulative, WeightEvaluator};

use crate::lfunc::LFuncError;
use crate::special::SpecialError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("parameter out of domain: {0}")]
    ParameterOutOfDomain(String),
    #[error("grid resolution insufficient: {0}")]
    GridResolutionInsufficient(String),
    #[error("x = {x:e} lies below the grid floor")]
    BelowGridFloor { x: f64 },
    #[error("weight level k = {k} exceeds the built maximum {max}")]
    UnsupportedLevel { k: usize, max: usize },
    #[error(transparent)]
    LFunc(#[from] LFuncError),
    #[error(transparent)]
    Special(#[from] SpecialError),
}
