//! Numerics for weighted summatory functions attached to self-dual L-functions.
//!
//! The library is organised around one pipeline:
//!
//! * [`arith`] — multiplicative coefficient machinery: Möbius- and
//!   eigenvalue-type coefficients derived from local Satake data, and the
//!   sieved tables the summatory evaluators consume.
//! * [`special`] — complex log-gamma, incomplete beta tails, and adaptive
//!   Gauss–Kronrod quadrature with declared endpoint exponents.
//! * [`lfunc`] — the registry of shipped L-functions together with values of
//!   `L`, the archimedean factor `gamma`, the completed `xi`, and the inner
//!   ratio `Theta(s) = xi(s - omega) / xi(s + omega)`.
//! * [`weights`] — the smoothing weights `g^<k>`: closed forms where they
//!   exist, and the measure/kernel convolution pipeline everywhere else.
//! * [`summatory`] — the weighted sums `h^<k>(x)` over coefficient tables.
//! * [`verify`] — numeric checks of every transform identity the construction
//!   rests on, plus sign scans, growth checks, and the contour oracle.
//! * [`cli`] — a thin command-line front end over the verification harness.
//!
//! Runnable tours of each capability live in `examples/`.

pub mod arith;
pub mod lfunc;
pub mod special;
pub mod summatory;
pub mod weights;

pub use lfunc::{LFunctionDescriptor, Registry};
pub use summatory::SummatoryEvaluator;
pub use weights::WeightEvaluator;
