//! Weighted summatory functions: the normalized sums
//! `h^{<k>}(x) = q^{-omega} x^{-1/2} sum_{n <= x} c(n) g^{<k>}(n/x)`
//! over one L-function's coefficient table, plus the integral recurrence
//! connecting consecutive levels.

use crate::arith::{ArithError, CoefficientTables};
use crate::lfunc::{LFuncError, LFunctionDescriptor};
use crate::special::{integrate, QuadratureSpec, SpecialError};
use crate::weights::{WeightError, WeightEvaluator};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SummatoryError {
    #[error("coefficient table covers n <= {have}, needed n <= {needed}")]
    TableExhausted { needed: u64, have: u64 },
    #[error("the level-zero sum diverges at integer x; x = {x} sits in the guard band")]
    AtJump { x: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    LFunc(#[from] LFuncError),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// Relative half-width of the band around integers inside which the
/// level-zero sum is rejected rather than evaluated next to its jump.
const JUMP_GUARD: f64 = 1e-9;

/// One L-function's summatory machinery: the weight kernels at every level
/// up to `k_max` and the sieved coefficient table up to a fixed limit.
pub struct SummatoryEvaluator {
    descriptor: LFunctionDescriptor,
    weights: WeightEvaluator,
    tables: CoefficientTables,
}

impl SummatoryEvaluator {
    pub fn new(
        descriptor: &LFunctionDescriptor,
        omega: f64,
        k_max: usize,
        coeff_limit: usize,
    ) -> Result<Self, SummatoryError> {
        let weights = WeightEvaluator::build(descriptor, omega, k_max)?;
        let local = descriptor.local_inverse_fn();
        let tables = CoefficientTables::build(coeff_limit, omega, local.as_ref())?;
        Ok(SummatoryEvaluator {
            descriptor: descriptor.clone(),
            weights,
            tables,
        })
    }

    pub fn descriptor(&self) -> &LFunctionDescriptor {
        &self.descriptor
    }

    pub fn weights(&self) -> &WeightEvaluator {
        &self.weights
    }

    pub fn tables(&self) -> &CoefficientTables {
        &self.tables
    }

    pub fn omega(&self) -> f64 {
        self.weights.omega()
    }

    pub fn epsilon(&self) -> f64 {
        self.descriptor.epsilon
    }

    pub fn table_limit(&self) -> u64 {
        self.tables.limit() as u64
    }

    fn conductor_power(&self) -> f64 {
        (self.descriptor.conductor as f64).powf(-self.omega())
    }

    /// The sum evaluated term by term with compensated accumulation.
    ///
    /// `x` below 1 gives an empty sum; at level zero the value jumps at every
    /// integer, so abscissas within the guard band are rejected.
    pub fn h_direct(&self, k: usize, x: f64) -> Result<f64, SummatoryError> {
        if !(x > 0.0) {
            return Err(SummatoryError::Domain(format!(
                "h is defined for x > 0, got {x}"
            )));
        }
        if x < 1.0 {
            return Ok(0.0);
        }
        if k == 0 {
            let nearest = x.round();
            if nearest >= 1.0 && (x - nearest).abs() < JUMP_GUARD * x.max(1.0) {
                return Err(SummatoryError::AtJump { x });
            }
        }
        let n_max = x.floor() as u64;
        if n_max > self.table_limit() {
            return Err(SummatoryError::TableExhausted {
                needed: n_max,
                have: self.table_limit(),
            });
        }
        let c = self.tables.c_slice();
        let mut sum = 0.0;
        let mut comp = 0.0;
        for n in 1..=n_max {
            let term = c[n as usize] * self.weights.eval(k, n as f64 / x)?;
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        Ok(self.conductor_power() * sum / x.sqrt())
    }

    /// `h^{<k>}` across many abscissas in parallel.
    pub fn h_many(&self, k: usize, xs: &[f64]) -> Result<Vec<f64>, SummatoryError> {
        xs.par_iter().map(|&x| self.h_direct(k, x)).collect()
    }

    /// The integral recurrence `h^{<k>}(x) = \int_1^x h^{<k-1>}(y) dy/y`,
    /// evaluated literally from level `k - 1` values.
    ///
    /// Panels run between consecutive integers, where the integrand is
    /// smooth apart from a declared power kink at the left edge. At `k = 1`
    /// the newest term of the level-zero sum diverges at the edge, so that
    /// single term is integrated exactly via the cumulative moment of the
    /// kernel and only the regular remainder is quadratured. Cost grows
    /// quadratically in `x`; this is a verification tool, not a fast path.
    pub fn h_recurrence(&self, k: usize, x: f64) -> Result<f64, SummatoryError> {
        if k == 0 {
            return Err(SummatoryError::Domain(
                "the recurrence produces levels k >= 1".into(),
            ));
        }
        if !(x > 0.0) {
            return Err(SummatoryError::Domain(format!(
                "h is defined for x > 0, got {x}"
            )));
        }
        if x <= 1.0 {
            return Ok(0.0);
        }
        let n_max = x.floor() as u64;
        if n_max > self.table_limit() {
            return Err(SummatoryError::TableExhausted {
                needed: n_max,
                have: self.table_limit(),
            });
        }
        let qpow = self.conductor_power();
        let c = self.tables.c_slice();
        let prev_reg = self.weights.grid(k - 1)?.reg_exp();
        let half_moment = if k == 1 {
            Some(self.weights.power_cumulative(0, 0.5)?)
        } else {
            None
        };

        let mut total = 0.0;
        for m in 1..=n_max {
            let lo = m as f64;
            let hi = (m as f64 + 1.0).min(x);
            if hi <= lo {
                break;
            }
            if let Some(cum) = &half_moment {
                // Exact integral of the singular newest term, then the
                // smooth remainder of the level-zero sum.
                total += qpow * c[m as usize] / lo.sqrt() * cum.eval(lo / hi)?;
                if m >= 2 {
                    let spec = QuadratureSpec::with_tol(1e-11, 1e-15);
                    let mut failure: Option<SummatoryError> = None;
                    let quad = integrate(
                        |y: f64| match self.partial_sum(0, m - 1, y) {
                            Ok(v) => v / y,
                            Err(e) => {
                                failure.get_or_insert(e);
                                f64::NAN
                            }
                        },
                        lo,
                        hi,
                        &spec,
                    );
                    if let Some(e) = failure {
                        return Err(e);
                    }
                    total += quad?.value;
                }
            } else {
                let spec = QuadratureSpec::with_tol(1e-11, 1e-15).lo(prev_reg);
                let mut failure: Option<SummatoryError> = None;
                let quad = integrate(
                    |y: f64| match self.h_direct(k - 1, y) {
                        Ok(v) => v / y,
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::NAN
                        }
                    },
                    lo,
                    hi,
                    &spec,
                );
                if let Some(e) = failure {
                    return Err(e);
                }
                total += quad?.value;
            }
        }
        Ok(total)
    }

    /// The normalized sum truncated to `n <= n_top`, for panel integrands
    /// whose newest terms are handled separately.
    fn partial_sum(&self, k: usize, n_top: u64, x: f64) -> Result<f64, SummatoryError> {
        let c = self.tables.c_slice();
        let mut sum = 0.0;
        let mut comp = 0.0;
        for n in 1..=n_top {
            let term = c[n as usize] * self.weights.eval(k, n as f64 / x)?;
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        Ok(self.conductor_power() * sum / x.sqrt())
    }
}
