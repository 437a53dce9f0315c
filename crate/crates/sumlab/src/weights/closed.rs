use super::WeightError;
use crate::lfunc::validate_omega;
use crate::special::{beta_upper, gamma_real};
use std::f64::consts::PI;

/// Once-integrated smoothing kernel for the Riemann case in closed form:
/// two upper incomplete beta terms against `x^{omega-1}` and `x^{-1/2}`.
/// Valid on `0 < x <= 1` for every admissible `omega`.
pub fn g_zeta_closed(x: f64, omega: f64) -> Result<f64, WeightError> {
    validate_omega(omega).map_err(WeightError::from)?;
    if !(x > 0.0) {
        return Err(WeightError::ParameterOutOfDomain(format!(
            "closed form needs x > 0, got {x}"
        )));
    }
    if x >= 1.0 {
        return Ok(0.0);
    }
    let z = x * x;
    let b1 = beta_upper(z, 1.5 - omega, omega)?;
    let b2 = beta_upper(z, 1.25 - 0.5 * omega, omega)?;
    let front = 4.0 * omega / (2.0 * omega - 1.0) * PI.powf(omega) / gamma_real(omega)?;
    let bracket =
        x.powf(omega - 1.0) * b1 - (2.0 * omega + 1.0) / (4.0 * omega) * b2 / x.sqrt();
    Ok(front * bracket)
}

/// Once-integrated smoothing kernel for a degree-one character of parity
/// `delta` in closed form: a single upper incomplete beta term. The first
/// beta parameter `(1 + 2 delta - 2 omega) / 4` stays positive on the whole
/// admissible `omega` range for both parities, so the form never degenerates.
pub fn g_char_closed(x: f64, omega: f64, delta: u32) -> Result<f64, WeightError> {
    validate_omega(omega).map_err(WeightError::from)?;
    if delta > 1 {
        return Err(WeightError::ParameterOutOfDomain(format!(
            "parity must be 0 or 1, got {delta}"
        )));
    }
    let p = (1.0 + 2.0 * delta as f64 - 2.0 * omega) / 4.0;
    if !(x > 0.0) {
        return Err(WeightError::ParameterOutOfDomain(format!(
            "closed form needs x > 0, got {x}"
        )));
    }
    if x >= 1.0 {
        return Ok(0.0);
    }
    let b = beta_upper(x * x, p, omega)?;
    Ok(PI.powf(omega) / gamma_real(omega)? * b / x.sqrt())
}
