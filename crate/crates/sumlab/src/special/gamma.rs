//! Log-gamma on the complex plane.
//!
//! Strategy: the Stirling asymptotic series is accurate once the real part is
//! large enough, so arguments left of `Re z = 10` are shifted right with the
//! recurrence `log Gamma(z) = log Gamma(z + n) - sum log(z + k)` and the
//! series is applied at the shifted point. The subtraction of principal
//! logarithms reproduces the analytic continuation off the cut `(-inf, 0]`;
//! exponentiating the result is branch-independent.

use num_complex::Complex64;

use super::SpecialError;

/// `B_{2j} / (2j (2j-1))` for the Stirling series, `j = 1..=7`.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1_260.0,
    -1.0 / 1_680.0,
    1.0 / 1_188.0,
    -691.0 / 360_360.0,
    7.0 / 1_092.0,
];

const SHIFT_THRESHOLD: f64 = 10.0;
const HALF_LOG_TWO_PI: f64 = 0.918_938_533_204_672_74;

/// Stirling series at a point with `Re w >= SHIFT_THRESHOLD`.
fn stirling_series(w: Complex64) -> Complex64 {
    let lw = w.ln();
    let mut acc = (w - 0.5) * lw - w + HALF_LOG_TWO_PI;
    let inv = w.finv();
    let inv2 = inv * inv;
    let mut p = inv;
    for c in STIRLING {
        acc += p * c;
        p *= inv2;
    }
    acc
}

/// Principal-branch log-gamma.
///
/// Relative accuracy of `exp(log_gamma(z))` is close to machine precision for
/// `|z| <= 200`; poles at nonpositive integers are reported as errors.
pub fn log_gamma(z: Complex64) -> Result<Complex64, SpecialError> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(SpecialError::PoleAtNonpositiveInteger(z.re));
    }
    Ok(log_gamma_unchecked(z))
}

fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re >= SHIFT_THRESHOLD {
        return stirling_series(z);
    }
    let n = (SHIFT_THRESHOLD - z.re).ceil() as usize;
    let mut correction = Complex64::new(0.0, 0.0);
    for k in 0..n {
        correction += (z + k as f64).ln();
    }
    stirling_series(z + n as f64) - correction
}

/// Log-gamma restricted to positive real arguments.
pub fn log_gamma_real(x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) {
        return Err(SpecialError::Domain(format!(
            "log_gamma_real requires x > 0, got {x}"
        )));
    }
    Ok(log_gamma_unchecked(Complex64::new(x, 0.0)).re)
}

/// Gamma for positive real arguments.
pub fn gamma_real(x: f64) -> Result<f64, SpecialError> {
    log_gamma_real(x).map(f64::exp)
}
