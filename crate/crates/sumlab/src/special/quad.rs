//! Adaptive Gauss–Kronrod quadrature (15-point Kronrod / 7-point Gauss) over
//! finite intervals, for real- and complex-valued integrands.
//!
//! Callers may declare a power exponent at either endpoint: `sigma` at the
//! lower end means the integrand behaves like `C (x - a)^sigma` plus terms
//! with exponents `sigma + 1, sigma + 2, ...` (and possibly an analytic
//! part). The integrator then applies `x = a + u^k`, choosing `k` so that the
//! leading transformed exponent is at least one and, when `k * sigma` can be
//! made an integer, so that the transformed integrand is smooth. Integrable
//! singularities (`-1 < sigma < 0`) and fractional-power kinks both become
//! easy this way; exponents that are already nonnegative integers are left
//! alone.

use num_complex::Complex64;

use super::SpecialError;

/// Kronrod abscissae on `[0, 1]`; odd indices are the embedded Gauss nodes,
/// the last entry is the midpoint.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Tolerances, subdivision budget, and declared endpoint exponents.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
    pub lo_exponent: Option<f64>,
    pub hi_exponent: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            max_intervals: 512,
            lo_exponent: None,
            hi_exponent: None,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    pub fn lo(mut self, sigma: f64) -> Self {
        self.lo_exponent = Some(sigma);
        self
    }

    pub fn hi(mut self, sigma: f64) -> Self {
        self.hi_exponent = Some(sigma);
        self
    }
}

/// Result of a real integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

/// Result of a complex-valued integration along a real interval.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureC {
    pub value: Complex64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

pub(crate) trait QuadValue:
    Copy + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> f64 {
        0.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
}

fn qk15<V: QuadValue>(f: &mut dyn FnMut(f64) -> V, a: f64, b: f64) -> (V, f64, f64) {
    let center = 0.5 * (a + b);
    let h = 0.5 * (b - a);

    let fc = f(center);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = fc.norm() * WGK[7];
    let mut lo = [V::zero(); 7];
    let mut hi = [V::zero(); 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        lo[j] = f1;
        hi[j] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }

    let reskh = resk * 0.5;
    let mut resasc = (fc - reskh).norm() * WGK[7];
    for j in 0..7 {
        resasc += ((lo[j] - reskh).norm() + (hi[j] - reskh).norm()) * WGK[j];
    }

    let value = resk * h;
    resabs *= h;
    resasc *= h;
    let mut err = (resk - resg).norm() * h;
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0_f64.min((200.0 * err / resasc).powf(1.5));
    }
    let tiny = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > tiny {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err, resabs)
}

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
    resabs: f64,
}

fn adaptive<V: QuadValue>(
    f: &mut dyn FnMut(f64) -> V,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<(V, f64, usize), SpecialError> {
    let (value, err, resabs) = qk15(f, a, b);
    let mut segments = vec![Segment {
        a,
        b,
        value,
        err,
        resabs,
    }];
    let mut evaluations = 15;
    loop {
        let mut total = V::zero();
        let mut total_err = 0.0;
        let mut total_abs = 0.0;
        for s in &segments {
            total = total + s.value;
            total_err += s.err;
            total_abs += s.resabs;
        }
        if !total.norm().is_finite() {
            return Err(SpecialError::Domain(format!(
                "integrand produced a non-finite value inside [{a}, {b}]"
            )));
        }
        // Accept at the requested tolerance, or once the estimate reaches the
        // summation roundoff floor, past which subdivision cannot help.
        let tol = spec.abs_tol.max(spec.rel_tol * total.norm());
        if total_err <= tol.max(100.0 * f64::EPSILON * total_abs) {
            return Ok((total, total_err, evaluations));
        }
        if segments.len() >= spec.max_intervals {
            return Err(SpecialError::MaxDepthExceeded {
                value: total.norm(),
                err_estimate: total_err,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.err.total_cmp(&y.err))
            .map(|(i, _)| i)
            .unwrap();
        let (sa, sb) = (segments[worst].a, segments[worst].b);
        let mid = 0.5 * (sa + sb);
        if mid <= sa || mid >= sb {
            let total_norm = total.norm();
            return Err(SpecialError::MaxDepthExceeded {
                value: total_norm,
                err_estimate: total_err,
            });
        }
        let (v1, e1, r1) = qk15(f, sa, mid);
        let (v2, e2, r2) = qk15(f, mid, sb);
        evaluations += 30;
        segments[worst] = Segment {
            a: sa,
            b: mid,
            value: v1,
            err: e1,
            resabs: r1,
        };
        segments.push(Segment {
            a: mid,
            b: sb,
            value: v2,
            err: e2,
            resabs: r2,
        });
    }
}

/// Power-substitution order for a declared endpoint exponent. Order one
/// means the endpoint needs no substitution.
fn substitution_order(sigma: f64) -> Result<u32, SpecialError> {
    if !sigma.is_finite() || sigma <= -1.0 {
        return Err(SpecialError::Domain(format!(
            "endpoint exponent must be finite and > -1, got {sigma}"
        )));
    }
    let near_int = |x: f64| (x - x.round()).abs() < 1e-9 * x.abs().max(1.0);
    if sigma >= 3.0 || (sigma >= -0.25 && near_int(sigma)) {
        return Ok(1);
    }
    let k_min = if sigma < 0.0 {
        (2.0 / (1.0 + sigma)).ceil() as u32
    } else {
        1
    };
    for k in k_min..=64 {
        if near_int(k as f64 * sigma) {
            return Ok(k);
        }
    }
    Ok(if sigma < 0.0 {
        (3.0 / (1.0 + sigma)).ceil() as u32
    } else {
        (2.0 / sigma).round().max(2.0) as u32
    })
}

fn lo_substituted<V: QuadValue>(
    f: &mut dyn FnMut(f64) -> V,
    a: f64,
    b: f64,
    order: u32,
    spec: &QuadratureSpec,
) -> Result<(V, f64, usize), SpecialError> {
    let k = order as i32;
    let kf = order as f64;
    let ub = (b - a).powf(1.0 / kf);
    let mut g = |u: f64| f(a + u.powi(k)) * (kf * u.powi(k - 1));
    adaptive(&mut g, 0.0, ub, spec)
}

fn hi_substituted<V: QuadValue>(
    f: &mut dyn FnMut(f64) -> V,
    a: f64,
    b: f64,
    order: u32,
    spec: &QuadratureSpec,
) -> Result<(V, f64, usize), SpecialError> {
    let k = order as i32;
    let kf = order as f64;
    let ub = (b - a).powf(1.0 / kf);
    let mut g = |u: f64| f(b - u.powi(k)) * (kf * u.powi(k - 1));
    adaptive(&mut g, 0.0, ub, spec)
}

fn integrate_generic<V: QuadValue>(
    f: &mut dyn FnMut(f64) -> V,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<(V, f64, usize), SpecialError> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(SpecialError::Domain(format!(
            "integration interval must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok((V::zero(), 0.0, 0));
    }
    let k_lo = match spec.lo_exponent {
        Some(s) => substitution_order(s)?,
        None => 1,
    };
    let k_hi = match spec.hi_exponent {
        Some(s) => substitution_order(s)?,
        None => 1,
    };
    match (k_lo > 1, k_hi > 1) {
        (false, false) => adaptive(f, a, b, spec),
        (true, false) => lo_substituted(f, a, b, k_lo, spec),
        (false, true) => hi_substituted(f, a, b, k_hi, spec),
        (true, true) => {
            let mid = 0.5 * (a + b);
            let (v1, e1, n1) = lo_substituted(f, a, mid, k_lo, spec)?;
            let (v2, e2, n2) = hi_substituted(f, mid, b, k_hi, spec)?;
            Ok((v1 + v2, e1 + e2, n1 + n2))
        }
    }
}

fn weighted_generic<V: QuadValue>(
    phi: &mut dyn FnMut(f64) -> V,
    a: f64,
    b: f64,
    alpha: f64,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<(V, f64, usize), SpecialError> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(SpecialError::Domain(format!(
            "integration interval must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok((V::zero(), 0.0, 0));
    }
    let k_lo = substitution_order(alpha)?;
    let k_hi = substitution_order(beta)?;
    let mid = 0.5 * (a + b);

    let lo_piece = |phi: &mut dyn FnMut(f64) -> V, hi_end: f64| {
        let k = k_lo as i32;
        let kf = k_lo as f64;
        let ub = (hi_end - a).powf(1.0 / kf);
        let mut g = |u: f64| {
            let x = a + u.powi(k);
            phi(x) * (kf * u.powf(kf * (1.0 + alpha) - 1.0) * (b - x).powf(beta))
        };
        adaptive(&mut g, 0.0, ub, spec)
    };
    let hi_piece = |phi: &mut dyn FnMut(f64) -> V, lo_end: f64| {
        let k = k_hi as i32;
        let kf = k_hi as f64;
        let ub = (b - lo_end).powf(1.0 / kf);
        let mut g = |u: f64| {
            let x = b - u.powi(k);
            phi(x) * (kf * u.powf(kf * (1.0 + beta) - 1.0) * (x - a).powf(alpha))
        };
        adaptive(&mut g, 0.0, ub, spec)
    };

    match (alpha != 0.0, beta != 0.0) {
        (false, false) => adaptive(phi, a, b, spec),
        (true, false) => lo_piece(phi, b),
        (false, true) => hi_piece(phi, a),
        (true, true) => {
            let (v1, e1, n1) = lo_piece(phi, mid)?;
            let (v2, e2, n2) = hi_piece(phi, mid)?;
            Ok((v1 + v2, e1 + e2, n1 + n2))
        }
    }
}

/// Integrate `(x - a)^alpha (b - x)^beta phi(x)` over `[a, b]` with `phi`
/// smooth up to the endpoints. The endpoint weights are evaluated in the
/// substituted variable, so they stay accurate arbitrarily close to the
/// endpoints even when `alpha` or `beta` is negative.
pub fn integrate_weighted<F>(
    mut phi: F,
    a: f64,
    b: f64,
    alpha: f64,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature, SpecialError>
where
    F: FnMut(f64) -> f64,
{
    let (value, err_estimate, evaluations) = weighted_generic(&mut phi, a, b, alpha, beta, spec)?;
    Ok(Quadrature {
        value,
        err_estimate,
        evaluations,
    })
}

/// Complex-valued counterpart of [`integrate_weighted`].
pub fn integrate_weighted_complex<F>(
    mut phi: F,
    a: f64,
    b: f64,
    alpha: f64,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureC, SpecialError>
where
    F: FnMut(f64) -> Complex64,
{
    let (value, err_estimate, evaluations) = weighted_generic(&mut phi, a, b, alpha, beta, spec)?;
    Ok(QuadratureC {
        value,
        err_estimate,
        evaluations,
    })
}

/// Integrate a real function over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature, SpecialError>
where
    F: FnMut(f64) -> f64,
{
    let (value, err_estimate, evaluations) = integrate_generic(&mut f, a, b, spec)?;
    Ok(Quadrature {
        value,
        err_estimate,
        evaluations,
    })
}

/// Integrate a complex-valued function of a real parameter over `[a, b]`.
pub fn integrate_complex_line<F>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureC, SpecialError>
where
    F: FnMut(f64) -> Complex64,
{
    let (value, err_estimate, evaluations) = integrate_generic(&mut f, a, b, spec)?;
    Ok(QuadratureC {
        value,
        err_estimate,
        evaluations,
    })
}
