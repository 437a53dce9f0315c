//! Hurwitz and Riemann zeta values by Euler–Maclaurin summation, plus
//! Dirichlet L-functions assembled from Hurwitz values.
//!
//! The workhorse is the deflated function `zeta(s, a) - 1/(s - 1)`, which is
//! analytic across `s = 1` and lets callers handle (or cancel) the pole in
//! closed form. Truncation length grows linearly with `|Im s|`; beyond the
//! supported window the routines refuse rather than degrade.

use num_complex::Complex64;

use super::LFuncError;

/// `B_{2k} / (2k)!` for the correction sum, `k = 1..=6`.
const BERN_FACT: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
];

/// Largest `|Im s|` the Euler–Maclaurin window supports at full accuracy.
pub const IM_LIMIT: f64 = 200.0;

/// `(e^w - 1) / w`, stable near `w = 0`.
fn expm1_over(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        let mut acc = Complex64::new(1.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 2..=6 {
            term = term * w * (1.0 / k as f64);
            acc += term;
        }
        acc
    } else {
        (w.exp() - 1.0) / w
    }
}

fn check_window(s: Complex64) -> Result<(), LFuncError> {
    if s.im.abs() > IM_LIMIT || s.re < -1.0 {
        return Err(LFuncError::AccuracyWindowExceeded {
            what: format!("Euler-Maclaurin zeta at s = {s} (need Re s >= -1, |Im s| <= {IM_LIMIT})"),
        });
    }
    Ok(())
}

/// `zeta(s, a) - 1/(s - 1)` for `a > 0`, analytic across `s = 1`.
pub fn hurwitz_zeta_deflated(s: Complex64, a: f64) -> Result<Complex64, LFuncError> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(LFuncError::ParameterOutOfDomain(format!(
            "Hurwitz parameter must be positive, got {a}"
        )));
    }
    check_window(s)?;
    let n = 32.max((10.0 * (1.0 + s.im.abs())).ceil() as usize);

    let mut head = Complex64::new(0.0, 0.0);
    for k in 0..n {
        head += (-s * (a + k as f64).ln()).exp();
    }

    let na = a + n as f64;
    let lna = na.ln();
    // ((n + a)^{1 - s} - 1) / (s - 1), written to stay finite at s = 1.
    let pole_part = -lna * expm1_over((Complex64::new(1.0, 0.0) - s) * lna);
    let na_ms = (-s * lna).exp();

    let mut total = head + pole_part + na_ms * 0.5;
    let mut rising = s;
    let mut power = na_ms / na;
    for (i, b) in BERN_FACT.iter().enumerate() {
        total += rising * power * *b;
        if i + 1 < BERN_FACT.len() {
            let base = 2.0 * i as f64 + 1.0;
            rising = rising * (s + base) * (s + base + 1.0);
            power = power / (na * na);
        }
    }
    Ok(total)
}

/// Riemann zeta; errors at the pole `s = 1`.
pub fn zeta(s: Complex64) -> Result<Complex64, LFuncError> {
    let d = hurwitz_zeta_deflated(s, 1.0)?;
    let den = s - 1.0;
    if den.norm() == 0.0 {
        return Err(LFuncError::ParameterOutOfDomain(
            "zeta has a pole at s = 1".into(),
        ));
    }
    Ok(d + den.finv())
}

/// `(s - 1) zeta(s)`, entire.
pub fn zeta_star(s: Complex64) -> Result<Complex64, LFuncError> {
    Ok((s - 1.0) * hurwitz_zeta_deflated(s, 1.0)? + 1.0)
}

/// `L(s, chi)` for a non-principal character given by its value table
/// (`values[a]` is `chi(a)` for `a = 0..modulus-1`). The character sum being
/// zero, the Hurwitz pole terms cancel exactly and the deflated form gives an
/// entire function.
pub fn dirichlet_l(s: Complex64, modulus: u64, values: &[f64]) -> Result<Complex64, LFuncError> {
    let q = modulus as usize;
    if values.len() != q || q < 2 {
        return Err(LFuncError::ParameterOutOfDomain(format!(
            "character table must list one value per residue class, got {} for modulus {q}",
            values.len()
        )));
    }
    let total: f64 = values.iter().sum();
    if total.abs() > 1e-12 {
        return Err(LFuncError::ParameterOutOfDomain(
            "character must be non-principal (values must sum to zero)".into(),
        ));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, &v) in values.iter().enumerate().skip(1) {
        if v != 0.0 {
            acc += hurwitz_zeta_deflated(s, a as f64 / q as f64)? * v;
        }
    }
    Ok(acc * (-s * (q as f64).ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const CATALAN: f64 = 0.915_965_594_177_219_0;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_real_values() {
        let cases = [
            (2.0, PI * PI / 6.0),
            (4.0, PI.powi(4) / 90.0),
            (3.0, 1.202_056_903_159_594_3),
            (0.5, -1.460_354_508_809_586_8),
            (0.0, -0.5),
            (-0.5, -0.207_886_224_977_354_57),
        ];
        for (s, expect) in cases {
            let got = zeta(c(s, 0.0)).unwrap();
            assert!(
                (got.re - expect).abs() < 1e-13 && got.im.abs() < 1e-13,
                "zeta({s}) = {got}, want {expect}"
            );
        }
    }

    #[test]
    fn deflation_is_smooth_through_the_pole() {
        // zeta(s) - 1/(s-1) -> Euler's constant as s -> 1.
        let gamma = 0.577_215_664_901_532_9;
        for eps in [0.0, 1e-9, -1e-9, 1e-3] {
            let d = hurwitz_zeta_deflated(c(1.0 + eps, 0.0), 1.0).unwrap();
            assert!((d.re - gamma).abs() < 1e-3_f64.max(eps.abs() * 2.0), "eps={eps}: {d}");
        }
        let d = hurwitz_zeta_deflated(c(1.0, 0.0), 1.0).unwrap();
        assert!((d.re - gamma).abs() < 1e-13);
    }

    #[test]
    fn hurwitz_half_identity() {
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        for s in [c(2.5, 0.0), c(0.7, 3.0), c(3.0, -11.5), c(1.2, 40.0)] {
            let lhs = hurwitz_zeta_deflated(s, 0.5).unwrap() + (s - 1.0).finv();
            let z = zeta(s).unwrap();
            let rhs = ((s * 2.0_f64.ln()).exp() - 1.0) * z;
            assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0), "s={s}");
        }
    }

    #[test]
    fn hurwitz_quarter_trigamma_value() {
        // zeta(2, 1/4) = pi^2 + 8 * Catalan
        let got = hurwitz_zeta_deflated(c(2.0, 0.0), 0.25).unwrap() + 1.0;
        let expect = PI * PI + 8.0 * CATALAN;
        assert!((got.re - expect).abs() < 1e-11, "{got} vs {expect}");
    }

    #[test]
    fn zeta_star_is_one_at_both_special_points() {
        assert!((zeta_star(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-13);
        // zeta_star(0) = -1 * zeta(0) = 1/2
        assert!((zeta_star(c(0.0, 0.0)).unwrap() - 0.5).norm() < 1e-13);
    }

    #[test]
    fn first_zeta_zero_on_the_critical_line() {
        let t0 = 14.134_725_141_734_695;
        let v = zeta(c(0.5, t0)).unwrap();
        assert!(v.norm() < 1e-10, "|zeta(1/2 + i t0)| = {}", v.norm());
        // and it is a sign change of the real-rotated value nearby, not a dip
        let lo = zeta(c(0.5, t0 - 0.05)).unwrap().norm();
        let hi = zeta(c(0.5, t0 + 0.05)).unwrap().norm();
        assert!(lo > 1e-2 && hi > 1e-2);
    }

    #[test]
    fn dirichlet_l_classical_values() {
        let chi4 = [0.0, 1.0, 0.0, -1.0];
        let l1 = dirichlet_l(c(1.0, 0.0), 4, &chi4).unwrap();
        assert!((l1.re - PI / 4.0).abs() < 1e-13, "L(1, chi4) = {l1}");
        let l2 = dirichlet_l(c(2.0, 0.0), 4, &chi4).unwrap();
        assert!((l2.re - CATALAN).abs() < 1e-13, "L(2, chi4) = {l2}");

        let chi3 = [0.0, 1.0, -1.0];
        let l1 = dirichlet_l(c(1.0, 0.0), 3, &chi3).unwrap();
        assert!((l1.re - PI / (3.0 * 3.0_f64.sqrt())).abs() < 1e-13);

        let chi8 = [0.0, 1.0, 0.0, -1.0, 0.0, -1.0, 0.0, 1.0];
        let l1 = dirichlet_l(c(1.0, 0.0), 8, &chi8).unwrap();
        let expect = (1.0 + 2.0_f64.sqrt()).ln() / 2.0_f64.sqrt();
        assert!((l1.re - expect).abs() < 1e-13);
    }

    #[test]
    fn dirichlet_l_matches_its_dirichlet_series() {
        let chi4 = [0.0, 1.0, 0.0, -1.0];
        let s = c(3.0, 2.0);
        let mut series = Complex64::new(0.0, 0.0);
        for n in 1..200_000u64 {
            let v = chi4[(n % 4) as usize];
            if v != 0.0 {
                series += (-s * (n as f64).ln()).exp() * v;
            }
        }
        let l = dirichlet_l(s, 4, &chi4).unwrap();
        assert!((l - series).norm() < 1e-9, "{l} vs {series}");
    }

    #[test]
    fn conjugate_symmetry_and_window() {
        let s = c(0.8, 37.0);
        let a = hurwitz_zeta_deflated(s, 0.3).unwrap();
        let b = hurwitz_zeta_deflated(s.conj(), 0.3).unwrap();
        assert!((a - b.conj()).norm() < 1e-12 * a.norm());
        assert!(hurwitz_zeta_deflated(c(0.5, 250.0), 1.0).is_err());
        assert!(hurwitz_zeta_deflated(c(-2.0, 0.0), 1.0).is_err());
        assert!(hurwitz_zeta_deflated(c(2.0, 0.0), -1.0).is_err());
    }
}
