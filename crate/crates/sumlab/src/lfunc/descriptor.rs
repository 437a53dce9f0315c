//! Analytic descriptors of self-dual L-functions: gamma-factor data, root
//! number, pole order, and the local Euler-factor policy, together with the
//! completed-function and spectral-ratio evaluations built on them.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::delta::LambdaTable;
use super::hurwitz::{dirichlet_l, zeta_star};
use super::{validate_omega, LFuncError};
use crate::special::log_gamma;

/// How the inverse Euler factor at each prime is produced.
#[derive(Debug, Clone)]
pub enum LocalPolicy {
    /// `1 - X` at every prime.
    Unit,
    /// `1 - chi(p) X` from a value table indexed by residue class.
    Character { modulus: u64, values: Vec<f64> },
    /// `1 - lambda(p) X + X^2` with the discriminant-form eigenvalues.
    HeckeDelta { table: Arc<LambdaTable> },
    /// Product of the component factors; `names` are the registry names the
    /// components were resolved from.
    Product {
        names: Vec<String>,
        components: Vec<LocalPolicy>,
    },
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl LocalPolicy {
    /// Coefficients `[1, m_1, ..., m_d]` of the inverse Euler factor at `p`.
    pub fn inverse_coefficients(&self, p: u64) -> Vec<f64> {
        match self {
            LocalPolicy::Unit => vec![1.0, -1.0],
            LocalPolicy::Character { modulus, values } => {
                vec![1.0, -values[(p % modulus) as usize]]
            }
            LocalPolicy::HeckeDelta { table } => vec![1.0, -table.lambda(p), 1.0],
            LocalPolicy::Product { components, .. } => {
                let mut acc = vec![1.0];
                for c in components {
                    acc = poly_mul(&acc, &c.inverse_coefficients(p));
                }
                acc
            }
        }
    }

    fn degree(&self) -> usize {
        match self {
            LocalPolicy::Unit | LocalPolicy::Character { .. } => 1,
            LocalPolicy::HeckeDelta { .. } => 2,
            LocalPolicy::Product { components, .. } => components.iter().map(|c| c.degree()).sum(),
        }
    }

    fn unit_count(&self) -> usize {
        match self {
            LocalPolicy::Unit => 1,
            LocalPolicy::Product { components, .. } => {
                components.iter().map(|c| c.unit_count()).sum()
            }
            _ => 0,
        }
    }

    /// `prod_j (s - 1)^{r_j} L_j(s)` over the components: the L-value with
    /// every zeta-component pole deflated away.
    fn l_star_value(&self, s: Complex64) -> Result<Complex64, LFuncError> {
        match self {
            LocalPolicy::Unit => zeta_star(s),
            LocalPolicy::Character { modulus, values } => dirichlet_l(s, *modulus, values),
            LocalPolicy::HeckeDelta { table } => delta_l_series(table, s),
            LocalPolicy::Product { components, .. } => {
                let mut acc = Complex64::new(1.0, 0.0);
                for c in components {
                    acc *= c.l_star_value(s)?;
                }
                Ok(acc)
            }
        }
    }
}

/// Dirichlet series for the degree-two eigenvalue coefficients. Absolute
/// convergence forces a right half-plane; within it the truncation length is
/// chosen from a tail estimate, capped so extreme requests stay affordable.
fn delta_l_series(table: &Arc<LambdaTable>, s: Complex64) -> Result<Complex64, LFuncError> {
    if s.re < 2.5 {
        return Err(LFuncError::AccuracyWindowExceeded {
            what: format!("eigenvalue Dirichlet series at s = {s} (need Re s >= 2.5)"),
        });
    }
    let mut m = 4096usize;
    while 3.0 * (m as f64).ln() * (m as f64).powf(1.0 - s.re) > 1e-12 && m < (1 << 18) {
        m *= 2;
    }
    table.ensure(m);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in (1..=m as u64).rev() {
        let l = table.lambda(n);
        if l != 0.0 {
            acc += (-s * (n as f64).ln()).exp() * l;
        }
    }
    Ok(acc)
}

/// Complete analytic data for one self-dual L-function.
#[derive(Debug, Clone)]
pub struct LFunctionDescriptor {
    pub name: String,
    pub degree: usize,
    pub conductor: u64,
    pub kappa: Vec<Complex64>,
    pub pole_order: usize,
    pub epsilon: f64,
    pub local: LocalPolicy,
}

impl LFunctionDescriptor {
    /// Internal-consistency checks; registry loading calls this on every
    /// entry so malformed descriptors surface at parse time.
    pub fn validate(&self) -> Result<(), LFuncError> {
        let fail = |msg: String| Err(LFuncError::BadDescriptor {
            name: self.name.clone(),
            message: msg,
        });
        if self.name.is_empty() {
            return fail("empty name".into());
        }
        if self.degree == 0 || self.degree != self.kappa.len() {
            return fail(format!(
                "degree {} must match the number of gamma shifts {}",
                self.degree,
                self.kappa.len()
            ));
        }
        if self.degree != self.local.degree() {
            return fail(format!(
                "degree {} does not match the local factor degree {}",
                self.degree,
                self.local.degree()
            ));
        }
        if self.conductor == 0 {
            return fail("conductor must be positive".into());
        }
        if self.epsilon != 1.0 && self.epsilon != -1.0 {
            return fail(format!("root number must be +1 or -1, got {}", self.epsilon));
        }
        if self.pole_order != self.local.unit_count() {
            return fail(format!(
                "pole order {} must equal the number of zeta components {}",
                self.pole_order,
                self.local.unit_count()
            ));
        }
        if self.kappa.iter().any(|k| k.re < 0.0) {
            return fail("gamma shifts must have nonnegative real part".into());
        }
        validate_characters(&self.name, &self.local)?;
        Ok(())
    }

    /// Closure handing the inverse Euler factor at each prime to the
    /// coefficient-table builder.
    pub fn local_inverse_fn(&self) -> Box<dyn Fn(u64) -> Vec<f64> + Send + Sync> {
        let policy = self.local.clone();
        Box::new(move |p| policy.inverse_coefficients(p))
    }

    /// `(s-1)^r L(f, s)`, entire in the supported window.
    pub fn l_star(&self, s: Complex64) -> Result<Complex64, LFuncError> {
        self.local.l_star_value(s)
    }

    /// `L(f, s)`; errors at the pole when the descriptor has one.
    pub fn l_value(&self, s: Complex64) -> Result<Complex64, LFuncError> {
        let star = self.l_star(s)?;
        if self.pole_order == 0 {
            return Ok(star);
        }
        let den = (s - 1.0).powu(self.pole_order as u32);
        if den.norm() == 0.0 {
            return Err(LFuncError::ParameterOutOfDomain(format!(
                "L({}, s) has a pole of order {} at s = 1",
                self.name, self.pole_order
            )));
        }
        Ok(star / den)
    }

    /// `log` of the archimedean factor `pi^{-ds/2} prod_j Gamma((s + kappa_j)/2)`.
    pub fn log_gamma_factor(&self, s: Complex64) -> Result<Complex64, LFuncError> {
        let mut acc = s * (-0.5 * self.degree as f64 * PI.ln());
        for &k in &self.kappa {
            acc += log_gamma((s + k) * 0.5)?;
        }
        Ok(acc)
    }

    /// Completed function with pole factors cleared:
    /// `s^r (s-1)^r conductor^{s/2} gamma(f, s) L(f, s)`, entire and (for
    /// these descriptors) satisfying `xi(s) = epsilon xi(1 - s)`.
    pub fn xi(&self, s: Complex64) -> Result<Complex64, LFuncError> {
        let lg = self.log_gamma_factor(s)?;
        let lq = (self.conductor as f64).ln();
        Ok(s.powu(self.pole_order as u32) * (s * (0.5 * lq) + lg).exp() * self.l_star(s)?)
    }

    /// The ratio `xi(f, s - omega) / xi(f, s + omega)`, evaluated in factored
    /// form: conductor and gamma parts in log space, the L-parts through the
    /// deflated star values, and the pole factors as an explicit rational
    /// function. Refuses rather than divides when the denominator sits on
    /// top of an L-zero.
    pub fn theta_ratio(&self, s: Complex64, omega: f64) -> Result<Complex64, LFuncError> {
        validate_omega(omega)?;
        let num = self.l_star(s - omega)?;
        let den = self.l_star(s + omega)?;
        if den.norm() < 1e-13 {
            return Err(LFuncError::DivisionNearZero {
                at: s + omega,
                magnitude: den.norm(),
            });
        }
        let mut log_gamma_ratio = Complex64::new(self.degree as f64 * omega * PI.ln(), 0.0);
        for &k in &self.kappa {
            log_gamma_ratio +=
                log_gamma((s - omega + k) * 0.5)? - log_gamma((s + omega + k) * 0.5)?;
        }
        let rational = if self.pole_order > 0 {
            ((s - omega) / (s + omega)).powu(self.pole_order as u32)
        } else {
            Complex64::new(1.0, 0.0)
        };
        let conductor_part = (self.conductor as f64).powf(-omega);
        Ok(rational * conductor_part * log_gamma_ratio.exp() * num / den)
    }
}

fn validate_characters(name: &str, policy: &LocalPolicy) -> Result<(), LFuncError> {
    let fail = |msg: String| Err(LFuncError::BadDescriptor {
        name: name.to_string(),
        message: msg,
    });
    match policy {
        LocalPolicy::Character { modulus, values } => {
            let q = *modulus as usize;
            if q < 2 || values.len() != q {
                return fail(format!(
                    "character table must have one entry per residue class mod {q}"
                ));
            }
            if values.iter().any(|v| *v != 0.0 && *v != 1.0 && *v != -1.0) {
                return fail("self-dual character values must be -1, 0, or 1".into());
            }
            if values.iter().sum::<f64>() != 0.0 {
                return fail("character must be non-principal".into());
            }
            for a in 0..q as u64 {
                let coprime = gcd(a, *modulus) == 1;
                if coprime == (values[a as usize] == 0.0) {
                    return fail(format!("character must vanish exactly off units (a = {a})"));
                }
            }
            for a in 1..q as u64 {
                for b in 1..q as u64 {
                    let lhs = values[((a * b) % modulus) as usize];
                    let rhs = values[a as usize] * values[b as usize];
                    if lhs != rhs {
                        return fail(format!("character is not multiplicative at ({a}, {b})"));
                    }
                }
            }
            Ok(())
        }
        LocalPolicy::Product { components, .. } => {
            for c in components {
                validate_characters(name, c)?;
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunc::Registry;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn xi_of_zeta_is_one_at_the_edge() {
        let reg = Registry::builtin();
        let zeta = reg.get("zeta").unwrap();
        let v = zeta.xi(c(1.0, 0.0)).unwrap();
        assert!((v - 1.0).norm() < 1e-12, "xi(1) = {v}");
    }

    #[test]
    fn functional_equation_on_random_points() {
        let reg = Registry::builtin();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_fe);
        for name in ["zeta", "chi4", "chi3", "chi8", "zeta_chi4"] {
            let f = reg.get(name).unwrap();
            for _ in 0..25 {
                let s = c(rng.gen_range(-0.4..1.4), rng.gen_range(-30.0..30.0));
                let lhs = f.xi(s).unwrap();
                let rhs = f.xi(Complex64::new(1.0, 0.0) - s).unwrap() * f.epsilon;
                assert!(
                    (lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1e-300),
                    "{name} at s = {s}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn theta_at_the_center_is_the_root_number() {
        let reg = Registry::builtin();
        for name in ["zeta", "chi4", "chi3", "chi8", "zeta_chi4"] {
            let f = reg.get(name).unwrap();
            for omega in [0.05, 0.25, 0.45] {
                let v = f.theta_ratio(c(0.5, 0.0), omega).unwrap();
                assert!(
                    (v - f.epsilon).norm() < 1e-11,
                    "{name}, omega {omega}: {v}"
                );
            }
        }
    }

    #[test]
    fn theta_is_unimodular_on_the_critical_line() {
        let reg = Registry::builtin();
        for name in ["zeta", "chi4", "zeta_chi4"] {
            let f = reg.get(name).unwrap();
            for t in [0.3, 2.0, 9.25, 21.0] {
                let v = f.theta_ratio(c(0.5, t), 0.25).unwrap();
                assert!(
                    (v.norm() - 1.0).abs() < 1e-11,
                    "{name} at t = {t}: |theta| = {}",
                    v.norm()
                );
            }
        }
    }

    #[test]
    fn theta_decays_along_a_right_line() {
        let reg = Registry::builtin();
        let f = reg.get("zeta").unwrap();
        let omega = 0.25;
        let m10 = f.theta_ratio(c(3.0, 10.0), omega).unwrap().norm();
        let m40 = f.theta_ratio(c(3.0, 40.0), omega).unwrap().norm();
        let m80 = f.theta_ratio(c(3.0, 80.0), omega).unwrap().norm();
        assert!(m10 > m40 && m40 > m80);
        // With the oscillating L-ratio divided out, the remaining modulus
        // approaches (2 pi)^{d omega} |t|^{-d omega} with an O(1/t) defect.
        for t in [40.0, 80.0] {
            let s = c(3.0, t);
            let theta = f.theta_ratio(s, omega).unwrap();
            let gamma_part =
                theta * f.l_star(s + omega).unwrap() / f.l_star(s - omega).unwrap();
            let predicted = (2.0 * PI).powf(omega) * t.powf(-omega);
            let rel = (gamma_part.norm() - predicted).abs() / predicted;
            assert!(rel < 2.0 / t, "t = {t}: defect {rel}");
        }
    }

    #[test]
    fn theta_refuses_to_divide_by_an_l_zero() {
        let reg = Registry::builtin();
        let f = reg.get("zeta").unwrap();
        let t0 = 14.134_725_141_734_695;
        let omega = 0.25;
        let r = f.theta_ratio(c(0.5 - omega, t0), omega);
        assert!(
            matches!(r, Err(LFuncError::DivisionNearZero { .. })),
            "expected a near-zero refusal, got {r:?}"
        );
    }

    #[test]
    fn delta_theta_matches_the_classical_shape() {
        // Against the single-Gamma form (2 pi)^{2 omega}
        //   * Gamma(s - omega + 11/2) / Gamma(s + omega + 11/2)
        //   * L(s - omega) / L(s + omega),
        // which is equivalent through the duplication identity.
        let reg = Registry::builtin();
        let f = reg.get("delta").unwrap();
        let omega = 0.45;
        for s in [c(3.25, 0.0), c(3.0, 1.5)] {
            let ours = f.theta_ratio(s, omega).unwrap();
            let lnum = f.l_star(s - omega).unwrap();
            let lden = f.l_star(s + omega).unwrap();
            let g = (log_gamma(s - omega + 5.5).unwrap() - log_gamma(s + omega + 5.5).unwrap())
                .exp();
            let classical = (2.0 * PI).powf(2.0 * omega) * g * lnum / lden;
            assert!(
                (ours - classical).norm() < 1e-9 * classical.norm(),
                "s = {s}: {ours} vs {classical}"
            );
        }
    }

    #[test]
    fn product_locals_multiply() {
        let reg = Registry::builtin();
        let f = reg.get("zeta_chi4").unwrap();
        assert_eq!(f.local.inverse_coefficients(5), vec![1.0, -2.0, 1.0]);
        assert_eq!(f.local.inverse_coefficients(3), vec![1.0, 0.0, -1.0]);
        assert_eq!(f.local.inverse_coefficients(2), vec![1.0, -1.0, 0.0]);
    }

    #[test]
    fn validation_rejects_inconsistent_descriptors() {
        let reg = Registry::builtin();
        let mut bad = reg.get("zeta").unwrap().clone();
        bad.pole_order = 0;
        assert!(bad.validate().is_err());

        let mut bad = reg.get("chi4").unwrap().clone();
        bad.epsilon = 0.5;
        assert!(bad.validate().is_err());

        let mut bad = reg.get("chi4").unwrap().clone();
        bad.local = LocalPolicy::Character {
            modulus: 4,
            values: vec![0.0, 1.0, 0.0, 1.0],
        };
        assert!(bad.validate().is_err());
    }
}
