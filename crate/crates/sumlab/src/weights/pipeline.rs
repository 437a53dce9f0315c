use super::convolve::mult_convolve;
use super::grid::{GridFn, STANDARD_CELLS, STANDARD_XI_LO};
use super::WeightError;
use crate::lfunc::{validate_omega, LFunctionDescriptor};
use crate::special::{
    gamma_real, integrate, integrate_complex_line, integrate_weighted, log_gamma,
    QuadratureSpec,
};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Density part of the pole-compensating measure: the measure itself is a
/// unit mass at `x = 1` plus this absolutely continuous remainder on `(0, 1)`.
fn rho_density(x: f64, omega: f64) -> f64 {
    -2.0 * omega
        * ((1.0 - 2.0 * omega) * x.powf(omega - 1.0) + (1.0 + 2.0 * omega) * x.powf(omega))
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut b = 1.0;
    for j in 0..k {
        b = b * (n - j) as f64 / (j + 1) as f64;
    }
    b
}

/// Grid-backed evaluator for the smoothing kernels `g^{<k>}` of one
/// L-function at one interior parameter `omega`.
///
/// Construction assembles the base kernel as a multiplicative convolution of
/// the per-gamma-factor profiles, folds in the pole-compensating measure once
/// per pole order, and then integrates level by level up to `k_max`. Each
/// level lives on the standard grid as a regularized profile; evaluation
/// below the grid floor falls back to direct quadrature against the same
/// kernels, so the function is defined on all of `(0, 1]`.
pub struct WeightEvaluator {
    name: String,
    omega: f64,
    kappa: Vec<f64>,
    pole_order: usize,
    chain: GridFn,
    grids: Vec<GridFn>,
}

impl WeightEvaluator {
    pub fn build(
        descriptor: &LFunctionDescriptor,
        omega: f64,
        k_max: usize,
    ) -> Result<Self, WeightError> {
        validate_omega(omega).map_err(WeightError::from)?;
        let mut kappa = Vec::with_capacity(descriptor.kappa.len());
        for k in &descriptor.kappa {
            if k.im != 0.0 {
                return Err(WeightError::ParameterOutOfDomain(format!(
                    "weight kernels need real gamma shifts, got {k}"
                )));
            }
            if k.re <= omega - 0.5 {
                return Err(WeightError::ParameterOutOfDomain(format!(
                    "gamma shift {} too small for omega = {omega}",
                    k.re
                )));
            }
            kappa.push(k.re);
        }
        if kappa.is_empty() {
            return Err(WeightError::ParameterOutOfDomain(
                "a weight kernel needs at least one gamma factor".into(),
            ));
        }

        let factor_norm = 2.0 * PI.powf(omega) / gamma_real(omega)?;
        let mut chain: Option<GridFn> = None;
        for &kap in &kappa {
            let factor = GridFn::from_fn(STANDARD_XI_LO, STANDARD_CELLS, omega - 1.0, |xi| {
                factor_norm * ((kap - omega) * xi).exp()
            });
            chain = Some(match chain {
                None => factor,
                Some(prev) => mult_convolve(&factor, &prev)?,
            });
        }
        let chain = chain.unwrap();

        let r = descriptor.pole_order;
        let g0 = if r == 0 {
            chain.clone()
        } else {
            let rho = GridFn::from_fn(STANDARD_XI_LO, STANDARD_CELLS, 0.0, |xi| {
                rho_density(xi.exp(), omega)
            });
            let mut terms: Vec<(GridFn, f64)> = vec![(chain.clone(), 1.0)];
            let mut rho_power = rho.clone();
            for j in 1..=r {
                terms.push((mult_convolve(&rho_power, &chain)?, binomial(r, j)));
                if j < r {
                    rho_power = mult_convolve(&rho_power, &rho)?;
                }
            }
            let borrowed: Vec<(&GridFn, f64)> =
                terms.iter().map(|(g, c)| (g, *c)).collect();
            GridFn::linear_combination(chain.reg_exp(), &borrowed)?
        };

        let mut grids = vec![g0];
        for _ in 0..k_max {
            let next = level_up(grids.last().unwrap())?;
            grids.push(next);
        }

        Ok(WeightEvaluator {
            name: descriptor.name.clone(),
            omega,
            kappa,
            pole_order: r,
            chain,
            grids,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn degree(&self) -> usize {
        self.kappa.len()
    }

    pub fn pole_order(&self) -> usize {
        self.pole_order
    }

    pub fn k_max(&self) -> usize {
        self.grids.len() - 1
    }

    pub fn grid(&self, k: usize) -> Result<&GridFn, WeightError> {
        self.grids.get(k).ok_or(WeightError::UnsupportedLevel {
            k,
            max: self.k_max(),
        })
    }

    /// `g^{<k>}(x)` for any `x > 0`: zero above the support, grid
    /// interpolation on the standard range, direct quadrature below it.
    pub fn eval(&self, k: usize, x: f64) -> Result<f64, WeightError> {
        let grid = self.grid(k)?;
        match grid.eval(x) {
            Err(WeightError::BelowGridFloor { .. }) => self.eval_below_floor(k, x),
            other => other,
        }
    }

    /// Exact Mellin transform of `g^{<k>}`: the per-factor gamma ratios, one
    /// rational pole factor per pole order, and `(s - 1/2)^{-k}` from the
    /// level-up integrations. Meromorphic in `s`, no grid involved.
    pub fn mellin(&self, k: usize, s: Complex64) -> Result<Complex64, WeightError> {
        let omega = self.omega;
        let mut log_ratio = Complex64::new(self.degree() as f64 * omega * PI.ln(), 0.0);
        for &kap in &self.kappa {
            log_ratio += log_gamma((s + kap - omega) * 0.5)?;
            log_ratio -= log_gamma((s + kap + omega) * 0.5)?;
        }
        let mut m = log_ratio.exp();
        if self.pole_order > 0 {
            let rational = ((s - omega) * (s - omega - 1.0))
                / ((s + omega) * (s + omega - 1.0));
            m *= rational.powu(self.pole_order as u32);
        }
        if k > 0 {
            m /= (s - 0.5).powu(k as u32);
        }
        Ok(m)
    }

    /// Mellin transform computed from the stored grid, with a crude bound on
    /// the truncated tail below the grid floor. Exists to be checked against
    /// [`Self::mellin`], not to replace it.
    pub fn mellin_from_grid(
        &self,
        k: usize,
        s: Complex64,
    ) -> Result<(Complex64, f64), WeightError> {
        let grid = self.grid(k)?;
        let spec = QuadratureSpec::with_tol(1e-12, 1e-30).hi(grid.reg_exp());
        let quad = integrate_complex_line(
            |xi: f64| (s * xi).exp() * grid.eval_xi(xi),
            grid.xi_lo(),
            0.0,
            &spec,
        )?;
        let kappa_min = self.kappa.iter().cloned().fold(f64::INFINITY, f64::min);
        let decay = s.re + kappa_min - self.omega;
        let tail = if decay > 0.0 {
            let edge = grid.eval_xi(grid.xi_lo()).abs();
            let log_growth =
                (1.0 + grid.xi_lo().abs()).powi((k + self.pole_order) as i32);
            edge * (grid.xi_lo() * s.re).exp() * log_growth / decay
        } else {
            f64::INFINITY
        };
        Ok((quad.value, tail))
    }

    /// Cumulative power moments `a -> \int_a^1 g^{<k>}(v) v^{s-1} dv` for one
    /// fixed real `s`, precomputed as suffix sums over the grid cells.
    pub fn power_cumulative(&self, k: usize, s: f64) -> Result<PowerCumulative, WeightError> {
        let grid = self.grid(k)?.clone();
        let n = grid.n_cells();
        let cells = cell_integrals(&grid, s)?;
        let mut suffix = vec![0.0; n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] + cells[i];
        }
        Ok(PowerCumulative { grid, s, suffix })
    }

    fn eval_below_floor(&self, k: usize, x: f64) -> Result<f64, WeightError> {
        let xi_x = x.ln();
        if k == 0 {
            return self.g0_direct(x);
        }
        let base = &self.grids[0];
        let order = (k - 1) as i32;
        let spec = QuadratureSpec::with_tol(1e-11, 1e-30);
        let outer = |xi: f64| -> Result<f64, WeightError> {
            Ok((0.5 * xi).exp() * self.g0_direct(xi.exp())? * (xi - xi_x).powi(order))
        };
        // The direct stretch cannot use `?` inside the integrator closure, so
        // sample through a shim that records the first failure. The stretch
        // is signed: above the floor it subtracts the doubly covered range.
        let mut failure: Option<WeightError> = None;
        let mut shim = |xi: f64| match outer(xi) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        };
        let part_direct = if xi_x <= STANDARD_XI_LO {
            integrate(&mut shim, xi_x, STANDARD_XI_LO, &spec)
                .map(|q| q.value)
        } else {
            integrate(&mut shim, STANDARD_XI_LO, xi_x, &spec)
                .map(|q| -q.value)
        };
        if let Some(e) = failure {
            return Err(e);
        }
        let part_direct = part_direct?;
        let spec_grid = QuadratureSpec::with_tol(1e-11, 1e-30).hi(base.reg_exp());
        let part_grid = integrate(
            |xi: f64| (0.5 * xi).exp() * base.eval_xi(xi) * (xi - xi_x).powi(order),
            STANDARD_XI_LO,
            0.0,
            &spec_grid,
        )?
        .value;
        let mut fact = 1.0;
        for j in 1..k {
            fact *= j as f64;
        }
        Ok((-0.5 * xi_x).exp() * (part_direct + part_grid) / fact)
    }

    /// Base kernel by direct quadrature against exact factor kernels; valid
    /// for any `x` in `(0, 1)`, used below the grid floor.
    fn g0_direct(&self, x: f64) -> Result<f64, WeightError> {
        let omega = self.omega;
        let d = self.degree();
        let mut value = self.chain_direct(x)?;
        if self.pole_order >= 2 {
            return Err(WeightError::ParameterOutOfDomain(
                "pole order >= 2 is not supported below the grid floor".into(),
            ));
        }
        if self.pole_order == 1 {
            let alpha = d as f64 * omega - 1.0;
            let spec = QuadratureSpec::with_tol(1e-11, 1e-30);
            let mut failure: Option<WeightError> = None;
            let quad = integrate_weighted(
                |y: f64| {
                    let v = x / y;
                    match self.chain_reg_any(v) {
                        Ok(reg) => {
                            reg * ((y + x) / (y * y)).powf(alpha) * rho_density(y, omega) / y
                        }
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::NAN
                        }
                    }
                },
                x,
                1.0,
                alpha,
                0.0,
                &spec,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            value += quad?.value;
        }
        Ok(value)
    }

    /// The pure gamma-factor chain at `x`, exact for degree one and a single
    /// weighted quadrature for degree two.
    fn chain_direct(&self, x: f64) -> Result<f64, WeightError> {
        let omega = self.omega;
        let norm = 2.0 * PI.powf(omega) / gamma_real(omega)?;
        match self.kappa.as_slice() {
            [k0] => Ok(norm * x.powf(k0 - omega) * (1.0 - x * x).powf(omega - 1.0)),
            [k0, k1] => {
                let spec = QuadratureSpec::with_tol(1e-11, 1e-30);
                let quad = integrate_weighted(
                    |y: f64| {
                        let u = x / y;
                        norm * norm
                            * u.powf(k0 - omega)
                            * ((y + x) / (y * y)).powf(omega - 1.0)
                            * y.powf(k1 - omega)
                            * (1.0 + y).powf(omega - 1.0)
                            / y
                    },
                    x,
                    1.0,
                    omega - 1.0,
                    omega - 1.0,
                    &spec,
                )?;
                Ok(quad.value)
            }
            _ => Err(WeightError::ParameterOutOfDomain(
                "degree > 2 is not supported below the grid floor".into(),
            )),
        }
    }

    /// Regularized chain value `chain(v) (1 - v^2)^{1 - d omega}` anywhere in
    /// `(0, 1]`: grid interpolation on range, direct quadrature below it
    /// (where `1 - v^2` is far from zero, so the division is harmless).
    fn chain_reg_any(&self, v: f64) -> Result<f64, WeightError> {
        let xi = v.ln();
        if xi >= STANDARD_XI_LO {
            Ok(self.chain.reg_at(xi.min(0.0)))
        } else {
            Ok(self.chain_direct(v)? * (1.0 - v * v).powf(-self.chain.reg_exp()))
        }
    }
}

/// One integration level: `g^{<k>}(x) = x^{-1/2} \int_x^1 y^{-1/2} g^{<k-1>}(y) dy`,
/// realized as suffix sums of per-cell integrals in `xi = log y` so that all
/// node values of the next level come out of one pass.
fn level_up(prev: &GridFn) -> Result<GridFn, WeightError> {
    let n = prev.n_cells();
    let out_reg = prev.reg_exp() + 1.0;
    let cells = cell_integrals(prev, 0.5)?;
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + cells[i];
    }
    let mut values: Vec<f64> = (0..n)
        .map(|i| {
            let xi = prev.node_xi(i);
            let t = -(2.0 * xi).exp_m1();
            (-0.5 * xi).exp() * suffix[i] * t.powf(-out_reg)
        })
        .collect();
    values.push(prev.reg_at_one() / (2.0 * out_reg));
    Ok(GridFn::from_values(prev.xi_lo(), out_reg, values))
}

/// Per-cell integrals `\int e^{s xi} f(e^xi) d xi` across the grid; the last
/// cell declares the endpoint power so the kink at `xi = 0` costs nothing.
fn cell_integrals(grid: &GridFn, s: f64) -> Result<Vec<f64>, WeightError> {
    let n = grid.n_cells();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let spec = if i == n - 1 {
                QuadratureSpec::with_tol(1e-12, 1e-300).hi(grid.reg_exp())
            } else {
                QuadratureSpec::with_tol(1e-12, 1e-300)
            };
            let quad = integrate(
                |xi: f64| (s * xi).exp() * grid.eval_xi(xi),
                grid.node_xi(i),
                grid.node_xi(i + 1),
                &spec,
            )?;
            Ok(quad.value)
        })
        .collect()
}

/// Suffix-sum view of `a -> \int_a^1 g(v) v^{s-1} dv` for one grid profile.
pub struct PowerCumulative {
    grid: GridFn,
    s: f64,
    suffix: Vec<f64>,
}

impl PowerCumulative {
    pub fn s(&self) -> f64 {
        self.s
    }

    /// The cumulative integral from `a` to the support edge.
    pub fn eval(&self, a: f64) -> Result<f64, WeightError> {
        if a >= 1.0 {
            return Ok(0.0);
        }
        if !(a > 0.0) {
            return Err(WeightError::ParameterOutOfDomain(format!(
                "cumulative moment needs a > 0, got {a}"
            )));
        }
        let xi_a = a.ln();
        if xi_a < self.grid.xi_lo() {
            return Err(WeightError::BelowGridFloor { x: a });
        }
        let n = self.grid.n_cells();
        let h = self.grid.spacing();
        let i = (((xi_a - self.grid.xi_lo()) / h).floor() as usize).min(n - 1);
        let edge = self.grid.node_xi(i + 1);
        let spec = if i == n - 1 {
            QuadratureSpec::with_tol(1e-12, 1e-30).hi(self.grid.reg_exp())
        } else {
            QuadratureSpec::with_tol(1e-12, 1e-30)
        };
        let s = self.s;
        let partial = integrate(
            |xi: f64| (s * xi).exp() * self.grid.eval_xi(xi),
            xi_a,
            edge,
            &spec,
        )?
        .value;
        Ok(partial + self.suffix[i + 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunc::Registry;
    use crate::weights::{g_char_closed, g_zeta_closed};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn registry() -> Registry {
        Registry::builtin()
    }

    #[test]
    fn zeta_pipeline_reproduces_the_closed_form() {
        let reg = registry();
        let zeta = reg.get("zeta").unwrap();
        for &omega in &[0.1, 0.25, 0.4] {
            let ev = WeightEvaluator::build(zeta, omega, 1).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(0x9e7a + omega.to_bits() as u64);
            for _ in 0..40 {
                let x: f64 = rng.gen_range(0.02..0.98);
                let got = ev.eval(1, x).unwrap();
                let want = g_zeta_closed(x, omega).unwrap();
                assert!(
                    (got - want).abs() <= 1e-8 * want.abs().max(1e-3),
                    "omega = {omega}, x = {x}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn character_pipeline_reproduces_the_closed_form() {
        let reg = registry();
        for (name, omega, delta) in [("chi4", 0.25, 1), ("chi8", 0.1, 0)] {
            let ev = WeightEvaluator::build(reg.get(name).unwrap(), omega, 1).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(0xc4a5);
            for _ in 0..40 {
                let x: f64 = rng.gen_range(0.02..0.98);
                let got = ev.eval(1, x).unwrap();
                let want = g_char_closed(x, omega, delta).unwrap();
                assert!(
                    (got - want).abs() <= 1e-8 * want.abs().max(1e-4),
                    "{name}, x = {x}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn grid_mellin_matches_the_exact_transform() {
        let reg = registry();
        let cases = [
            ("zeta", 0.25, Complex64::new(3.0, 0.7)),
            ("chi4", 0.1, Complex64::new(2.5, -1.3)),
            ("zeta_chi4", 0.25, Complex64::new(3.5, 0.4)),
            ("delta", 0.25, Complex64::new(7.0, 0.3)),
        ];
        for (name, omega, s) in cases {
            let ev = WeightEvaluator::build(reg.get(name).unwrap(), omega, 2).unwrap();
            for k in 0..=2 {
                let want = ev.mellin(k, s).unwrap();
                let (got, tail) = ev.mellin_from_grid(k, s).unwrap();
                assert!(
                    (got - want).norm() <= 1e-8 * want.norm() + tail,
                    "{name}, k = {k}: {got} vs {want} (tail {tail:e})"
                );
            }
        }
    }

    #[test]
    fn below_floor_direct_evaluation_agrees_with_the_grid() {
        // The direct-quadrature path is exercised *above* the floor, where
        // the grid provides an independent high-accuracy answer.
        let reg = registry();
        let zeta = reg.get("zeta").unwrap();
        let ev = WeightEvaluator::build(zeta, 0.25, 2).unwrap();
        for (k, x) in [(0, 1e-4), (1, 2e-4), (2, 5e-5)] {
            let grid_val = ev.eval(k, x).unwrap();
            let direct = if k == 0 {
                ev.g0_direct(x).unwrap()
            } else {
                ev.eval_below_floor(k, x).unwrap()
            };
            assert!(
                (grid_val - direct).abs() <= 1e-8 * grid_val.abs().max(1e-12),
                "k = {k}, x = {x}: {grid_val} vs {direct}"
            );
        }

        let chi = reg.get("chi4").unwrap();
        let ev = WeightEvaluator::build(chi, 0.1, 1).unwrap();
        let x = 3e-4;
        let grid_val = ev.eval(1, x).unwrap();
        let direct = ev.eval_below_floor(1, x).unwrap();
        assert!((grid_val - direct).abs() <= 1e-8 * grid_val.abs());

        // And genuinely below the floor the value must connect continuously.
        let floor = ev.grid(1).unwrap().floor();
        let lo = ev.eval(1, floor * 0.97).unwrap();
        let hi = ev.eval(1, floor * 1.03).unwrap();
        assert!(
            (lo - hi).abs() <= 0.08 * hi.abs(),
            "jump across the floor: {lo} vs {hi}"
        );
    }

    #[test]
    fn staged_degree_two_kernel_agrees_with_direct_quadrature() {
        let reg = registry();
        let prod = reg.get("zeta_chi4").unwrap();
        let ev = WeightEvaluator::build(prod, 0.2, 0).unwrap();
        for &x in &[0.05, 0.4, 0.9] {
            let got = ev.eval(0, x).unwrap();
            let want = ev.g0_direct(x).unwrap();
            assert!(
                (got - want).abs() <= 1e-8 * want.abs().max(1e-10),
                "x = {x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn cumulative_moments_match_direct_integrals() {
        let reg = registry();
        let zeta = reg.get("zeta").unwrap();
        let ev = WeightEvaluator::build(zeta, 0.25, 1).unwrap();
        let cum = ev.power_cumulative(1, 3.0).unwrap();
        let grid = ev.grid(1).unwrap();
        for &a in &[0.3, 0.05, 0.9, 0.9999] {
            let got = cum.eval(a).unwrap();
            let spec = QuadratureSpec::with_tol(1e-13, 1e-18).hi(grid.reg_exp());
            let want = integrate(
                |xi: f64| (3.0 * xi).exp() * grid.eval_xi(xi),
                a.ln(),
                0.0,
                &spec,
            )
            .unwrap()
            .value;
            assert!(
                (got - want).abs() <= 1e-10 * want.abs().max(1e-14),
                "a = {a}: {got} vs {want}"
            );
        }
        assert_eq!(cum.eval(1.0).unwrap(), 0.0);
        assert_eq!(cum.eval(2.0).unwrap(), 0.0);
    }

    #[test]
    fn endpoint_limits_follow_the_level_recurrence() {
        let reg = registry();
        let ev = WeightEvaluator::build(reg.get("delta").unwrap(), 0.3, 3).unwrap();
        let d_omega = 2.0 * 0.3;
        // REG_0(1) = 2 pi^{d omega} / Gamma(d omega), then each level divides
        // by 2 (d omega + k).
        let mut want = 2.0 * PI.powf(d_omega) / gamma_real(d_omega).unwrap();
        for k in 0..=3 {
            let got = ev.grid(k).unwrap().reg_at_one();
            assert!(
                (got - want).abs() <= 1e-9 * want,
                "k = {k}: {got} vs {want}"
            );
            want /= 2.0 * (d_omega + k as f64);
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let reg = registry();
        let zeta = reg.get("zeta").unwrap();
        assert!(WeightEvaluator::build(zeta, 0.5, 1).is_err());
        assert!(WeightEvaluator::build(zeta, 0.0, 1).is_err());
        let ev = WeightEvaluator::build(zeta, 0.25, 1).unwrap();
        assert!(matches!(
            ev.eval(2, 0.5),
            Err(WeightError::UnsupportedLevel { k: 2, max: 1 })
        ));

        let mut twisted = zeta.clone();
        twisted.kappa = vec![Complex64::new(0.0, 1.0)];
        assert!(matches!(
            WeightEvaluator::build(&twisted, 0.25, 0),
            Err(WeightError::ParameterOutOfDomain(_))
        ));
    }
}
