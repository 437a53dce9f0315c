use super::WeightError;
use rayon::prelude::*;

/// A function on `(0, 1]` stored on a uniform grid in `xi = log x` as a
/// regularized profile.
///
/// The grid holds `REG(xi) = f(x) * t^{-reg_exp}` with `t = 1 - x^2`, so the
/// stored values stay finite and smooth up to `x = 1` even when `f` itself
/// vanishes or blows up there like a fractional power of `t`. Evaluation
/// reconstructs `t` as `-expm1(2 xi)`, which loses nothing near `xi = 0`.
/// Interpolation between nodes is monotone cubic (Fritsch-Carlson slopes),
/// so a profile with a sign-definite trend never picks up spurious wiggles.
#[derive(Debug, Clone)]
pub struct GridFn {
    xi_lo: f64,
    reg_exp: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

/// Left edge of the standard grid in `xi = log x`.
pub const STANDARD_XI_LO: f64 = -12.0;

/// Cell count of the standard grid; the spacing `12 / 2^14` is exactly
/// representable, so the right edge lands on `xi = 0` without rounding.
pub const STANDARD_CELLS: usize = 1 << 14;

impl GridFn {
    /// Samples `reg` at the `n_cells + 1` nodes of a uniform grid on
    /// `[xi_lo, 0]` and fits interpolation slopes. The closure receives the
    /// node's `xi` and must return the *regularized* value, including a
    /// finite limit at `xi = 0`.
    pub fn from_fn<F>(xi_lo: f64, n_cells: usize, reg_exp: f64, reg: F) -> Self
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let h = -xi_lo / n_cells as f64;
        let values: Vec<f64> = (0..=n_cells)
            .into_par_iter()
            .map(|i| {
                let xi = if i == n_cells { 0.0 } else { xi_lo + i as f64 * h };
                reg(xi)
            })
            .collect();
        Self::from_values(xi_lo, reg_exp, values)
    }

    /// Builds a grid function from precomputed node values.
    pub fn from_values(xi_lo: f64, reg_exp: f64, values: Vec<f64>) -> Self {
        assert!(values.len() >= 2, "a grid needs at least one cell");
        assert!(xi_lo < 0.0, "the grid must cover a nontrivial range below xi = 0");
        let slopes = pchip_slopes(&values, -xi_lo / (values.len() - 1) as f64);
        GridFn { xi_lo, reg_exp, values, slopes }
    }

    pub fn xi_lo(&self) -> f64 {
        self.xi_lo
    }

    pub fn n_cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn reg_exp(&self) -> f64 {
        self.reg_exp
    }

    pub fn spacing(&self) -> f64 {
        -self.xi_lo / self.n_cells() as f64
    }

    /// Smallest representable abscissa, `exp(xi_lo)`.
    pub fn floor(&self) -> f64 {
        self.xi_lo.exp()
    }

    pub fn node_xi(&self, i: usize) -> f64 {
        if i == self.n_cells() {
            0.0
        } else {
            self.xi_lo + i as f64 * self.spacing()
        }
    }

    pub fn node_values(&self) -> &[f64] {
        &self.values
    }

    /// Regularized value at `xi = 0`, i.e. the analytic limit of
    /// `f(x) (1-x^2)^{-reg_exp}` as `x -> 1`.
    pub fn reg_at_one(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Interpolates the regularized profile at `xi` in `[xi_lo, 0]`.
    pub fn reg_at(&self, xi: f64) -> f64 {
        debug_assert!(
            xi >= self.xi_lo - 1e-12 && xi <= 1e-12,
            "xi = {xi} outside [{}, 0]",
            self.xi_lo
        );
        let n = self.n_cells();
        let h = self.spacing();
        let pos = (xi - self.xi_lo) / h;
        let i = (pos.floor() as usize).min(n - 1);
        let theta = (pos - i as f64).clamp(0.0, 1.0);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = theta * theta;
        let t3 = t2 * theta;
        v0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + h * m0 * (t3 - 2.0 * t2 + theta)
            + v1 * (3.0 * t2 - 2.0 * t3)
            + h * m1 * (t3 - t2)
    }

    /// Full value `f(e^xi) = REG(xi) * t^{reg_exp}` for `xi` in `[xi_lo, 0]`.
    pub fn eval_xi(&self, xi: f64) -> f64 {
        let t = -(2.0 * xi).exp_m1();
        if t == 0.0 {
            // x = 1 exactly: the power prefactor decides between a finite
            // limit, a zero, and a genuine blow-up.
            return if self.reg_exp == 0.0 {
                self.reg_at_one()
            } else if self.reg_exp > 0.0 {
                0.0
            } else {
                f64::INFINITY * self.reg_at_one().signum()
            };
        }
        self.reg_at(xi) * t.powf(self.reg_exp)
    }

    /// Full value at `x`; `0` above the support, an error below the grid.
    pub fn eval(&self, x: f64) -> Result<f64, WeightError> {
        if !(x > 0.0) {
            return Err(WeightError::ParameterOutOfDomain(format!(
                "grid evaluation needs x > 0, got {x}"
            )));
        }
        if x > 1.0 {
            return Ok(0.0);
        }
        let xi = x.ln();
        if xi < self.xi_lo {
            return Err(WeightError::BelowGridFloor { x });
        }
        Ok(self.eval_xi(xi.min(0.0)))
    }

    /// Forms `sum_j c_j * f_j` on the common grid, expressed at `base_reg`.
    ///
    /// Every term must live on the same grid and carry `reg_exp >= base_reg`;
    /// the surplus power of `t` is folded into the stored values, so terms
    /// that vanish faster at `x = 1` contribute exact zeros there.
    pub fn linear_combination(
        base_reg: f64,
        terms: &[(&GridFn, f64)],
    ) -> Result<GridFn, WeightError> {
        let first = terms
            .first()
            .ok_or_else(|| {
                WeightError::ParameterOutOfDomain("empty linear combination".into())
            })?
            .0;
        let n = first.n_cells();
        let mut values = vec![0.0; n + 1];
        for &(g, c) in terms {
            if g.n_cells() != n || g.xi_lo != first.xi_lo {
                return Err(WeightError::GridResolutionInsufficient(
                    "linear combination requires a shared grid".into(),
                ));
            }
            let excess = g.reg_exp - base_reg;
            if excess < -1e-12 {
                return Err(WeightError::ParameterOutOfDomain(format!(
                    "cannot lower a term from reg_exp {} to {}",
                    g.reg_exp, base_reg
                )));
            }
            for (i, v) in values.iter_mut().enumerate() {
                let xi = g.node_xi(i);
                let t = -(2.0 * xi).exp_m1();
                let scale = if excess.abs() <= 1e-12 { 1.0 } else { t.powf(excess) };
                *v += c * g.values[i] * scale;
            }
        }
        Ok(GridFn::from_values(first.xi_lo, base_reg, values))
    }
}

/// Fritsch-Carlson slopes on a uniform grid: harmonic-mean interior slopes
/// that clamp to zero across local extrema, with limited three-point
/// one-sided estimates at the two ends.
fn pchip_slopes(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    if n == 2 {
        let d = (values[1] - values[0]) / h;
        return vec![d, d];
    }
    let deltas: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    let mut slopes = vec![0.0; n];
    for i in 1..n - 1 {
        let (d0, d1) = (deltas[i - 1], deltas[i]);
        if d0 * d1 > 0.0 {
            slopes[i] = 2.0 * d0 * d1 / (d0 + d1);
        }
    }
    slopes[0] = edge_slope(deltas[0], deltas[1]);
    slopes[n - 1] = edge_slope(deltas[n - 2], deltas[n - 3]);
    slopes
}

fn edge_slope(d_near: f64, d_far: f64) -> f64 {
    let m = (3.0 * d_near - d_far) / 2.0;
    if m * d_near <= 0.0 {
        0.0
    } else if d_near * d_far < 0.0 && m.abs() > 3.0 * d_near.abs() {
        3.0 * d_near
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interpolation_reproduces_a_smooth_profile() {
        let g = GridFn::from_fn(STANDARD_XI_LO, STANDARD_CELLS, 0.0, |xi| (0.7 * xi).exp());
        let mut rng = ChaCha8Rng::seed_from_u64(0x6a11);
        for _ in 0..400 {
            let xi = rng.gen_range(STANDARD_XI_LO..0.0);
            let got = g.reg_at(xi);
            let want = (0.7 * xi).exp();
            assert!(
                (got - want).abs() <= 1e-11 * want.abs().max(1.0),
                "xi = {xi}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn regularization_restores_the_endpoint_power() {
        // f(x) = x^0.3 (1-x^2)^{-0.6}: stored REG is just x^0.3.
        let g = GridFn::from_fn(STANDARD_XI_LO, 4096, -0.6, |xi| (0.3 * xi).exp());
        let mut rng = ChaCha8Rng::seed_from_u64(0x6a12);
        for _ in 0..200 {
            let x: f64 = rng.gen_range(1e-5..1.0_f64);
            let want = x.powf(0.3) * (1.0 - x * x).powf(-0.6);
            let got = g.eval(x).unwrap();
            assert!(
                (got - want).abs() <= 1e-9 * want.abs(),
                "x = {x}: {got} vs {want}"
            );
        }
        // Close enough to 1 that 1 - x^2 in f64 would be pure noise.
        let xi: f64 = -1e-14;
        let want = (-2.0 * xi).powf(-0.6);
        let got = g.eval_xi(xi);
        assert!((got - want).abs() <= 1e-9 * want);
    }

    #[test]
    fn monotone_data_interpolates_monotonically() {
        // A steep profile with a plateau; PCHIP must not overshoot.
        let values: Vec<f64> = (0..=64)
            .map(|i| {
                let s = i as f64 / 64.0;
                if s < 0.5 { 0.0 } else { ((s - 0.5) * 8.0).tanh() }
            })
            .collect();
        let g = GridFn::from_values(-1.0, 0.0, values);
        let mut prev = g.reg_at(-1.0);
        for i in 1..=2048 {
            let xi = -1.0 + i as f64 / 2048.0;
            let v = g.reg_at(xi.min(0.0));
            assert!(v >= prev - 1e-14, "overshoot at xi = {xi}");
            prev = v;
        }
    }

    #[test]
    fn linear_combination_rebases_the_regularization() {
        // t^0.4 + 2 t^1.4 expressed at reg_exp 0.4 against direct sampling.
        let a = GridFn::from_fn(-2.0, 512, 0.4, |_| 1.0);
        let b = GridFn::from_fn(-2.0, 512, 1.4, |_| 1.0);
        let c = GridFn::linear_combination(0.4, &[(&a, 1.0), (&b, 2.0)]).unwrap();
        for i in 0..=512 {
            let xi = c.node_xi(i);
            let t = -(2.0 * xi).exp_m1();
            let want = if t == 0.0 { 1.0 } else { 1.0 + 2.0 * t };
            assert!((c.node_values()[i] - want).abs() <= 1e-13 * want.max(1.0));
        }
        let err = GridFn::linear_combination(2.0, &[(&a, 1.0)]);
        assert!(matches!(err, Err(WeightError::ParameterOutOfDomain(_))));
    }

    #[test]
    fn evaluation_outside_the_grid_is_classified() {
        let g = GridFn::from_fn(-2.0, 64, 0.0, |_| 1.0);
        assert_eq!(g.eval(1.5).unwrap(), 0.0);
        assert!(matches!(g.eval(1e-3), Err(WeightError::BelowGridFloor { .. })));
        assert!(matches!(g.eval(-1.0), Err(WeightError::ParameterOutOfDomain(_))));
        assert!(matches!(g.eval(0.0), Err(WeightError::ParameterOutOfDomain(_))));
    }
}
