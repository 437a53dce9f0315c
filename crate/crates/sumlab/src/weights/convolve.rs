use super::grid::GridFn;
use super::WeightError;
use crate::special::{beta_complete, integrate_weighted, QuadratureSpec};
use rayon::prelude::*;

/// Multiplicative convolution `(F * G)(x) = \int_x^1 F(x/y) G(y) dy/y` of two
/// grid profiles sharing the standard grid.
///
/// Both endpoint singularities are peeled off exactly: near `y = x` the
/// factor `F(x/y)` contributes `(y - x)^{F.reg_exp}` and near `y = 1` the
/// factor `G(y)` contributes `(1 - y)^{G.reg_exp}`, so the integrator sees
/// only the smooth residual `phi`. The result carries
/// `reg_exp = F.reg_exp + G.reg_exp + 1`, with the `x = 1` node filled from
/// the exact beta-function limit instead of a `0/0` division.
pub fn mult_convolve(f: &GridFn, g: &GridFn) -> Result<GridFn, WeightError> {
    if f.n_cells() != g.n_cells() || f.xi_lo() != g.xi_lo() {
        return Err(WeightError::GridResolutionInsufficient(
            "convolution requires both factors on a shared grid".into(),
        ));
    }
    if f.n_cells() < 64 {
        return Err(WeightError::GridResolutionInsufficient(format!(
            "{} cells cannot resolve the endpoint structure",
            f.n_cells()
        )));
    }
    let (fr, gr) = (f.reg_exp(), g.reg_exp());
    if fr <= -1.0 || gr <= -1.0 {
        return Err(WeightError::ParameterOutOfDomain(format!(
            "convolution needs integrable endpoint powers, got {fr} and {gr}"
        )));
    }
    let out_reg = fr + gr + 1.0;
    let n = f.n_cells();
    let xi_lo = f.xi_lo();
    // The error estimator plateaus a shade above 1e-12 relative on nodes
    // whose value underflows toward 1e-28 (deep-left tail of high-shift
    // chains); one notch of slack keeps those nodes converging.
    let spec = QuadratureSpec::with_tol(1e-11, 1e-300);

    let mut values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = f.node_xi(i);
            let x = xi.exp();
            let mut phi = |y: f64| {
                let xi_u = (xi - y.ln()).clamp(xi_lo, 0.0);
                let smooth_f = f.reg_at(xi_u) * ((y + x) / (y * y)).powf(fr);
                let smooth_g = g.reg_at(y.ln().clamp(xi_lo, 0.0)) * (1.0 + y).powf(gr);
                smooth_f * smooth_g / y
            };
            let quad = integrate_weighted(&mut phi, x, 1.0, fr, gr, &spec)?;
            let t = -(2.0 * xi).exp_m1();
            Ok(quad.value * t.powf(-out_reg))
        })
        .collect::<Result<_, WeightError>>()?;

    values.push(f.reg_at_one() * g.reg_at_one() * beta_complete(fr + 1.0, gr + 1.0)? / 2.0);
    Ok(GridFn::from_values(xi_lo, out_reg, values))
}
