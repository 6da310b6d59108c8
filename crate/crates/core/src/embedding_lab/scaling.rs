use rayon::prelude::*;
use serde::Serialize;

use super::cutoff::Cutoff;
use crate::geometry::{derived_exponents, powr, DomainParams};
use crate::quadrature::{composite_gauss, graded_interval_rule, DEFAULT_PANELS, DEFAULT_RATIO};
use crate::{Error, Result};

/// Norms of `u_eps(x) = eta(x_n / eps)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestNorms {
    /// `(int |u_eps|^q x_n^theta dH^{n-1})^{1/q}`
    pub boundary_norm: f64,
    pub gradient_norm: f64,
    pub lp_norm: f64,
    /// `gradient_norm + lp_norm`
    pub sobolev_norm: f64,
}

const TRANSITION_PANELS: usize = 16;
const PANEL_ORDER: usize = 8;

/// Exact one-dimensional reductions of the norms of `u_eps`.
///
/// With `t = eps s` every integral lives on `s in (0, 2)`: the plateau
/// `[0, 1]` uses a graded rule, the transition `[1, 2]` composite Gauss.
pub fn test_function_norms(
    params: &DomainParams,
    theta: f64,
    q: f64,
    eps: f64,
    cutoff: Cutoff,
) -> Result<TestNorms> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!("eps = {eps} outside (0, 1/2)")));
    }
    if q < 1.0 {
        return Err(Error::InvalidArgument(format!("q = {q} below 1")));
    }
    let n = params.n() as f64;
    let (p, alpha) = (params.p(), params.alpha());
    let face = theta + alpha * (n - 2.0);
    if face <= -1.0 {
        return Err(Error::NonIntegrable { exponent: face });
    }
    let plateau = graded_interval_rule(face.min(0.0), DEFAULT_PANELS, DEFAULT_RATIO)?;

    // flat and slanted faces; the top face lies outside the support
    let density = |t: f64| {
        let section = powr(t, alpha * (n - 2.0));
        section * (1.0 + (1.0 + alpha * alpha * powr(t, 2.0 * alpha - 2.0)).sqrt())
    };
    let boundary_at = |s: f64, eta: f64| powr(eta, q) * powr(eps * s, theta) * density(eps * s);
    let boundary = (n - 1.0)
        * eps
        * (plateau.integrate(|s| boundary_at(s, 1.0))
            + composite_gauss(1.0, 2.0, TRANSITION_PANELS, PANEL_ORDER, |s| boundary_at(s, cutoff.eval(s).0)));

    let e = alpha * (n - 1.0);
    let gradient = powr(eps, 1.0 - p)
        * composite_gauss(1.0, 2.0, TRANSITION_PANELS, PANEL_ORDER, |s| {
            powr(cutoff.eval(s).1.abs(), p) * powr(eps * s, e)
        });
    let lp = eps
        * (plateau.integrate(|s| powr(eps * s, e))
            + composite_gauss(1.0, 2.0, TRANSITION_PANELS, PANEL_ORDER, |s| {
                powr(cutoff.eval(s).0, p) * powr(eps * s, e)
            }));
    let (gradient_norm, lp_norm) = (gradient.powf(1.0 / p), lp.powf(1.0 / p));
    Ok(TestNorms {
        boundary_norm: boundary.powf(1.0 / q),
        gradient_norm,
        lp_norm,
        sobolev_norm: gradient_norm + lp_norm,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingResult {
    pub theta: f64,
    pub q: f64,
    pub eps_grid: Vec<f64>,
    pub lhs_norms: Vec<f64>,
    pub rhs_norms: Vec<f64>,
    pub lhs_slope: f64,
    pub rhs_slope: f64,
    /// `(theta + alpha(n-2) + 1) / q`
    pub predicted_lhs: f64,
    /// `(alpha(n-1) + 1 - p) / p`
    pub predicted_rhs: f64,
}

impl ScalingResult {
    /// `lhs_norm / rhs_norm` per grid point.
    pub fn ratios(&self) -> Vec<f64> {
        self.lhs_norms.iter().zip(&self.rhs_norms).map(|(l, r)| l / r).collect()
    }
}

/// `2^-4, 2^-5, ..., 2^-12`.
pub fn default_eps_grid() -> Vec<f64> {
    (4..=12).map(|k| 0.5f64.powi(k)).collect()
}

/// Ordinary least-squares slope of `log2 y` against `log2 x`.
pub fn log2_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.log2()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.log2()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

const GRID_MIN: f64 = 1.0 / 4096.0;
const GRID_MAX: f64 = 1.0 / 16.0;

/// Norms of `u_eps` along `eps_grid` and their fitted power laws.
///
/// `eps_grid` needs at least 6 strictly decreasing points in
/// `[2^-12, 2^-4]`.
pub fn scaling_slopes(
    params: &DomainParams,
    theta: f64,
    q: f64,
    eps_grid: &[f64],
    cutoff: Cutoff,
) -> Result<ScalingResult> {
    if eps_grid.len() < 6 {
        return Err(Error::InvalidArgument(format!("eps grid has {} points, need 6", eps_grid.len())));
    }
    if eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps grid must be strictly decreasing".into()));
    }
    if eps_grid.iter().any(|&e| !(GRID_MIN..=GRID_MAX).contains(&e)) {
        return Err(Error::InvalidArgument("eps grid must lie in [2^-12, 2^-4]".into()));
    }
    let norms = eps_grid
        .par_iter()
        .map(|&eps| test_function_norms(params, theta, q, eps, cutoff))
        .collect::<Result<Vec<_>>>()?;
    let lhs_norms: Vec<f64> = norms.iter().map(|t| t.boundary_norm).collect();
    let rhs_norms: Vec<f64> = norms.iter().map(|t| t.sobolev_norm).collect();
    let n = params.n() as f64;
    let (p, alpha) = (params.p(), params.alpha());
    Ok(ScalingResult {
        theta,
        q,
        lhs_slope: log2_slope(eps_grid, &lhs_norms),
        rhs_slope: log2_slope(eps_grid, &rhs_norms),
        predicted_lhs: (theta + alpha * (n - 2.0) + 1.0) / q,
        predicted_rhs: (alpha * (n - 1.0) + 1.0 - p) / p,
        eps_grid: eps_grid.to_vec(),
        lhs_norms,
        rhs_norms,
    })
}

/// One row of [`sharpness_scan`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub theta: f64,
    /// `lhs_slope - rhs_slope`; negative means the trace ratio blows up.
    pub slope_gap: f64,
    /// `theta - theta_min(q)`
    pub distance: f64,
    /// Whether the signs of `slope_gap` and `distance` agree; `None` within
    /// [`SIGN_MARGIN`] of `theta_min`.
    pub sign_agrees: Option<bool>,
}

pub const SIGN_MARGIN: f64 = 0.05;

/// Slope gaps over `theta_grid` on the default eps grid.
pub fn sharpness_scan(params: &DomainParams, q: f64, theta_grid: &[f64], cutoff: Cutoff) -> Result<Vec<ScanRow>> {
    let theta_min = derived_exponents(params).theta_min(q);
    let grid = default_eps_grid();
    theta_grid
        .iter()
        .map(|&theta| {
            let r = scaling_slopes(params, theta, q, &grid, cutoff)?;
            let slope_gap = r.lhs_slope - r.rhs_slope;
            let distance = theta - theta_min;
            let sign_agrees = (distance.abs() >= SIGN_MARGIN - 1e-12).then(|| (slope_gap > 0.0) == (distance > 0.0));
            Ok(ScanRow {
                theta,
                slope_gap,
                distance,
                sign_agrees,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate_params, RawParams, Usage};

    fn planar() -> DomainParams {
        validate_params(&RawParams::new(2, 1.5, 3.0, 3.0), Usage::Geometry).unwrap()
    }

    #[test]
    fn halving_ratios() {
        let params = planar();
        let a = test_function_norms(&params, 2.0, 3.0, 1.0 / 1024.0, Cutoff::Cubic).unwrap();
        let b = test_function_norms(&params, 2.0, 3.0, 1.0 / 2048.0, Cutoff::Cubic).unwrap();
        assert!((b.boundary_norm / a.boundary_norm - 0.5).abs() < 1e-3);
        let ratio = (b.gradient_norm / a.gradient_norm).powf(1.5);
        assert!((ratio - 2f64.powf(-1.5)).abs() < 1e-10);
    }

    #[test]
    fn rejects_large_eps_and_bad_grids() {
        let params = planar();
        assert!(test_function_norms(&params, 2.0, 3.0, 0.5, Cutoff::Cubic).is_err());
        assert!(matches!(
            test_function_norms(&params, -1.5, 3.0, 0.1, Cutoff::Cubic),
            Err(Error::NonIntegrable { .. })
        ));
        let short = &default_eps_grid()[..5];
        assert!(scaling_slopes(&params, 2.0, 3.0, short, Cutoff::Cubic).is_err());
        let mut rising = default_eps_grid();
        rising.reverse();
        assert!(scaling_slopes(&params, 2.0, 3.0, &rising, Cutoff::Cubic).is_err());
    }

    #[test]
    fn sharp_case_slopes_agree() {
        let r = scaling_slopes(&planar(), 2.0, 3.0, &default_eps_grid(), Cutoff::Cubic).unwrap();
        assert!((r.lhs_slope - 1.0).abs() < 0.02);
        assert!((r.rhs_slope - 1.0).abs() < 0.02);
        assert!(r.lhs_norms.iter().chain(&r.rhs_norms).all(|v| *v > 0.0));
    }

    #[test]
    fn scan_signs_around_theta_min() {
        let rows = sharpness_scan(&planar(), 2.0, &[0.5, 1.0, 1.5], Cutoff::Cubic).unwrap();
        assert!(rows[0].slope_gap < -0.1);
        assert!(rows[1].slope_gap.abs() < 0.02);
        assert!(rows[2].slope_gap > 0.1);
        assert_eq!(rows[1].sign_agrees, None);
        assert!(rows.iter().filter_map(|r| r.sign_agrees).all(|ok| ok));
    }

    #[test]
    fn least_squares_slope_exact_on_power() {
        let x = default_eps_grid();
        let y: Vec<f64> = x.iter().map(|e| 3.0 * e.powf(0.75)).collect();
        assert!((log2_slope(&x, &y) - 0.75).abs() < 1e-12);
    }
}
