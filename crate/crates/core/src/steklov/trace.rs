use serde::Serialize;

use crate::geometry::DomainParams;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceConstant {
    /// `lambda^{-1/p}`.
    pub c_tr: f64,
    pub bound_factor: f64,
    /// `c_tr <= bound_factor * reference` when a reference constant for the
    /// Lipschitz domain was supplied.
    pub bound_holds: Option<bool>,
}

/// `a_max^{1/q - 1/p} ((n-1) + (n-p)^2/(gamma-p)^2 + (p-1)^2 (gamma-n)^2 / ((gamma-p)^2 (n-1)))^{1/2}`.
pub fn bound_factor(params: &DomainParams) -> f64 {
    let n = params.n() as f64;
    let (p, g, q) = (params.p(), params.gamma(), params.q());
    let a_max = (n - p) / (g - p);
    let inner = (n - 1.0)
        + (n - p).powi(2) / (g - p).powi(2)
        + (p - 1.0).powi(2) * (g - n).powi(2) / ((g - p).powi(2) * (n - 1.0));
    a_max.powf(1.0 / q - 1.0 / p) * inner.sqrt()
}

/// Best trace constant from the first eigenvalue, with the comparison factor
/// against the straightened domain. `reference` is `C_tr` of the simplex.
pub fn trace_constant(lambda: f64, params: &DomainParams, reference: Option<f64>) -> TraceConstant {
    let c_tr = lambda.powf(-1.0 / params.p());
    let bound_factor = bound_factor(params);
    TraceConstant {
        c_tr,
        bound_factor,
        bound_holds: reference.map(|r| c_tr <= bound_factor * r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate_params, RawParams, Usage};

    #[test]
    fn constant_from_lambda() {
        let params = validate_params(&RawParams::new(3, 2.0, 4.0, 3.0), Usage::Steklov).unwrap();
        assert!((trace_constant(16.0, &params, None).c_tr - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bound_factor_examples() {
        let spatial = validate_params(&RawParams::new(3, 2.0, 4.0, 3.0), Usage::Steklov).unwrap();
        let expect = 2f64.powf(1.0 / 6.0) * 2.375f64.sqrt();
        assert!((bound_factor(&spatial) - expect).abs() < 1e-12);
        assert!((bound_factor(&spatial) - 1.72983).abs() < 1e-5);
        let planar = validate_params(&RawParams::new(2, 1.5, 3.0, 2.0), Usage::Steklov).unwrap();
        let expect = 3f64.powf(1.0 / 6.0) * (11.0f64 / 9.0).sqrt();
        assert!((bound_factor(&planar) - expect).abs() < 1e-12);
        assert!((bound_factor(&planar) - 1.32770).abs() < 5e-5);
    }
}
