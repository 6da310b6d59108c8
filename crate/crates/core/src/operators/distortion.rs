use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{powr, CuspMap};
use crate::quadrature::{graded_interval_rule, tensor_gauss, GradedRule};
use crate::sampling::simplex_points;
use crate::{Error, Result};

/// Sampled `K_{p,p}` with the closed-form upper bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KppEstimate {
    /// Largest value of `(|D phi|^p / J)^{1/p}` over the samples.
    pub sampled: f64,
    /// `(1/a)^{1/p} ((n-1)((a alpha - 1)^2 + 1) + a^2)^{1/2}`.
    pub analytic_bound: f64,
    pub samples: usize,
}

fn check_parameter(map: &CuspMap) -> Result<()> {
    let a_max = map.params().exponents().a_max;
    if map.a() > a_max * (1.0 + 1e-14) {
        return Err(Error::MapParameterTooLarge { a: map.a(), a_max });
    }
    Ok(())
}

/// `ess sup (|D phi_a|^p / J(y, phi_a))^{1/p}` over Halton points of the
/// model domain, using the exact spectral norm.
pub fn k_pp_estimate(map: &CuspMap, samples: usize) -> Result<KppEstimate> {
    check_parameter(map)?;
    let n = map.n();
    let p = map.params().p();
    let points = simplex_points(n, samples);
    let sampled = points
        .par_iter()
        .map(|y| {
            let norm = map.operator_norm(y)?;
            let jac = map.jacobian_forward(y)?;
            Ok((powr(norm, p) / jac).powf(1.0 / p))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let (a, alpha) = (map.a(), map.alpha());
    let nf = n as f64;
    let analytic_bound = (1.0 / a).powf(1.0 / p)
        * ((nf - 1.0) * ((a * alpha - 1.0).powi(2) + 1.0) + a * a).sqrt();
    Ok(KppEstimate {
        sampled,
        analytic_bound,
        samples,
    })
}

const SECTION_POINTS: usize = 8;

/// `(int (|D phi|^p / J)^{s/(p-s)} dy)^{(p-s)/(ps)}` over the model domain.
///
/// Written in `y = (t z, t)`, `z in (0,1)^{n-1}`; the integrand behaves like
/// `t^{n - 1 + k (p e - a gamma + n)}` at the tip, `k = s/(p-s)`,
/// `e = min(a alpha - 1, a - 1)`, and the integral diverges when that
/// exponent is at most `-1`.
pub fn k_ps_estimate(map: &CuspMap, p: f64, s: f64, rule: &GradedRule) -> Result<f64> {
    if !(1.0 < s && s < p) {
        return Err(Error::InvalidArgument(format!("K_ps needs 1 < s < p (s = {s}, p = {p})")));
    }
    let n = map.n();
    let nf = n as f64;
    let (a, alpha, gamma) = (map.a(), map.alpha(), map.params().gamma());
    let k = s / (p - s);
    let e = (a * alpha - 1.0).min(a - 1.0);
    let exponent = nf - 1.0 + k * (p * e - (a * gamma - nf));
    if exponent <= -1.0 {
        return Err(Error::DivergentIntegral { exponent });
    }
    let tip_rule = graded_interval_rule(exponent.min(0.0), rule.panels(), rule.grading_ratio())?;
    let section = tensor_gauss(n - 1, SECTION_POINTS);
    let integral = tip_rule.integrate(|t| {
        let jac = a * powr(t, a * gamma - nf);
        let inner: f64 = section
            .iter()
            .map(|(z, w)| {
                let zsq: f64 = z.iter().map(|v| v * v).sum();
                let norm = map.operator_norm_reduced(t, zsq);
                w * (powr(norm, p) / jac).powf(k)
            })
            .sum();
        inner * powr(t, nf - 1.0)
    });
    Ok(integral.powf((p - s) / (p * s)))
}
