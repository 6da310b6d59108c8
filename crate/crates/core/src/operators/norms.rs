use serde::Serialize;

use crate::geometry::{powr, BoundaryFace, DomainParams};
use crate::quadrature::{boundary_integral, triangle_rule, GradedRule};
use crate::steklov::FemFunction;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `||grad u||_p + ||u||_p`
    SobolevP,
    /// `||grad u||_p`
    DirichletP,
    /// `(int |u|^q x_n^theta dH^{n-1})^{1/q}`
    BoundaryQTheta,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormValue {
    pub value: f64,
    pub kind: NormKind,
    /// How the integrals were evaluated.
    pub quadrature: String,
}

fn check_exponent(name: &str, e: f64) -> Result<()> {
    if e >= 1.0 && e.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("norm exponent {name} = {e} must be >= 1")))
    }
}

/// Weighted boundary norm of a function given on the closure of the cusp.
pub fn weighted_boundary_norm(
    f: &dyn Fn(&[f64]) -> f64,
    q: f64,
    theta: f64,
    params: &DomainParams,
    rule: &GradedRule,
) -> Result<NormValue> {
    check_exponent("q", q)?;
    let faces = BoundaryFace::all(params.n());
    let integral = boundary_integral(&|x| powr(f(x).abs(), q), theta, &faces, params, rule)?;
    Ok(NormValue {
        value: integral.powf(1.0 / q),
        kind: NormKind::BoundaryQTheta,
        quadrature: rule.describe(),
    })
}

/// `(||u'||_p, ||u||_p)` for `u(x) = f(x_n)`; the cross-section contributes
/// the weight `t^{alpha(n-1)}`.
pub fn profile_norm_parts(
    value: &dyn Fn(f64) -> f64,
    derivative: &dyn Fn(f64) -> f64,
    p: f64,
    params: &DomainParams,
    rule: &GradedRule,
) -> Result<(f64, f64)> {
    check_exponent("p", p)?;
    let e = params.alpha() * (params.n() as f64 - 1.0);
    let grad = rule.integrate(|t| powr(derivative(t).abs(), p) * powr(t, e));
    let lp = rule.integrate(|t| powr(value(t).abs(), p) * powr(t, e));
    Ok((grad.powf(1.0 / p), lp.powf(1.0 / p)))
}

/// Sobolev norm of a profile `u(x) = f(x_n)`.
pub fn sobolev_norm_profile(
    value: &dyn Fn(f64) -> f64,
    derivative: &dyn Fn(f64) -> f64,
    p: f64,
    params: &DomainParams,
    rule: &GradedRule,
) -> Result<NormValue> {
    let (grad, lp) = profile_norm_parts(value, derivative, p, params, rule)?;
    Ok(NormValue {
        value: grad + lp,
        kind: NormKind::SobolevP,
        quadrature: rule.describe(),
    })
}

const TRIANGLE_ORDER: usize = 5;

/// `(||grad u||_p, ||u||_p)` for a piecewise-linear function. The gradient
/// part is exact; `|u|^p` uses a degree-5 triangle rule.
pub fn fem_norm_parts(u: &FemFunction<'_>, p: f64) -> Result<(f64, f64)> {
    check_exponent("p", p)?;
    let mesh = u.mesh();
    let rule = triangle_rule(TRIANGLE_ORDER)?;
    let (mut grad, mut lp) = (0.0, 0.0);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let v = tri.map(|i| mesh.vertices()[i]);
        let g = u.gradient(t);
        let area = 0.5
            * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]))
                .abs();
        grad += area * powr(g[0].hypot(g[1]), p);
        let vals = tri.map(|i| u.values()[i]);
        lp += area
            * rule
                .points()
                .iter()
                .zip(rule.weights())
                .map(|(b, w)| w * powr((b[0] * vals[0] + b[1] * vals[1] + b[2] * vals[2]).abs(), p))
                .sum::<f64>();
    }
    Ok((grad.powf(1.0 / p), lp.powf(1.0 / p)))
}

fn fem_description(u: &FemFunction<'_>) -> String {
    format!("P1 on {} triangles, order-{TRIANGLE_ORDER} triangle rule", u.mesh().triangles().len())
}

pub fn sobolev_norm(u: &FemFunction<'_>, p: f64) -> Result<NormValue> {
    let (grad, lp) = fem_norm_parts(u, p)?;
    Ok(NormValue {
        value: grad + lp,
        kind: NormKind::SobolevP,
        quadrature: fem_description(u),
    })
}

pub fn dirichlet_norm(u: &FemFunction<'_>, p: f64) -> Result<NormValue> {
    let (grad, _) = fem_norm_parts(u, p)?;
    Ok(NormValue {
        value: grad,
        kind: NormKind::DirichletP,
        quadrature: fem_description(u),
    })
}
