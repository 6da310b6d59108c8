use serde::Serialize;

use crate::geometry::{
    boundary_measure_ratio, face_parametrization, powr, tangential_jacobian, BoundaryFace, CuspMap,
};
use crate::quadrature::{graded_interval_rule, tensor_gauss, GradedRule};
use crate::{Error, Result};

/// Guards relative discrepancies of near-zero integrals.
pub const EPS_FLOOR: f64 = 1e-300;

fn relative(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(EPS_FLOOR)
}

/// Sub-box `E = {t_lo < y_n < t_hi, z_lo < y'/y_n < z_hi}` of the model
/// domain, in the cone coordinates `y = (t z, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelBox {
    pub z_lo: Vec<f64>,
    pub z_hi: Vec<f64>,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl ModelBox {
    /// The whole model domain `Omega_n`.
    pub fn full(n: usize) -> Self {
        ModelBox {
            z_lo: vec![0.0; n - 1],
            z_hi: vec![1.0; n - 1],
            t_lo: 0.0,
            t_hi: 1.0,
        }
    }

    fn section_volume(&self) -> f64 {
        self.z_lo.iter().zip(&self.z_hi).map(|(a, b)| b - a).product()
    }

    fn section_point(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.z_lo.iter().zip(&self.z_hi))
            .map(|(u, (a, b))| a + u * (b - a))
            .collect()
    }
}

const SECTION_POINTS: usize = 8;

/// `int_lo^hi g`, graded toward 0 on both pieces `[0, hi] - [0, lo]`.
fn graded_between(rule: &GradedRule, lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let upper = rule.integrate_to(hi, &g);
    if lo > 0.0 {
        upper - rule.integrate_to(lo, &g)
    } else {
        upper
    }
}

/// Relative discrepancy of `int_E f(phi(y)) J(y, phi) dy` against
/// `int_{phi(E)} f(x) dx`.
///
/// The left side is integrated in the cone coordinates of the model domain,
/// the right side in `x = (w x_n^alpha, x_n)` with `dx = x_n^{alpha(n-1)} dw dx_n`,
/// each with its own graded rule.
pub fn change_of_variables_check(f: &dyn Fn(&[f64]) -> f64, map: &CuspMap, region: &ModelBox, rule: &GradedRule) -> Result<f64> {
    let n = map.n();
    let nf = n as f64;
    let (a, alpha, gamma) = (map.a(), map.alpha(), map.params().gamma());
    let in_unit = |v: f64| (0.0..=1.0).contains(&v);
    let valid = region.z_lo.len() == n - 1
        && region.z_hi.len() == n - 1
        && region.z_lo.iter().zip(&region.z_hi).all(|(&a, &b)| in_unit(a) && in_unit(b) && a < b)
        && in_unit(region.t_lo)
        && in_unit(region.t_hi)
        && region.t_lo < region.t_hi;
    if !valid {
        return Err(Error::InvalidArgument(format!("{region:?} is not a sub-box of the model domain")));
    }
    let section = tensor_gauss(n - 1, SECTION_POINTS);
    let vol = region.section_volume();

    let left_rule = graded_interval_rule((a * gamma - 1.0).min(0.0), rule.panels(), rule.grading_ratio())?;
    let lhs = graded_between(&left_rule, region.t_lo, region.t_hi, |t| {
        let inner: f64 = section
            .iter()
            .map(|(u, w)| {
                let z = region.section_point(u);
                let mut y: Vec<f64> = z.iter().map(|zi| zi * t).collect();
                y.push(t);
                let x = map.forward(&y).expect("cone point inside the model domain");
                w * f(&x)
            })
            .sum();
        vol * inner * powr(t, nf - 1.0) * a * powr(t, a * gamma - nf)
    });

    let (x_lo, x_hi) = (powr(region.t_lo, a), powr(region.t_hi, a));
    let x_lo = if region.t_lo > 0.0 { x_lo } else { 0.0 };
    let rhs = graded_between(rule, x_lo, x_hi, |xn| {
        let width = powr(xn, alpha);
        let inner: f64 = section
            .iter()
            .map(|(u, w)| {
                let mut x: Vec<f64> = region.section_point(u).iter().map(|wi| wi * width).collect();
                x.push(xn);
                w * f(&x)
            })
            .sum();
        vol * inner * powr(xn, alpha * (nf - 1.0))
    });
    Ok(relative(lhs, rhs))
}

/// Result of [`area_formula_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AreaCheck {
    /// `int_{boundary Omega_n} g dH^{n-1}`.
    pub lhs: f64,
    /// `int_{boundary Omega_gamma} g(phi^{-1}) (dH(phi^{-1}) / dH) dH^{n-1}`.
    pub rhs: f64,
    pub discrepancy: f64,
    /// Same right side with the closed-form [`tangential_jacobian`] in
    /// place of the measure ratio; differs from zero on slanted faces.
    pub closed_form_discrepancy: f64,
}

/// Boundary area formula for `phi_a^{-1}`, face by face over `faces`.
pub fn area_formula_check_on(
    g: &dyn Fn(&[f64]) -> f64,
    map: &CuspMap,
    faces: &[BoundaryFace],
    rule: &GradedRule,
) -> Result<AreaCheck> {
    let n = map.n();
    let nf = n as f64;
    let (a, alpha) = (map.a(), map.alpha());
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let mut closed = 0.0;
    // flat and slanted ratios behave like t^{(n-1)/a - 1} times the density
    let cusp_rule = graded_interval_rule(((nf - 1.0) / a - 1.0).min(0.0), rule.panels(), rule.grading_ratio())?;
    for &face in faces {
        let model = face_parametrization(face, n, 1.0);
        let cusp = face_parametrization(face, n, alpha);
        let section = tensor_gauss(model.section_dim(), SECTION_POINTS);
        if !model.has_height() {
            for (u, w) in &section {
                let y = model.point(u, 1.0);
                lhs += w * g(&y);
                let x = cusp.point(u, 1.0);
                let gy = g(&map.inverse(&x)?);
                rhs += w * gy * boundary_measure_ratio(map, face, &x)?;
                closed += w * gy * tangential_jacobian(map, face, &x)?;
            }
            continue;
        }
        lhs += rule.integrate(|t| {
            let inner: f64 = section.iter().map(|(u, w)| w * g(&model.point(u, t))).sum();
            inner * model.density(t)
        });
        let (mut r, mut c) = (0.0, 0.0);
        for (&t, &wt) in cusp_rule.nodes().iter().zip(cusp_rule.weights()) {
            let d = wt * cusp.density(t);
            for (u, w) in &section {
                let x = cusp.point(u, t);
                let gy = g(&map.inverse(&x)?);
                r += d * w * gy * boundary_measure_ratio(map, face, &x)?;
                c += d * w * gy * tangential_jacobian(map, face, &x)?;
            }
        }
        rhs += r;
        closed += c;
    }
    Ok(AreaCheck {
        lhs,
        rhs,
        discrepancy: relative(rhs, lhs),
        closed_form_discrepancy: relative(closed, lhs),
    })
}

/// Boundary area formula over all faces.
pub fn area_formula_check(g: &dyn Fn(&[f64]) -> f64, map: &CuspMap, rule: &GradedRule) -> Result<AreaCheck> {
    area_formula_check_on(g, map, &BoundaryFace::all(map.n()), rule)
}
