//! Graded interval rules and triangle rules for power-weight integrands.

use serde::Serialize;

use crate::geometry::{face_parametrization, powr, BoundaryFace, DomainParams};
use crate::{Error, Result};

/// Default number of geometric panels.
pub const DEFAULT_PANELS: usize = 40;
/// Default panel ratio `r`: panels are `[r^{k+1}, r^k]`.
pub const DEFAULT_RATIO: f64 = 0.5;
/// Gauss points per panel.
pub const PANEL_ORDER: usize = 8;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..(m + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_m and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// Composite Gauss rule on `(0, 1)` with panels graded geometrically toward
/// `t = 0`. The tip is never a node.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradedRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    grading_ratio: f64,
    panels: usize,
}

/// A graded rule accurate to about `1e-8` relative for `c t^sigma`,
/// `sigma >= min_exponent`. Extra panels are added when `min_exponent` is
/// close to `-1`, so the last panel `[0, r^P]` carries a negligible share
/// of the integral, up to the limit `r^P >= 1e-300`.
pub fn graded_interval_rule(min_exponent: f64, panels: usize, ratio: f64) -> Result<GradedRule> {
    if !(min_exponent > -1.0) {
        return Err(Error::NonIntegrable {
            exponent: min_exponent,
        });
    }
    let needed = if min_exponent >= 0.0 {
        0
    } else {
        let decades = 11.0 / (min_exponent + 1.0);
        (decades.min(300.0) * std::f64::consts::LN_10 / (1.0 / ratio).ln()).ceil() as usize
    };
    GradedRule::with_panels(panels.max(needed), ratio)
}

impl GradedRule {
    /// Exactly `panels` graded panels plus the closing tip panel.
    pub fn with_panels(panels: usize, ratio: f64) -> Result<GradedRule> {
        if panels < 4 {
            return Err(Error::InvalidArgument(format!("panels = {panels} < 4")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidArgument(format!("grading ratio {ratio} not in (0,1)")));
        }
        let (gx, gw) = gauss_legendre(PANEL_ORDER);
        let mut nodes = Vec::with_capacity((panels + 1) * PANEL_ORDER);
        let mut weights = Vec::with_capacity(nodes.capacity());
        // breakpoints 0 < r^P < ... < r < 1
        let mut breaks = vec![0.0];
        breaks.extend((0..=panels).rev().map(|k| ratio.powi(k as i32)));
        for w in breaks.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (x, wt) in gx.iter().zip(&gw) {
                nodes.push(mid + half * x);
                weights.push(half * wt);
            }
        }
        Ok(GradedRule {
            nodes,
            weights,
            grading_ratio: ratio,
            panels,
        })
    }

    pub fn default_rule() -> GradedRule {
        GradedRule::with_panels(DEFAULT_PANELS, DEFAULT_RATIO).expect("default rule")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn grading_ratio(&self) -> f64 {
        self.grading_ratio
    }

    /// `int_0^1 f(t) dt`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// `int_0^b f(t) dt`, graded toward 0.
    pub fn integrate_to(&self, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        b * self.integrate(|s| f(b * s))
    }

    pub fn describe(&self) -> String {
        format!(
            "graded Gauss-{PANEL_ORDER}, {} panels, ratio {}",
            self.panels, self.grading_ratio
        )
    }
}

/// Composite Gauss rule on `[lo, hi]` with `panels` equal panels.
pub fn composite_gauss(lo: f64, hi: f64, panels: usize, order: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (gx, gw) = gauss_legendre(order);
    let h = (hi - lo) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let mid = lo + (k as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(&gw) {
            sum += 0.5 * h * w * f(mid + 0.5 * h * x);
        }
    }
    sum
}

/// Symmetric rule on the reference triangle `{x, y >= 0, x + y <= 1}`.
#[derive(Clone, Debug)]
pub struct TriangleRule {
    order: usize,
    /// Barycentric coordinates.
    points: Vec<[f64; 3]>,
    /// Weights normalized to sum to one.
    weights: Vec<f64>,
}

fn orbit3(a: f64) -> [[f64; 3]; 3] {
    let b = 1.0 - 2.0 * a;
    [[a, a, b], [a, b, a], [b, a, a]]
}

/// Positive-weight rules exact for total degree `order`.
pub fn triangle_rule(order: usize) -> Result<TriangleRule> {
    let third = 1.0 / 3.0;
    let (points, weights): (Vec<[f64; 3]>, Vec<f64>) = match order {
        1 => (vec![[third; 3]], vec![1.0]),
        2 => (orbit3(1.0 / 6.0).to_vec(), vec![third; 3]),
        3 | 4 => {
            let mut pts = orbit3(0.445_948_490_915_965).to_vec();
            pts.extend(orbit3(0.091_576_213_509_771));
            let mut w = vec![0.223_381_589_678_011; 3];
            w.extend([0.109_951_743_655_322; 3]);
            (pts, w)
        }
        5 => {
            let mut pts = vec![[third; 3]];
            pts.extend(orbit3(0.470_142_064_105_115));
            pts.extend(orbit3(0.101_286_507_323_456));
            let mut w = vec![0.225];
            w.extend([0.132_394_152_788_506; 3]);
            w.extend([0.125_939_180_544_827; 3]);
            (pts, w)
        }
        other => return Err(Error::UnsupportedOrder(other)),
    };
    Ok(TriangleRule {
        order,
        points,
        weights,
    })
}

impl TriangleRule {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral over the reference triangle (area 1/2).
    pub fn integrate_reference(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        0.5 * self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(b, w)| w * f(b[1], b[2]))
            .sum::<f64>()
    }

    /// Integral over the triangle with the given vertices.
    pub fn integrate_triangle(&self, v: [[f64; 2]; 3], f: impl Fn(f64, f64) -> f64) -> f64 {
        let area = 0.5
            * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]))
                .abs();
        area * self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(b, w)| {
                let x = b[0] * v[0][0] + b[1] * v[1][0] + b[2] * v[2][0];
                let y = b[0] * v[0][1] + b[1] * v[1][1] + b[2] * v[2][1];
                w * f(x, y)
            })
            .sum::<f64>()
    }
}

/// Tensor Gauss points on `(0,1)^dim`.
pub(crate) fn tensor_gauss(dim: usize, m: usize) -> Vec<(Vec<f64>, f64)> {
    let (gx, gw) = gauss_legendre(m);
    let mut out = vec![(Vec::new(), 1.0)];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * m);
        for (pt, w) in &out {
            for (x, wx) in gx.iter().zip(&gw) {
                let mut p = pt.clone();
                p.push(0.5 * (x + 1.0));
                next.push((p, w * 0.5 * wx));
            }
        }
        out = next;
    }
    out
}

const SECTION_POINTS: usize = 8;

/// `sum over faces of int f x_n^theta dH^{n-1}`, reduced through the face
/// charts: graded rule in the height, tensor Gauss over the section.
pub fn boundary_integral(
    f: &dyn Fn(&[f64]) -> f64,
    theta: f64,
    faces: &[BoundaryFace],
    params: &DomainParams,
    rule: &GradedRule,
) -> Result<f64> {
    let n = params.n();
    let alpha = params.alpha();
    let tip = theta + alpha * (n as f64 - 2.0);
    if faces.iter().any(|f| *f != BoundaryFace::Top) && tip <= -1.0 {
        return Err(Error::NonIntegrable { exponent: tip });
    }
    let mut total = 0.0;
    for &face in faces {
        let chart = face_parametrization(face, n, alpha);
        let section = tensor_gauss(chart.section_dim(), SECTION_POINTS);
        if !chart.has_height() {
            total += section.iter().map(|(u, w)| w * f(&chart.point(u, 1.0))).sum::<f64>();
            continue;
        }
        total += rule.integrate(|t| {
            let inner: f64 = section.iter().map(|(u, w)| w * f(&chart.point(u, t))).sum();
            inner * powr(t, theta) * chart.density(t)
        });
    }
    Ok(total)
}

/// How [`volume_integral`] treats the integrand.
pub enum VolumeIntegrand<'a> {
    /// `f` depends only on `x_n`; reduced to `int_0^1 f(t) t^{alpha(n-1)} dt`.
    Height(&'a dyn Fn(f64) -> f64),
    /// General integrand, integrated with a triangle rule on a graded mesh
    /// of the planar cusp with the given number of levels.
    Mesh(&'a dyn Fn(&[f64]) -> f64, usize),
}

pub fn volume_integral(f: VolumeIntegrand<'_>, params: &DomainParams, rule: &GradedRule) -> Result<f64> {
    let n = params.n();
    match f {
        VolumeIntegrand::Height(g) => {
            let e = params.alpha() * (n as f64 - 1.0);
            Ok(rule.integrate(|t| g(t) * powr(t, e)))
        }
        VolumeIntegrand::Mesh(g, levels) => {
            if n != 2 {
                return Err(Error::InvalidArgument("mesh integration needs n = 2".into()));
            }
            let mesh = crate::steklov::generate_cusp_mesh(params, levels, DEFAULT_RATIO)?;
            let tri = triangle_rule(5)?;
            Ok(mesh
                .triangles()
                .iter()
                .map(|t| {
                    let v = t.map(|i| mesh.vertices()[i]);
                    tri.integrate_triangle(v, |x, y| g(&[x, y]))
                })
                .sum())
        }
    }
}
