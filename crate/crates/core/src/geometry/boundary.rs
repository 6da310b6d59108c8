//! Boundary faces of the cusp `0 < x_i < x_n^alpha, 0 < x_n < 1`, their
//! charts, and the tangential Jacobians of the inverse straightening map.
//!
//! Every face except the top is swept by the height `t = x_n` and a
//! cross-section; the charts use normalized cross-section coordinates
//! `u in (0,1)^{n-2}` with `x_j = u_j t^alpha`, so one unit of `(u, t)`
//! parameter volume carries `density(t)` units of surface measure.

use std::fmt;

use serde::Serialize;

use super::{powr, CuspMap};
use crate::{Error, Result};

/// Face tags. Indices are 1-based coordinate numbers `i in 1..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BoundaryFace {
    /// `F_i^0 = {x_i = 0}`
    Flat(usize),
    /// `F_i^alpha = {x_i = x_n^alpha}`
    Slanted(usize),
    /// `F^t = {x_n = 1}`
    Top,
}

impl fmt::Display for BoundaryFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryFace::Flat(i) => write!(f, "Flat({i})"),
            BoundaryFace::Slanted(i) => write!(f, "Slanted({i})"),
            BoundaryFace::Top => write!(f, "Top"),
        }
    }
}

impl BoundaryFace {
    /// All `2(n-1) + 1` faces in tag order.
    pub fn all(n: usize) -> Vec<BoundaryFace> {
        let mut faces: Vec<_> = (1..n).map(BoundaryFace::Flat).collect();
        faces.extend((1..n).map(BoundaryFace::Slanted));
        faces.push(BoundaryFace::Top);
        faces
    }

    fn valid_for(&self, n: usize) -> bool {
        match *self {
            BoundaryFace::Flat(i) | BoundaryFace::Slanted(i) => (1..n).contains(&i),
            BoundaryFace::Top => true,
        }
    }

    /// Whether `x` lies on the closure of this face, up to `tol`.
    pub fn contains(&self, x: &[f64], alpha: f64, tol: f64) -> bool {
        let n = x.len();
        if !self.valid_for(n) {
            return false;
        }
        let xn = x[n - 1];
        if !(xn >= -tol && xn <= 1.0 + tol) {
            return false;
        }
        let width = powr(xn.max(0.0), alpha);
        let in_section = x[..n - 1]
            .iter()
            .all(|&xi| xi >= -tol && xi <= width + tol);
        if !in_section {
            return false;
        }
        match *self {
            BoundaryFace::Flat(i) => x[i - 1].abs() <= tol,
            BoundaryFace::Slanted(i) => (x[i - 1] - width).abs() <= tol,
            BoundaryFace::Top => (xn - 1.0).abs() <= tol,
        }
    }
}

/// Lowest-tag face within `tol` of `x`, if any.
pub fn classify_boundary_point(x: &[f64], alpha: f64, tol: f64) -> Option<BoundaryFace> {
    BoundaryFace::all(x.len())
        .into_iter()
        .find(|f| f.contains(x, alpha, tol))
}

/// Parametrization of one face.
#[derive(Clone, Debug)]
pub struct FaceChart {
    face: BoundaryFace,
    n: usize,
    alpha: f64,
}

pub fn face_parametrization(face: BoundaryFace, n: usize, alpha: f64) -> FaceChart {
    FaceChart { face, n, alpha }
}

impl FaceChart {
    pub fn face(&self) -> BoundaryFace {
        self.face
    }

    /// Number of normalized cross-section coordinates.
    pub fn section_dim(&self) -> usize {
        match self.face {
            BoundaryFace::Top => self.n - 1,
            _ => self.n - 2,
        }
    }

    /// Whether the chart is swept by the height `t`.
    pub fn has_height(&self) -> bool {
        self.face != BoundaryFace::Top
    }

    /// Surface measure per unit `(u, t)` parameter volume. Constant 1 on
    /// the top face.
    pub fn density(&self, t: f64) -> f64 {
        let a = self.alpha;
        let section = powr(t, a * (self.n as f64 - 2.0));
        match self.face {
            BoundaryFace::Flat(_) => section,
            BoundaryFace::Slanted(_) => {
                section * (1.0 + a * a * powr(t, 2.0 * a - 2.0)).sqrt()
            }
            BoundaryFace::Top => 1.0,
        }
    }

    /// Point of the face at section coordinates `u` and height `t` (ignored
    /// on the top face).
    pub fn point(&self, u: &[f64], t: f64) -> Vec<f64> {
        let n = self.n;
        match self.face {
            BoundaryFace::Top => {
                let mut x = u.to_vec();
                x.push(1.0);
                x
            }
            BoundaryFace::Flat(i) | BoundaryFace::Slanted(i) => {
                let width = powr(t, self.alpha);
                let mut x = Vec::with_capacity(n);
                let mut it = u.iter();
                for j in 1..n {
                    if j == i {
                        x.push(if matches!(self.face, BoundaryFace::Flat(_)) {
                            0.0
                        } else {
                            width
                        });
                    } else {
                        x.push(it.next().copied().unwrap_or(0.0) * width);
                    }
                }
                x.push(t);
                x
            }
        }
    }
}

fn on_face(map: &CuspMap, face: BoundaryFace, x: &[f64]) -> Result<f64> {
    let n = map.n();
    let tol = 1e-12 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    if x.len() != n || !face.contains(x, map.alpha(), tol) || x[n - 1] <= 0.0 {
        return Err(Error::FaceMismatch {
            face: face.to_string(),
            point: x.to_vec(),
        });
    }
    Ok(x[n - 1])
}

/// Closed-form tangential Jacobian of `phi_a^{-1}` on a face.
///
/// Flat faces: `t^{(n-1)/a - (n-2) alpha - 1} / a`. Slanted faces:
/// `t^{(1/a - alpha)(n-2)} t^{1/a - 1} sqrt(1/a^2 + alpha^2 + (1/a - alpha)^2 sum_{j != i} x_j^2 / t^{2 alpha})`.
/// On the top face the inverse map is the identity, so the value is 1.
///
/// The slanted expression dominates the lower bound of
/// [`tangential_jacobian_bounds`] but is not the surface-measure ratio of
/// the map; [`boundary_measure_ratio`] is the quantity that satisfies the
/// area formula.
pub fn tangential_jacobian(map: &CuspMap, face: BoundaryFace, x: &[f64]) -> Result<f64> {
    let t = on_face(map, face, x)?;
    let n = map.n();
    let (a, alpha) = (map.a(), map.alpha());
    let nf = n as f64;
    match face {
        BoundaryFace::Flat(_) => Ok(powr(t, (nf - 1.0) / a - (nf - 2.0) * alpha - 1.0) / a),
        BoundaryFace::Slanted(i) => {
            let width2 = powr(t, 2.0 * alpha);
            let cross: f64 = (1..n)
                .filter(|&j| j != i)
                .map(|j| x[j - 1] * x[j - 1] / width2)
                .sum();
            let k = 1.0 / a - alpha;
            let root = (1.0 / (a * a) + alpha * alpha + k * k * cross).sqrt();
            Ok(powr(t, k * (nf - 2.0)) * powr(t, 1.0 / a - 1.0) * root)
        }
        BoundaryFace::Top => Ok(1.0),
    }
}

/// Ratio `dH^{n-1}(phi_a^{-1}(x)) / dH^{n-1}(x)` of surface measures.
///
/// Agrees with [`tangential_jacobian`] on flat faces. On the slanted face
/// `x_i = t^alpha` the composed chart has Gram determinant
/// `t^{2(1/a - alpha)(n-2)} * 2 t^{2/a - 2} / a^2`, and the face itself
/// carries `sqrt(1 + alpha^2 t^{2 alpha - 2})`.
pub fn boundary_measure_ratio(map: &CuspMap, face: BoundaryFace, x: &[f64]) -> Result<f64> {
    let t = on_face(map, face, x)?;
    let nf = map.n() as f64;
    let (a, alpha) = (map.a(), map.alpha());
    match face {
        BoundaryFace::Flat(_) => Ok(powr(t, (nf - 1.0) / a - (nf - 2.0) * alpha - 1.0) / a),
        BoundaryFace::Slanted(_) => {
            let k = 1.0 / a - alpha;
            let image = powr(t, k * (nf - 2.0)) * powr(t, 1.0 / a - 1.0) * std::f64::consts::SQRT_2 / a;
            let source = (1.0 + alpha * alpha * powr(t, 2.0 * alpha - 2.0)).sqrt();
            Ok(image / source)
        }
        BoundaryFace::Top => Ok(1.0),
    }
}

/// `(lo, hi)` with `lo = t^e / a`, `hi = C(a, n, alpha) t^e`,
/// `e = (n-1)/a - (n-2) alpha - 1`,
/// `C = sqrt(1/a^2 + (1/a - alpha)^2 (n-1) + alpha^2)`.
pub fn tangential_jacobian_bounds(map: &CuspMap, t: f64) -> (f64, f64) {
    let nf = map.n() as f64;
    let (a, alpha) = (map.a(), map.alpha());
    let e = powr(t, (nf - 1.0) / a - (nf - 2.0) * alpha - 1.0);
    (e / a, distortion_constant(a, map.n(), alpha) * e)
}

/// `C(a, n, alpha)`.
pub fn distortion_constant(a: f64, n: usize, alpha: f64) -> f64 {
    let k = 1.0 / a - alpha;
    (1.0 / (a * a) + k * k * (n as f64 - 1.0) + alpha * alpha).sqrt()
}
