use serde::Serialize;

use super::{face_parametrization, tangential_jacobian, tangential_jacobian_bounds, BoundaryFace, CuspMap};
use crate::sampling::{halton, simplex_points};
use crate::Result;

/// Worst-case errors of the map identities over a quasi-random sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobianSuite {
    pub interior_samples: usize,
    pub boundary_samples: usize,
    /// `max |phi^{-1}(phi(y)) - y|_inf / (1 + |y|_inf)`
    pub roundtrip: f64,
    /// `max |J(y, phi) J(phi(y), phi^{-1}) - 1|`
    pub reciprocity: f64,
    /// Largest relative gap between `J(y, phi)` and the determinant of the
    /// central-difference Jacobi matrix.
    pub finite_difference: f64,
    /// Boundary points where the tangential Jacobian leaves `[lo, hi]`
    /// by more than `1e-12 (1 + hi)`.
    pub sandwich_violations: usize,
}

impl JacobianSuite {
    pub const ROUNDTRIP_TOL: f64 = 1e-12;
    pub const RECIPROCITY_TOL: f64 = 1e-10;
    pub const FD_TOL: f64 = 1e-6;

    pub fn passes(&self) -> bool {
        self.roundtrip < Self::ROUNDTRIP_TOL
            && self.reciprocity < Self::RECIPROCITY_TOL
            && self.finite_difference < Self::FD_TOL
            && self.sandwich_violations == 0
    }
}

fn determinant(mut m: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))
            .unwrap_or(c);
        if m[piv * n + c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            for k in 0..n {
                m.swap(c * n + k, piv * n + k);
            }
            det = -det;
        }
        det *= m[c * n + c];
        for r in c + 1..n {
            let f = m[r * n + c] / m[c * n + c];
            for k in c..n {
                m[r * n + k] -= f * m[c * n + k];
            }
        }
    }
    det
}

/// Runs the roundtrip, reciprocity, finite-difference and tangential
/// sandwich checks at `samples` interior and `samples` boundary points.
pub fn jacobian_suite(map: &CuspMap, samples: usize) -> Result<JacobianSuite> {
    let n = map.n();
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (mut roundtrip, mut reciprocity, mut fd) = (0.0f64, 0.0f64, 0.0f64);
    for y in simplex_points(n, samples) {
        let x = map.forward(&y)?;
        let back = map.inverse(&x)?;
        let err = sup(&back.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>());
        roundtrip = roundtrip.max(err / (1.0 + sup(&y)));
        let jf = map.jacobian_forward(&y)?;
        reciprocity = reciprocity.max((jf * map.jacobian_inverse(&x)? - 1.0).abs());

        let h = 1e-6 * y[n - 1];
        let mut m = vec![0.0; n * n];
        for j in 0..n {
            let (mut yp, mut ym) = (y.clone(), y.clone());
            yp[j] += h;
            ym[j] -= h;
            let (xp, xm) = (map.forward(&yp)?, map.forward(&ym)?);
            for i in 0..n {
                m[i * n + j] = (xp[i] - xm[i]) / (2.0 * h);
            }
        }
        fd = fd.max((determinant(m, n) - jf).abs() / jf);
    }

    let faces: Vec<BoundaryFace> = BoundaryFace::all(n)
        .into_iter()
        .filter(|f| *f != BoundaryFace::Top)
        .collect();
    let mut violations = 0;
    for k in 0..samples {
        let face = faces[k % faces.len()];
        let chart = face_parametrization(face, n, map.alpha());
        let u = halton(k as u64, chart.section_dim() + 1);
        let t = u[chart.section_dim()];
        let x = chart.point(&u[..chart.section_dim()], t);
        let tj = tangential_jacobian(map, face, &x)?;
        let (lo, hi) = tangential_jacobian_bounds(map, t);
        let slack = 1e-12 * (1.0 + hi);
        if tj < lo - slack || tj > hi + slack {
            violations += 1;
        }
    }
    Ok(JacobianSuite {
        interior_samples: samples,
        boundary_samples: samples,
        roundtrip,
        reciprocity,
        finite_difference: fd,
        sandwich_violations: violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate_params, RawParams, Usage};

    #[test]
    fn determinant_of_permuted_triangular() {
        let m = vec![0.0, 2.0, 0.0, 3.0, 1.0, 0.0, 0.0, 5.0, 4.0];
        assert!((determinant(m, 3) + 24.0).abs() < 1e-12);
    }

    #[test]
    fn reference_configs_pass() {
        for raw in [
            RawParams::new(2, 1.5, 3.0, 2.0),
            RawParams::new(3, 2.0, 4.0, 3.0),
            RawParams::simplex(2, 1.5, 2.0),
        ] {
            let map = CuspMap::sharp(&validate_params(&raw, Usage::Geometry).unwrap());
            let s = jacobian_suite(&map, 2000).unwrap();
            assert!(s.passes(), "{raw:?}: {s:?}");
        }
    }
}
