use serde::Serialize;

use super::linalg::{dot, CsrMatrix, SkylineCholesky};
use super::mesh::TriMesh;
use crate::geometry::powr;
use crate::quadrature::gauss_legendre;
use crate::{Error, Result};

/// Stiffness `K`, mass `M` and weighted boundary mass `M_b` of the P1 space.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub boundary_mass: CsrMatrix,
}

/// Assembles the matrices of the quadratic case `p = q = 2`.
///
/// Boundary entries use 8-point Gauss on ordinary edges and closed-form
/// moments `int_0^1 s^theta s^j (1-s)^k ds` on the two edges that end at
/// the tip.
pub fn linear_system(mesh: &TriMesh, theta: f64) -> LinearSystem {
    let n = mesh.dof();
    let v = mesh.vertices();
    let mut k_t = Vec::with_capacity(9 * mesh.triangles().len());
    let mut m_t = Vec::with_capacity(9 * mesh.triangles().len());
    for tri in mesh.triangles() {
        let [a, b, c] = tri.map(|i| v[i]);
        // edge vectors opposite each vertex
        let e = [
            [c[0] - b[0], c[1] - b[1]],
            [a[0] - c[0], a[1] - c[1]],
            [b[0] - a[0], b[1] - a[1]],
        ];
        let area = 0.5 * (e[2][0] * (-e[1][1]) - (-e[1][0]) * e[2][1]);
        for i in 0..3 {
            for j in 0..3 {
                let kij = (e[i][0] * e[j][0] + e[i][1] * e[j][1]) / (4.0 * area);
                k_t.push((tri[i], tri[j], kij));
                let mij = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                m_t.push((tri[i], tri[j], mij));
            }
        }
    }
    let (gx, gw) = gauss_legendre(8);
    let mut b_t = Vec::new();
    for edge in mesh.boundary_edges() {
        let len = mesh.edge_length(edge);
        let [i, j] = edge.v;
        let local = if mesh.is_tip_edge(edge) {
            let far = if Some(i) == mesh.tip() { j } else { i };
            let c = len * powr(v[far][1], theta);
            let m_tip = c * (1.0 / (theta + 1.0) - 2.0 / (theta + 2.0) + 1.0 / (theta + 3.0));
            let m_mix = c * (1.0 / (theta + 2.0) - 1.0 / (theta + 3.0));
            let m_far = c / (theta + 3.0);
            if far == j {
                [[m_tip, m_mix], [m_mix, m_far]]
            } else {
                [[m_far, m_mix], [m_mix, m_tip]]
            }
        } else {
            let (ya, yb) = (v[i][1], v[j][1]);
            let mut m = [[0.0; 2]; 2];
            for (x, w) in gx.iter().zip(&gw) {
                let s = 0.5 * (1.0 + x);
                let phi = [1.0 - s, s];
                let wt = 0.5 * len * w * powr((1.0 - s) * ya + s * yb, theta);
                for a in 0..2 {
                    for b in 0..2 {
                        m[a][b] += wt * phi[a] * phi[b];
                    }
                }
            }
            m
        };
        for a in 0..2 {
            for b in 0..2 {
                b_t.push((edge.v[a], edge.v[b], local[a][b]));
            }
        }
    }
    LinearSystem {
        stiffness: CsrMatrix::from_triplets(n, k_t),
        mass: CsrMatrix::from_triplets(n, m_t),
        boundary_mass: CsrMatrix::from_triplets(n, b_t),
    }
}

/// Smallest eigenpair of `(K + M) u = lambda M_b u`.
#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub lambda: f64,
    /// Normalized to `u^T M_b u = 1` with `sum(M_b u) >= 0`.
    pub u: Vec<f64>,
    pub iterations: usize,
    pub shift: f64,
}

const MAX_ITER: usize = 2000;
const WARMUP: usize = 4;

/// Shifted inverse power iteration for the first Steklov eigenpair of the
/// quadratic problem.
///
/// Iterates `u <- (A - sigma M_b)^{-1} M_b u` with `A = K + M`. Vectors
/// supported away from the boundary are annihilated by `M_b`, so the
/// iteration never sees the infinite part of the spectrum. After a few
/// unshifted steps the shift moves to `0.9 lambda`; a failed factorization
/// means the shift passed `lambda_1` and it is halved.
pub fn linear_oracle(mesh: &TriMesh, theta: f64) -> Result<OracleResult> {
    let sys = linear_system(mesh, theta);
    let a = sys.stiffness.add_scaled(1.0, &sys.mass);
    let mb = &sys.boundary_mass;
    let n = mesh.dof();

    let normalize = |x: &mut Vec<f64>| -> f64 {
        let nrm = mb.bilinear(x, x).sqrt();
        x.iter_mut().for_each(|v| *v /= nrm);
        a.bilinear(x, x)
    };

    let mut shift = 0.0;
    let mut factor = SkylineCholesky::factor(&a)?;
    let mut u = vec![1.0; n];
    let mut lambda = normalize(&mut u);
    let mut change = f64::INFINITY;
    let mut calm = 0;
    for it in 1..=MAX_ITER {
        if it == WARMUP {
            let mut sigma = 0.9 * lambda;
            for _ in 0..20 {
                match SkylineCholesky::factor(&a.add_scaled(-sigma, mb)) {
                    Ok(f) => {
                        factor = f;
                        shift = sigma;
                        break;
                    }
                    Err(Error::NotPositiveDefinite { .. }) => sigma *= 0.5,
                    Err(e) => return Err(e),
                }
            }
        }
        let mbu = mb.mul_vec(&u);
        let mut x = factor.solve(&mbu);
        // u^T M_b x approximates 1 / (lambda - sigma) without forming x^T K x,
        // which loses digits to cancellation on the small tip elements
        let next = shift + 1.0 / dot(&mbu, &x);
        normalize(&mut x);
        if dot(&x, &mbu) < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        change = (next - lambda).abs() / next;
        let du = x
            .iter()
            .zip(&u)
            .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        let umax = x.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        u = x;
        lambda = next;
        if change < 1e-14 && du < 1e-9 * umax {
            calm += 1;
            if calm >= 2 {
                if mb.mul_vec(&u).iter().sum::<f64>() < 0.0 {
                    u.iter_mut().for_each(|v| *v = -*v);
                }
                return Ok(OracleResult {
                    lambda,
                    u,
                    iterations: it,
                    shift,
                });
            }
        } else {
            calm = 0;
        }
    }
    Err(Error::IterationStall {
        iterations: MAX_ITER,
        change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate_params, RawParams, Usage};
    use crate::steklov::generate_cusp_mesh;

    #[test]
    fn stiffness_annihilates_constants_and_mass_integrates() {
        let params = validate_params(&RawParams::new(2, 1.5, 3.0, 2.0), Usage::Steklov).unwrap();
        let mesh = generate_cusp_mesh(&params, 4, 0.5).unwrap();
        let sys = linear_system(&mesh, 0.0);
        let ones = vec![1.0; mesh.dof()];
        assert!(sys.stiffness.mul_vec(&ones).iter().all(|v| v.abs() < 1e-10));
        assert!((sys.mass.bilinear(&ones, &ones) - mesh.area()).abs() < 1e-14);
        let perimeter: f64 = mesh.boundary_edges().iter().map(|e| mesh.edge_length(e)).sum();
        assert!((sys.boundary_mass.bilinear(&ones, &ones) - perimeter).abs() < 1e-13);
    }

    #[test]
    fn eigenvalue_positive() {
        let params = validate_params(&RawParams::simplex(2, 2.0 - 1e-9, 2.0), Usage::Geometry).unwrap();
        let mesh = generate_cusp_mesh(&params, 3, 0.5).unwrap();
        let r = linear_oracle(&mesh, 0.0).unwrap();
        assert!(r.lambda > 0.0);
        // the constant function gives the upper bound area / perimeter
        assert!(r.lambda <= 0.5 / (2.0 + 2f64.sqrt()) + 1e-12);
    }
}
