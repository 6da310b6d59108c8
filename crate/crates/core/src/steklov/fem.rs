use rayon::prelude::*;

use super::linalg::CsrMatrix;
use super::mesh::TriMesh;
use crate::geometry::{powr, DomainParams};
use crate::quadrature::{gauss_legendre, graded_interval_rule, triangle_rule, DEFAULT_PANELS, DEFAULT_RATIO};
use crate::Result;

/// Piecewise-linear function given by its nodal values.
#[derive(Clone, Debug)]
pub struct FemFunction<'a> {
    mesh: &'a TriMesh,
    values: Vec<f64>,
}

impl<'a> FemFunction<'a> {
    pub fn new(mesh: &'a TriMesh, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.dof(), "one value per vertex");
        FemFunction { mesh, values }
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: &'a TriMesh, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = mesh.vertices().iter().map(|v| f(v[0], v[1])).collect();
        FemFunction { mesh, values }
    }

    pub fn mesh(&self) -> &'a TriMesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Constant gradient on triangle `t`.
    pub fn gradient(&self, t: usize) -> [f64; 2] {
        let tri = self.mesh.triangles()[t];
        let (_, g) = element_geometry(self.mesh, tri);
        let mut out = [0.0; 2];
        for k in 0..3 {
            out[0] += self.values[tri[k]] * g[k][0];
            out[1] += self.values[tri[k]] * g[k][1];
        }
        out
    }
}

/// Area and basis gradients of a P1 triangle.
pub(crate) fn element_geometry(mesh: &TriMesh, tri: [usize; 3]) -> (f64, [[f64; 2]; 3]) {
    let [p0, p1, p2] = tri.map(|i| mesh.vertices()[i]);
    let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    let b = [p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]];
    let c = [p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]];
    let g = [0, 1, 2].map(|k| [b[k] / det, c[k] / det]);
    (0.5 * det, g)
}

/// Values of `(E, grad E, B, grad B)`.
#[derive(Clone, Debug)]
pub struct Functionals {
    pub energy: f64,
    pub grad_energy: Vec<f64>,
    pub boundary: f64,
    pub grad_boundary: Vec<f64>,
}

#[derive(Clone, Debug)]
struct Element {
    nodes: [usize; 3],
    area: f64,
    grads: [[f64; 2]; 3],
}

/// Quadrature point on a boundary edge: `(weight * x_2^theta, s)` where the
/// point is `(1 - s) P + s Q`.
#[derive(Clone, Debug)]
struct EdgeRule {
    nodes: [usize; 2],
    points: Vec<(f64, f64)>,
}

/// Cached element and edge data for repeated evaluation of the discrete
/// functionals
/// `E(u) = int (|grad u|^2 + eps^2)^{p/2} - eps^p + (u^2 + eps^2)^{p/2} - eps^p`
/// and `B(u) = int_boundary |u|^q x_2^theta`.
#[derive(Clone, Debug)]
pub struct Assembler {
    p: f64,
    q: f64,
    dof: usize,
    elements: Vec<Element>,
    edges: Vec<EdgeRule>,
    mass_points: Vec<([f64; 3], f64)>,
}

const EDGE_GAUSS: usize = 6;
const MASS_ORDER: usize = 2;

impl Assembler {
    pub fn new(mesh: &TriMesh, params: &DomainParams) -> Result<Self> {
        let elements = mesh
            .triangles()
            .iter()
            .map(|&nodes| {
                let (area, grads) = element_geometry(mesh, nodes);
                Element { nodes, area, grads }
            })
            .collect();
        let theta = params.theta();
        let (gx, gw) = gauss_legendre(EDGE_GAUSS);
        let tip_rule = graded_interval_rule(theta.min(0.0), DEFAULT_PANELS, DEFAULT_RATIO)?;
        let mut edges = Vec::with_capacity(mesh.boundary_edges().len());
        for e in mesh.boundary_edges() {
            let len = mesh.edge_length(e);
            let [pp, qq] = e.v.map(|i| mesh.vertices()[i]);
            let points = if mesh.is_tip_edge(e) {
                // parametrize from the tip so the weight is s^theta times a constant
                let from_tip = Some(e.v[0]) == mesh.tip();
                let far = if from_tip { qq } else { pp };
                let scale = powr(far[1], theta);
                tip_rule
                    .nodes()
                    .iter()
                    .zip(tip_rule.weights())
                    .map(|(&s, &w)| {
                        let weight = len * w * scale * powr(s, theta);
                        (weight, if from_tip { s } else { 1.0 - s })
                    })
                    .collect()
            } else {
                gx.iter()
                    .zip(&gw)
                    .map(|(&x, &w)| {
                        let s = 0.5 * (x + 1.0);
                        let h = (1.0 - s) * pp[1] + s * qq[1];
                        (0.5 * len * w * powr(h, theta), s)
                    })
                    .collect()
            };
            edges.push(EdgeRule { nodes: e.v, points });
        }
        let rule = triangle_rule(MASS_ORDER)?;
        let mass_points = rule
            .points()
            .iter()
            .zip(rule.weights())
            .map(|(b, &w)| (*b, w))
            .collect();
        Ok(Assembler {
            p: params.p(),
            q: params.q(),
            dof: mesh.dof(),
            elements,
            edges,
            mass_points,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    /// `E(u)` alone; `reg_eps = 0` gives the unregularized energy.
    pub fn energy(&self, u: &[f64], reg_eps: f64) -> f64 {
        self.energy_impl(u, reg_eps, false).0
    }

    /// `B(u)` alone.
    pub fn boundary(&self, u: &[f64]) -> f64 {
        self.boundary_impl(u, false).0
    }

    /// `int_boundary u x_2^theta`.
    pub fn boundary_moment(&self, u: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                let (ua, ub) = (u[e.nodes[0]], u[e.nodes[1]]);
                e.points.iter().map(|&(w, s)| w * ((1.0 - s) * ua + s * ub)).sum::<f64>()
            })
            .sum()
    }

    pub fn evaluate(&self, u: &[f64], reg_eps: f64) -> Functionals {
        let (energy, grad_energy) = self.energy_impl(u, reg_eps, true);
        let (boundary, grad_boundary) = self.boundary_impl(u, true);
        Functionals {
            energy,
            grad_energy,
            boundary,
            grad_boundary,
        }
    }

    /// Hessian of the regularized energy. Positive definite for `p > 1`:
    /// on each element `D^2 (|g|^2 + eps^2)^{p/2} = p w (I + (p - 2) g g^T / (|g|^2 + eps^2))`
    /// with `w = (|g|^2 + eps^2)^{p/2 - 1}`, and likewise for the mass term.
    pub fn energy_hessian(&self, u: &[f64], eps: f64) -> CsrMatrix {
        let p = self.p;
        let eps2 = eps * eps;
        // (w, (p - 2) / base); a vanishing base only occurs for eps = 0
        let weights = |s: f64| -> (f64, f64) {
            let base = (s + eps2).max(f64::MIN_POSITIVE);
            (p * base.powf(0.5 * p - 1.0), (p - 2.0) / base)
        };
        let local: Vec<[[f64; 3]; 3]> = self
            .elements
            .par_iter()
            .map(|el| {
                let un = el.nodes.map(|i| u[i]);
                let mut g = [0.0; 2];
                for k in 0..3 {
                    g[0] += un[k] * el.grads[k][0];
                    g[1] += un[k] * el.grads[k][1];
                }
                let (w, c) = weights(g[0] * g[0] + g[1] * g[1]);
                let mut h = [[0.0; 3]; 3];
                for a in 0..3 {
                    let ga = el.grads[a];
                    let ag = ga[0] * g[0] + ga[1] * g[1];
                    for b in 0..3 {
                        let gb = el.grads[b];
                        let bg = gb[0] * g[0] + gb[1] * g[1];
                        h[a][b] = el.area * w * (ga[0] * gb[0] + ga[1] * gb[1] + c * ag * bg);
                    }
                }
                for (bc, wq) in &self.mass_points {
                    let v = bc[0] * un[0] + bc[1] * un[1] + bc[2] * un[2];
                    let (w, c) = weights(v * v);
                    let f = el.area * wq * w * (1.0 + c * v * v);
                    for a in 0..3 {
                        for b in 0..3 {
                            h[a][b] += f * bc[a] * bc[b];
                        }
                    }
                }
                h
            })
            .collect();
        let mut triplets = Vec::with_capacity(9 * self.elements.len());
        for (el, h) in self.elements.iter().zip(&local) {
            for a in 0..3 {
                for b in 0..3 {
                    triplets.push((el.nodes[a], el.nodes[b], h[a][b]));
                }
            }
        }
        CsrMatrix::from_triplets(self.dof, triplets)
    }

    fn energy_impl(&self, u: &[f64], eps: f64, with_grad: bool) -> (f64, Vec<f64>) {
        let p = self.p;
        let eps2 = eps * eps;
        let eps_p = if eps > 0.0 { eps.powf(p) } else { 0.0 };
        // phi(s) = (s + eps^2)^{p/2} - eps^p and phi'(s) * 2 for s = |v|^2
        let phi = |s: f64| -> (f64, f64) {
            let base = s + eps2;
            if base == 0.0 {
                return (0.0, 0.0);
            }
            let pw = base.powf(0.5 * p - 1.0);
            if s == 0.0 {
                return (0.0, p * pw);
            }
            (pw * base - eps_p, p * pw)
        };
        let local: Vec<(f64, [f64; 3])> = self
            .elements
            .par_iter()
            .map(|el| {
                let un = el.nodes.map(|i| u[i]);
                let mut g = [0.0; 2];
                for k in 0..3 {
                    g[0] += un[k] * el.grads[k][0];
                    g[1] += un[k] * el.grads[k][1];
                }
                let (e_grad, d_grad) = phi(g[0] * g[0] + g[1] * g[1]);
                let mut e = el.area * e_grad;
                let mut d = [0.0; 3];
                if with_grad {
                    for k in 0..3 {
                        d[k] = el.area * d_grad * (g[0] * el.grads[k][0] + g[1] * el.grads[k][1]);
                    }
                }
                for (b, w) in &self.mass_points {
                    let v = b[0] * un[0] + b[1] * un[1] + b[2] * un[2];
                    let (e_mass, d_mass) = phi(v * v);
                    e += el.area * w * e_mass;
                    if with_grad {
                        for k in 0..3 {
                            d[k] += el.area * w * d_mass * v * b[k];
                        }
                    }
                }
                (e, d)
            })
            .collect();
        let mut grad = if with_grad { vec![0.0; self.dof] } else { Vec::new() };
        let mut total = 0.0;
        for (el, (e, d)) in self.elements.iter().zip(&local) {
            total += e;
            if with_grad {
                for k in 0..3 {
                    grad[el.nodes[k]] += d[k];
                }
            }
        }
        (total, grad)
    }

    fn boundary_impl(&self, u: &[f64], with_grad: bool) -> (f64, Vec<f64>) {
        let q = self.q;
        let mut grad = if with_grad { vec![0.0; self.dof] } else { Vec::new() };
        let mut total = 0.0;
        for e in &self.edges {
            let (ua, ub) = (u[e.nodes[0]], u[e.nodes[1]]);
            let (mut val, mut da, mut db) = (0.0, 0.0, 0.0);
            for &(w, s) in &e.points {
                let v = (1.0 - s) * ua + s * ub;
                let av = v.abs();
                if av == 0.0 {
                    continue;
                }
                let pw = av.powf(q - 1.0);
                val += w * pw * av;
                if with_grad {
                    let d = w * q * pw * v.signum();
                    da += d * (1.0 - s);
                    db += d * s;
                }
            }
            total += val;
            if with_grad {
                grad[e.nodes[0]] += da;
                grad[e.nodes[1]] += db;
            }
        }
        (total, grad)
    }
}

/// `(E, grad E, B, grad B)` for the regularized discrete functionals.
pub fn assemble_functionals(
    mesh: &TriMesh,
    u: &FemFunction<'_>,
    params: &DomainParams,
    reg_eps: f64,
) -> Result<Functionals> {
    Ok(Assembler::new(mesh, params)?.evaluate(u.values(), reg_eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate_params, RawParams, Usage};
    use crate::steklov::generate_cusp_mesh;

    #[test]
    fn zero_function() {
        let params = validate_params(&RawParams::new(2, 1.5, 3.0, 2.0), Usage::Steklov).unwrap();
        let mesh = generate_cusp_mesh(&params, 4, 0.5).unwrap();
        let u = FemFunction::new(&mesh, vec![0.0; mesh.dof()]);
        let f = assemble_functionals(&mesh, &u, &params, 1e-8).unwrap();
        assert_eq!(f.energy, 0.0);
        assert_eq!(f.boundary, 0.0);
        assert!(f.grad_energy.iter().chain(&f.grad_boundary).all(|&g| g == 0.0));
    }

    #[test]
    fn constant_function_p2() {
        let raw = RawParams::new(2, 1.5, 3.0, 2.0);
        let params = validate_params(&raw, Usage::Steklov).unwrap();
        let mesh = generate_cusp_mesh(&params, 6, 0.5).unwrap();
        let u = FemFunction::interpolate(&mesh, |_, _| 1.0);
        let asm = Assembler::new(&mesh, &params).unwrap();
        let e = asm.energy(u.values(), 0.0);
        assert!((e - mesh.area()).abs() < 1e-14);
        // weighted perimeter with x_2^2 along each boundary polyline edge
        let mut exact = 0.0;
        for edge in mesh.boundary_edges() {
            let [a, b] = edge.v.map(|i| mesh.vertices()[i]);
            let len = mesh.edge_length(edge);
            exact += len * (a[1] * a[1] + a[1] * b[1] + b[1] * b[1]) / 3.0;
        }
        assert!((asm.boundary(u.values()) - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn gradient_of_linear_function() {
        let params = validate_params(&RawParams::simplex(2, 1.5, 2.0), Usage::Steklov).unwrap();
        let mesh = generate_cusp_mesh(&params, 3, 0.5).unwrap();
        let u = FemFunction::interpolate(&mesh, |x, y| 2.0 * x - y);
        for t in 0..mesh.triangles().len() {
            let g = u.gradient(t);
            assert!((g[0] - 2.0).abs() < 1e-9 && (g[1] + 1.0).abs() < 1e-9);
        }
    }
}
