//! Model domains, straightening maps, Jacobians and boundary charts.
//!
//! The cusp is `Omega_gamma = {0 < x_n < 1, 0 < x_i < x_n^alpha}` with
//! `alpha = (gamma - 1)/(n - 1)`; `gamma = n` gives the simplex `Omega_n`.

mod boundary;
mod map;
mod params;
mod suite;

pub use boundary::{
    boundary_measure_ratio, classify_boundary_point, distortion_constant, face_parametrization,
    tangential_jacobian, tangential_jacobian_bounds, BoundaryFace, FaceChart,
};
pub use map::CuspMap;
pub use suite::{jacobian_suite, JacobianSuite};
pub use params::{derived_exponents, validate_params, DomainParams, ExponentSet, RawParams, Usage};

/// `t^e` evaluated as `exp(e ln t)`; exact for `t = 1` and `e = 0`.
#[inline]
pub(crate) fn powr(t: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        (e * t.ln()).exp()
    }
}

/// Power weight `t^theta` on the boundary.
pub fn weight_value(theta: f64, t: f64) -> f64 {
    powr(t, theta)
}
