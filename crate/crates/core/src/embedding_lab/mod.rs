//! Scaling experiments with the test family `u_eps(x) = eta(x_n / eps)`.
//!
//! Every `u_eps` depends on `x_n` alone, so all norms reduce to integrals
//! over the height with the cross-section weight `t^{alpha(n-1)}` (volume)
//! or the face densities (boundary).

mod cutoff;
mod scaling;

pub use cutoff::{cutoff_eta, Cutoff};
pub use scaling::{
    default_eps_grid, log2_slope, scaling_slopes, sharpness_scan, test_function_norms, ScalingResult, ScanRow,
    TestNorms, SIGN_MARGIN,
};
