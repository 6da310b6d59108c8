//! Distortion constants of the straightening map, Sobolev and weighted
//! boundary norms, change-of-variables checks and embedding ranges.

mod distortion;
mod measure;
mod norms;
mod ranges;

pub use distortion::{k_pp_estimate, k_ps_estimate, KppEstimate};
pub use measure::{area_formula_check, area_formula_check_on, change_of_variables_check, AreaCheck, ModelBox, EPS_FLOOR};
pub use norms::{
    dirichlet_norm, fem_norm_parts, profile_norm_parts, sobolev_norm, sobolev_norm_profile, weighted_boundary_norm,
    NormKind, NormValue,
};
pub use ranges::{embedding_ranges, ExponentRange, RangeReport};
