//! Weighted Sobolev trace machinery on outward cuspidal domains
//! `Omega_gamma = {0 < x_n < 1, 0 < x_i < x_n^alpha}` and the weighted
//! Steklov `(p, q)`-eigenvalue problem on them.
//!
//! - [`geometry`]: parameters, derived exponents, straightening maps and
//!   boundary charts.
//! - [`quadrature`]: graded rules for power-weight integrands.
//! - [`operators`]: distortion constants, norms and measure identities.
//! - [`embedding_lab`]: scaling experiments with the cutoff family
//!   `eta(x_n / eps)`.
//! - [`steklov`]: meshes, discrete functionals and eigenvalue solvers.
//!
//! ```
//! use ncusp::geometry::{validate_params, RawParams, Usage};
//!
//! let params = validate_params(&RawParams::new(2, 1.5, 3.0, 2.0), Usage::Steklov)?;
//! let e = params.exponents();
//! assert_eq!(e.p_star, 3.0);
//! assert!((e.beta - 2.0).abs() < 1e-12);
//! # Ok::<(), ncusp::Error>(())
//! ```

pub mod embedding_lab;
mod error;
pub mod geometry;
pub mod operators;
pub mod quadrature;
pub mod sampling;
pub mod steklov;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/quadrature.md")]
    mod quadrature {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/scaling.md")]
    mod scaling {}
    #[doc = include_str!("../../../book/src/steklov.md")]
    mod steklov {}
}
