//! Serendipity virtual element methods on general polygonal meshes.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: points, polygons, meshes, collinearity analysis, quadrature
//!   over polygons and the mesh generators used by the convergence studies.
//! - [`polynomials`]: scaled monomial bases, monomial integrals, mass matrices
//!   and one-dimensional Gauss / Gauss-Lobatto rules.
//! - [`element`]: per-element degree-of-freedom layouts, the `D` matrix, the
//!   serendipity projector and the `L2` projections built on top of it.
//! - [`assembly`]: local convection-diffusion-reaction forms, global assembly,
//!   Dirichlet elimination and the sparse solve.
//! - [`experiments`]: model problems, error norms, convergence studies and
//!   degree-of-freedom accounting.

pub mod assembly;
pub mod element;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod polynomials;

pub use error::{Error, Result};
