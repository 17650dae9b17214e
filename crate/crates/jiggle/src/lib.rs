//! Crystalline subdivision of ordered simplicial complexes and jiggling of
//! piecewise maps into piecewise linear solutions of open, fiberwise dense
//! first-order differential relations.
//!
//! The crate is organised bottom-up:
//!
//! - [`complex`]: embedded ordered complexes, stars and rings, colorings and
//!   the shape functionals `rmin`, `rmax` and `Λ`.
//! - [`subdivision`]: crystalline subdivision, barycentric cone off, the
//!   generalized (annulus) subdivision, model simplices and nice covers.
//! - [`pl_maps`]: piecewise smooth and piecewise linear maps, C⁰/C¹ distances,
//!   linearization, interpolation and join.
//! - [`relations`]: 1-jets, linear extensions and the relation oracles.
//! - [`jiggling`]: slope perturbation and the jiggling drivers.
//! - [`cli`]: the command line front end.

pub mod cli;
pub mod complex;
pub mod error;
pub mod jiggling;
pub mod pl_maps;
pub mod relations;
pub mod subdivision;

pub use error::{Error, Result};
