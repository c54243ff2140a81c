//! Geometry of closed geodesics on cusped hyperbolic surfaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`moebius`]: exact `PSL(2, Z)` arithmetic, axis predicates and
//!   extended-precision lengths.
//! - [`strand`]: winding numbers and length bounds for geodesic arcs inside a
//!   cusp neighbourhood.
//! - [`constants`]: the thick/thin constants of a surface and the certified
//!   searches for the thresholds `D` and `K`.
//! - [`words`]: cyclic words in the free group of rank two, evaluated in the
//!   level-2 congruence subgroup (the thrice punctured sphere).
//! - [`intersection`]: self-intersection numbers of closed geodesics on the
//!   thrice punctured sphere, with an independent numeric validator.
//! - [`pants`]: pair-of-pants formulas and the small-systole example surface.
//! - [`survey`]: length/self-intersection tables over all words up to a
//!   given length.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod intersection;
pub mod moebius;
pub mod pants;
pub mod precision;
pub mod strand;
pub mod survey;
pub mod words;

pub use error::{Error, Result};
pub use precision::PrecisionContext;
