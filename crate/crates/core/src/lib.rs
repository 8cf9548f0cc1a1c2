//! Hyperpolygon spaces, their involution fixed loci, and Minkowski polygon spaces.
//!
//! The crate works with star-shaped quiver data `(p, q)`, where each `p_i` is
//! a row covector and each `q_i` a column vector in `C²`, subject to the real
//! and complex moment-map equations with weights `α`. Modules:
//!
//! * [`algebra`]: 2×2 complex matrices, Minkowski vectors, `su(1,1)` and `su(2)`.
//! * [`hyperpolygon`]: moment maps, short and straight sets, stability, sampling.
//! * [`gauge`]: the group action, Kempf–Ness normalization, local charts.
//! * [`involution`]: the fixed points of `(p, q) ↦ (-p, q)` and their census.
//! * [`minkowski`]: closed polygons in `R^{2,1}`, bending, witnesses.
//! * [`correspond`]: parabolic Higgs residues and the `Z_S` ↔ Minkowski maps.

pub mod algebra;
pub mod correspond;
pub mod error;
pub mod gauge;
pub mod hyperpolygon;
pub mod involution;
pub mod minkowski;
pub mod numeric;

pub use error::{Error, Result};
