//! Upper bounds on the size and asymptotic rate of codes in spheres,
//! projective spaces, their products, and Grassmann and Stiefel manifolds
//! with the chordal distance.
//!
//! Module map:
//!
//! - [`orthopoly`]: zonal polynomial families, recurrences, zeros, dimensions.
//! - [`spaces`]: space descriptors and distance/angle reductions.
//! - [`geometry`]: concrete points, principal angles, embeddings, sampling.
//! - [`finite_bounds`]: finite-parameter linear programming bounds.
//! - [`asymptotic`]: asymptotic rate bounds and comparison curves.
//! - [`verify`]: randomized invariant checks.
//! - [`cli`]: the `packing-bounds` command-line harness.

pub mod asymptotic;
pub mod cli;
pub mod error;
pub mod finite_bounds;
pub mod geometry;
pub mod numeric;
pub mod orthopoly;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
pub use orthopoly::PolyFamily;
pub use spaces::{AngleKind, AngleSpec, Field, Space};
