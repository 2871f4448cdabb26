//! Fundamental domains for affine Schottky groups acting on Minkowski
//! 3-space, bounded by crooked planes.
//!
//! The crate is layered bottom-up:
//!
//! * [`lorentz`]: the Lorentzian form, null frames and the circle at infinity.
//! * [`isometry`]: linear and affine isometries, eigen-data, distortion and
//!   compression estimates.
//! * [`schottky`]: Schottky groups acting on the hyperbolic plane.
//! * [`halfspace`]: crooked planes, crooked half-spaces and their distances.
//! * [`affine`]: affine Schottky groups, point location and tiling.
//! * [`zigzag`]: slices of crooked planes by spacelike planes.
//! * [`commands`]: the operations behind the `crooked` binary.

pub mod affine;
pub mod commands;
pub mod cone;
pub mod config;
pub mod halfspace;
pub mod isometry;
pub mod linalg;
pub mod lorentz;
pub mod precise;
pub mod sampling;
pub mod schottky;
pub mod svg;
pub mod verify;
pub mod word;
pub mod zigzag;

pub use linalg::{Mat3, SpacePoint, Vector3};
