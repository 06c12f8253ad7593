//! Three-dimensional strip packing.
//!
//! Boxes with sides in `(0, 1]` are packed into the strip `[0,1] x [0,1] x [0, inf)`
//! without rotation. The crate provides a segment-based harmonic packer with a
//! lower-bound certificate, an approximation scheme for square-base boxes, and
//! exact oracles for small instances. Geometry is exact over rationals.

pub mod aptas;
pub mod binpack;
pub mod error;
pub mod generate;
pub mod harmonic;
pub mod io;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod ssp;

pub use error::{Error, Result};
pub use model::{validate_packing, Axis, Box3, BoxId, Instance, Packing, Placement};
pub use rational::Rational;
