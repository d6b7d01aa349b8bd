//! Convex hull peeling sequences of planar point sets.
//!
//! - [`geometry`]: exact rational predicates and hulls.
//! - [`construction`]: the recursive three-ray sets `S_n` and `B_n`.
//! - [`peeling`]: exact counting, enumeration and estimation of peeling sequences.
//! - [`partition`]: simplified sequences over a partition and the multinomial bound.
//! - [`verifier`]: certified checks of the upper-bound arithmetic.
//! - [`io`] and [`svg`]: file formats and rendering.

pub mod construction;
pub mod error;
pub mod geometry;
pub mod io;
pub mod partition;
pub mod peeling;
pub mod svg;
pub mod verifier;

pub use error::{Error, Result};
pub use geometry::{PointSet, Rational, RationalPoint};
pub use peeling::PeelCount;
