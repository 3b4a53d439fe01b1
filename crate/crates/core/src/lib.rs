//! Geometry of n-dimensional subspaces of C^d: principal angles, the
//! minimal angle, the gap metric, structure-preserving maps, and a harness
//! that checks minimal-angle preservers constructively.

pub mod error;
pub mod grassmann;
pub mod lab;
pub mod maps;
pub mod numerics;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
