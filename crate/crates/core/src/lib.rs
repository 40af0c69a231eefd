//! Decomposable, completely bounded and matrix-regular tensor norms for
//! finite-dimensional C*-algebras and their trace duals.

pub mod algebra;
pub mod choi;
pub mod error;
pub mod linalg;
pub mod norms;
pub mod random;
pub mod sdp;
pub mod verify;

pub use error::{Error, Result};
