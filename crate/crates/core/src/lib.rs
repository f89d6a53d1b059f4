//! Constructive toolkit for writing positive matrices and block operators as
//! commutators `AB − BA` of positive operators.

pub mod band;
pub mod certificate;
pub mod error;
pub mod io;
pub mod matrix;
pub mod nilpotent;
pub mod norms;
pub mod pelczynski;
pub mod quasi;
pub mod random;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{Matrix, MatrixValue};
pub use scalar::{Rational, Scalar, ScalarValue};
