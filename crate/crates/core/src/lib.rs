//! Boundary Gaudin magnets and Calogero-Moser models of B, C and D type.
//!
//! The crate builds both sides of the quantum-classical duality and checks
//! the relations between them in double precision and in exact arithmetic.

pub mod bethe;
pub mod error;
pub mod factorize;
pub mod identities;
pub mod lax;
pub mod matrix;
pub mod model;
pub mod poly;
pub mod quantum;
pub mod sampling;
pub mod scalar;
pub mod series;
pub mod suite;

pub use error::{Error, Result};
pub use matrix::{Residual, SquareMatrix};
pub use poly::Polynomial;
pub use scalar::{Exact, ExactComplex, Scalar, Sqrt2Ext};

/// Double-precision real scalars.
pub type Real = f64;
/// Double-precision complex scalars.
pub type Complex = num_complex::Complex64;
