//! Exact computer algebra for hermitian integral geometry: the algebra
//! of unitarily invariant valuations on ℂⁿ, the space of invariant
//! curvature measures, the isomorphic family of valuation algebras on
//! complex space forms, and the global and local kinematic operators.
//!
//! All arithmetic is exact: scalars live in the fraction field of
//! Laurent polynomials over ℚ in one transcendental symbol `Π` standing
//! for π, so every identity in the library is checked as an exact
//! polynomial identity rather than numerically.

pub mod basis;
pub mod combinatorics;
pub mod curvature;
pub mod curved;
pub mod error;
pub mod kinematic;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod valuation;

pub use error::{Error, Result};
pub use scalar::{omega, Rational, Scalar};
pub use valuation::{dim_val, Context, Valuation};
