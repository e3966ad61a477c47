//! Ranks and Chern characters of bundles of coinvariants on moduli of stable
//! pointed curves, computed from fusion data.
//!
//! The exact path works over [`num_rational::BigRational`]; floating point
//! appears only in the semisimple decomposition used as a cross-check.

pub mod chern;
pub mod fusion;
pub mod graphs;
pub mod io;
pub mod lattice;
pub mod ranks;
pub mod scalar;
pub mod taut;

pub use num_rational::BigRational;

/// Exact rational scalar used throughout.
pub type Rational = BigRational;
/// Element of the fusion algebra with exact coefficients.
pub type QVector = fusion::FusionVector<Rational>;
/// Semisimple data at double precision.
pub type SemisimpleF64 = fusion::SemisimpleData<f64>;
/// Tautological class with exact coefficients.
pub type QClass = taut::TautClass<Rational>;
/// Tautological class with double-precision coefficients.
pub type FClass = taut::TautClass<f64>;
