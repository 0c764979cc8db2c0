//! Discrete Steklov eigenvalues on graphs with boundary.
//!
//! The numerical core is generic over the scalar type (`f32`, `f64`); the
//! Dirichlet-to-Neumann matrix can also be formed exactly over
//! [`Rational`]. The aliases below fix the common `f64` instantiations.

pub mod error;
pub mod graph;
pub mod harness;
pub mod immersion;
pub mod linalg;
pub mod packing;
pub mod refine;
pub mod resistance;
pub mod scalar;
pub mod spectrum;

pub use error::{Error, Result};
pub use graph::{BoundaryGraph, RotationGraph};
pub use scalar::{Field, Scalar};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type Dtn = spectrum::DtnMatrix<f64>;
pub type ExactDtn = spectrum::DtnMatrix<Rational>;
pub type Spectrum = spectrum::SteklovSpectrum<f64>;
pub type Packing = packing::CirclePacking<f64>;
pub type SpherePoints = packing::SphereConfiguration<f64>;
pub type Resistance = resistance::ResistanceResult<f64>;
