//! Binary permeability inversion through QUBOs.
//!
//! Heads from a Darcy forward model become a quadratic binary objective whose
//! minimizer is the generating field. The crate builds those objectives,
//! shrinks them with roof duality, samples them with a simulated annealer on
//! a Chimera graph, and repairs the samples with local exact optimization and
//! multi-qubit correction.

pub mod anneal;
pub mod darcy;
pub mod error;
pub mod postprocess;
pub mod qubo;
pub mod roof;
pub mod scalar;
pub mod seed;

pub use error::{Error, Result};
pub use num_rational::BigRational as Rational;
pub use scalar::{Real, Scalar};

pub type Field64 = darcy::PermeabilityField<f64>;
pub type Field32 = darcy::PermeabilityField<f32>;
pub type FieldExact = darcy::PermeabilityField<Rational>;
pub type HeadField64 = darcy::HeadField<f64>;
pub type HeadField32 = darcy::HeadField<f32>;
pub type HeadFieldExact = darcy::HeadField<Rational>;

pub type Qubo64 = qubo::Qubo<f64>;
pub type Qubo32 = qubo::Qubo<f32>;
pub type QuboExact = qubo::Qubo<Rational>;
