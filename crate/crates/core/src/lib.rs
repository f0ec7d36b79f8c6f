//! Numerical laboratory for n-qudit states over a prime local dimension:
//! Weyl operators and characteristic functions, discrete Wigner functions,
//! stabilizer groups and mean states, the quantum convolution, and the
//! entropic and entanglement measures they interact with.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`, which is what the tolerances in [`tolerance`] assume.

pub mod conv;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod scalar;
pub mod stab;
pub mod tolerance;
pub mod weyl;
pub mod wigner;
pub mod zd;

pub use error::{Error, Result};
pub use scalar::Real;
pub use zd::{symplectic_form, PhasePoint, PhaseSpace, PhaseSubgroup, PrimeModulus};

pub type Complex64 = num_complex::Complex<f64>;
pub type Operator = linalg::Operator<f64>;
pub type DensityOperator = linalg::DensityOperator<f64>;
pub type Spectrum = linalg::Spectrum<f64>;
pub type WeylOperator = weyl::WeylOperator<f64>;
pub type CharTable = weyl::CharTable<f64>;
pub type PhasePointOperator = wigner::PhasePointOperator<f64>;
pub type WignerTable = wigner::WignerTable<f64>;
pub type StabilizerGroup = stab::StabilizerGroup<f64>;
pub type MeanState = stab::MeanState<f64>;
pub type ConditionalEntropy = measures::ConditionalEntropy<f64>;
pub type ExtremalityReport = measures::ExtremalityReport<f64>;
pub type ConvTrajectory = conv::ConvTrajectory<f64>;
