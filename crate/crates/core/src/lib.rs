//! Numerical laboratory for linearized shallow ReLU^k networks on the sphere
//! `S^d`: activation spectra, dyadic kernel blocks, antipodally quasi-uniform
//! point sets and best-approximation rate experiments.
//!
//! The numerical core is generic over the floating-point scalar
//! ([`Scalar`], implemented for `f32` and `f64`); the aliases below fix `f64`.

pub mod activation;
pub mod approximation;
pub mod cutoff;
pub mod error;
pub mod experiments;
pub mod kernel;
pub mod linalg;
pub mod points;
pub mod polynomials;
pub mod scalar;
pub mod special;
pub mod surface;
pub mod verify;

pub use activation::{ActivationOrder, CoefficientTable};
pub use approximation::{BestApprox, GramKernel, GramSystem, ZonalTarget};
pub use cutoff::BlockSymbol;
pub use error::{Error, Result};
pub use experiments::{RateConfig, RateReport};
pub use kernel::{DegreeBlock, DominanceCertificate, DyadicBlock};
pub use linalg::Matrix;
pub use points::{PointSet, UniformityReport};
pub use polynomials::{QuadratureRule, SphereDim};
pub use scalar::Scalar;

/// Polynomial degree.
pub type DegreeIndex = usize;

pub type CoefficientTable64 = CoefficientTable<f64>;
pub type PointSet64 = PointSet<f64>;
pub type DyadicBlock64 = DyadicBlock<f64>;
pub type DegreeBlock64 = DegreeBlock<f64>;
pub type ZonalTarget64 = ZonalTarget<f64>;
pub type GramSystem64 = GramSystem<f64>;
pub type Matrix64 = Matrix<f64>;
pub type QuadratureRule64 = QuadratureRule<f64>;
