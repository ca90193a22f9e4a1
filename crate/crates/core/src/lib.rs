//! Finite windows onto weighted Cayley graphs and the Schrödinger operators
//! living on them.
//!
//! The crate builds patches of built-in groups (`Z^d`, `Z x Z/2`, the
//! lamplighter group, `BS(1,2)`, regular trees), assembles `H = Δ + q` as sparse
//! rows and finite compressions, certifies one-by-one exhaustions, decides
//! `λ`-uniqueness on finite regions, and estimates integrated densities of
//! states along Følner sequences.
//!
//! Assembly is generic over [`Scalar`] (floats or exact rationals); eigensolves
//! run in any [`RealScalar`].

pub mod error;
pub mod exhaustion;
pub mod graph_core;
pub mod groups;
pub mod operators;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};

/// Library version, recorded in run reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use scalar::{convert, RealScalar, Scalar};

use num_rational::BigRational;

pub type Patch64 = graph_core::Patch<f64>;
pub type PatchQ = graph_core::Patch<BigRational>;
pub type CayleyOracle64 = groups::CayleyOracle<f64>;
pub type CayleyOracleQ = groups::CayleyOracle<BigRational>;
pub type CompressedOperator64 = operators::CompressedOperator<f64>;
pub type CompressedOperatorQ = operators::CompressedOperator<BigRational>;
pub type PotentialSpec64 = operators::PotentialSpec<f64>;
pub type PotentialSpecQ = operators::PotentialSpec<BigRational>;
pub type Scheme64 = operators::OperatorWeightScheme<f64>;
pub type SchemeQ = operators::OperatorWeightScheme<BigRational>;
pub type EigenReport64 = spectral::EigenReport<f64>;
