//! Exact open-system dynamics of a damped quantum harmonic oscillator.
//!
//! The master-equation generator for a harmonic mode coupled to a thermal
//! bath with detailed balance admits a closed-form spectral resolution: every
//! eigenvalue is `lambda_{j,k} = -(j/2) kappa - i k omega` and every
//! eigenprojection is a rank-one pairing of an explicit right eigenvector
//! with an explicit left functional. This crate builds those objects on a
//! truncated Fock space and cross-validates three independent propagators:
//!
//! * [`spectral::spectral_propagate`] — the truncated eigenmode sum,
//! * [`disentangle::disentangled_propagate`] — an exact product of
//!   superoperator exponentials obtained from a Riccati solution,
//! * [`oracle::expm_propagate`] — brute-force matrix exponential of the
//!   vectorized generator.
//!
//! Every combinatorial coefficient entering the eigenvectors is evaluated in
//! arbitrary-precision rational arithmetic ([`combinatorics`]), and the
//! identities that make the biorthogonal machinery close are verified there
//! exactly rather than in floating point.

pub mod combinatorics;
pub mod disentangle;
mod error;
pub mod fock;
pub mod io;
pub mod ladder;
pub mod observables;
pub mod oracle;
pub mod params;
pub mod spectral;
pub mod states;
pub mod superop;
pub mod tolerances;

pub use error::Error;
pub use fock::{fock_operator, gibbs_state, validate_density, DensityMatrix, FockOperator, OperatorKind};
pub use params::ModelParams;
pub use superop::SuperOperator;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Double-precision complex scalar used for all matrix entries.
pub type C64 = num_complex::Complex64;
