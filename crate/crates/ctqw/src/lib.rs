//! Continuous-time quantum walks on 1D regular networks under dephasing.
//!
//! A 1D regular network is a cycle of `N` nodes in which every node is linked
//! to its `2l` nearest neighbors (`l` on either side). This crate provides
//!
//! - the circulant topology and its closed-form spectrum ([`network`]),
//! - coherent (unitary) and classical (relaxational) transition probabilities
//!   via spectral sums ([`coherent`]),
//! - direct integration of the dephasing master equation for the full density
//!   matrix, with an exact superoperator-exponential oracle for small `N`
//!   ([`master_eq`]),
//! - the large-decoherence closed forms: per-mode decay rates, the asymptotic
//!   node distribution, and its exact time average ([`large_decoherence`]),
//! - total-variation distance, measured instantaneous/average mixing times,
//!   and their analytic lower/upper bounds ([`mixing`]).
//!
//! All quantities are dimensionless; the decoherence rate `gamma` damps every
//! density-matrix off-diagonal at the same rate.

pub mod coherent;
pub mod large_decoherence;
pub mod master_eq;
pub mod mixing;
pub mod network;

pub use coherent::ProbabilityDist;
pub use large_decoherence::DecayRates;
pub use master_eq::{DensityMatrix, SimConfig};
pub use mixing::MixingReport;
pub use network::{RegularNetwork, Spectrum};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("integration invariant violated: {0}")]
    InvariantViolation(String),
    #[error("distribution did not cross the threshold by t = {t_cap}")]
    NotMixed { t_cap: f64 },
    #[error("distribution length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}
