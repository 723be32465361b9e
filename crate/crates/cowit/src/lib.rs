//! # cowit
//!
//! Numerical toolkit for coherence witnesses of finite-dimensional quantum
//! states, written against a fixed incoherent basis.
//!
//! A coherence witness is a Hermitian operator `W` with nonnegative diagonal
//! and at least one negative eigenvalue: `tr(W delta) >= 0` for every
//! incoherent (diagonal) state `delta`, so `tr(W rho) < 0` certifies that
//! `rho` carries coherence. The crate covers:
//!
//! - [`mat`]: dense complex Hermitian linear algebra sized for d <= 64
//!   (eigendecomposition, dephasing, trace pairings, norms).
//! - [`witness`]: witness validation and the three standard constructions
//!   (projector-based, geometric, dephasing), plus detection.
//! - [`compare`]: decision procedures with machine-checkable certificates
//!   for when a family of witnesses shares a detected state and for when a
//!   family of coherent states shares a witness.
//! - [`robustness`]: robustness of coherence via a cutting-plane method,
//!   with the optimal noise state and the incoherent mixture it induces.
//! - [`oracle`]: slow, independent brute-force checks (grid scans, seeded
//!   random searches) used to cross-validate the solvers in tests.
//!
//! Solvers are deterministic: given the same inputs they produce the same
//! outputs, and anything randomized takes an explicit seed.

#![forbid(unsafe_code)]

mod error;
mod simplex;

pub mod compare;
pub mod mat;
pub mod oracle;
pub mod robustness;
pub mod witness;

pub use error::{Error, Result};
pub use mat::{dephase, trace_pair, DensityMatrix, EigenDecomposition, HermitianMatrix, IncoherentState};
pub use witness::{is_coherent, CoherenceWitness, DetectionReport};

