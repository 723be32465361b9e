//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong when constructing matrices, validating
/// witnesses, or running one of the decision procedures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Matrices must be at least 2x2; coherence is meaningless for d < 2.
    #[error("dimension must be at least 2 (got {0})")]
    DimensionTooSmall(usize),

    /// Entry list length does not match the declared dimension.
    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    BadEntryCount { dim: usize, expected: usize, got: usize },

    /// Input fails the Hermitian symmetry check `A = A^dag`.
    #[error("input is not Hermitian (max deviation {0:.3e})")]
    NonHermitianInput(f64),

    /// Two operands (or an operand and an expectation) disagree on dimension.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// A density matrix must be positive semidefinite.
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),

    /// A density matrix must have unit trace.
    #[error("trace is not 1 (got {0})")]
    TraceNotOne(f64),

    /// Incoherent states are probability vectors on the diagonal.
    #[error("probability {value:.3e} at index {index} is negative")]
    NegativeProbability { index: usize, value: f64 },

    /// Incoherent states are probability vectors on the diagonal.
    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySumNotOne(f64),

    /// A vector argument was expected to have unit Euclidean norm.
    #[error("vector is not normalized (norm {0})")]
    NonUnitVector(f64),

    /// Witness condition: every diagonal entry must be nonnegative.
    #[error("witness diagonal entry {index} is negative ({value:.3e})")]
    NegativeDiagonal { index: usize, value: f64 },

    /// Witness condition: at least one eigenvalue must be negative.
    #[error("witness has no negative eigenvalue (min eigenvalue {0:.3e})")]
    NoNegativeEigenvalue(f64),

    /// A construction that requires coherence was fed an incoherent input.
    #[error("input has no coherence to witness")]
    IncoherentInput,

    /// A multi-state operation found an incoherent state among its inputs.
    #[error("input state {0} is incoherent")]
    InputIncoherent(usize),

    /// Comparability procedures need at least two operands.
    #[error("need at least {needed} inputs, got {got}")]
    NotEnoughInputs { needed: usize, got: usize },

    /// Common-state extraction exhausted its iteration budget without
    /// certifying a state; the instance should be treated as marginal.
    #[error("no common detected state found within the iteration budget")]
    ExtractionFailed,

    /// A candidate common witness failed to detect one of the input states.
    #[error("witness does not detect state {index} (trace {value:.3e})")]
    NotDetected { index: usize, value: f64 },

    /// Mixing weights must match the number of states and be positive.
    #[error("expected {expected} weights, got {got}")]
    WeightCountMismatch { expected: usize, got: usize },

    /// Mixing weights must match the number of states and be positive.
    #[error("weight {index} is not positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },

    /// The robustness minimizer is only defined for coherent inputs.
    #[error("robustness is {0:.3e}; the minimizer state is undefined below 1e-6")]
    TauUndefined(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
