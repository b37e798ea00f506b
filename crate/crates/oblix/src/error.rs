//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (non-finite entries, empty
    /// matrices where forbidden, bad dimensions, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two subspaces (or a subspace and an operator) live in spaces of
    /// different dimension.
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    /// A Gram matrix that the operation must invert is numerically singular.
    #[error("gram matrix numerically singular: {0}")]
    SingularGram(String),

    /// A diagonal weight violates the constraints of its declared kind.
    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    /// The pair (D, S) admits no D-selfadjoint projection onto S.
    /// Unreachable in finite dimension for semidefinite D; kept so the API
    /// is total.
    #[error("incompatible pair: {0}")]
    Incompatible(String),

    /// A projection-family parameter violates its range constraint.
    #[error("invalid family parameter: {0}")]
    InvalidParameter(String),

    /// Range and nullspace of a putative projection are at angle ~0;
    /// the norm formula would blow up.
    #[error("degenerate angle between range and nullspace (cos >= 1 - 1e-12)")]
    DegenerateAngle,

    /// A precondition such as S ⊆ T or a commutation requirement failed.
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    /// The requested enumeration exceeds the subset-enumeration cap.
    #[error("problem size {size} exceeds enumeration cap {cap}")]
    TooLarge { size: usize, cap: usize },

    /// A matrix required to have full column rank does not.
    #[error("matrix is not of full column rank: {0}")]
    NotFullRank(String),

    /// Log-space weight normalization underflowed to zero.
    #[error("numerical underflow in hull weight normalization")]
    NumericalUnderflow,

    /// A synthesis matrix is not surjective, so it defines no frame.
    #[error("not a frame: {0}")]
    NotAFrame(String),

    /// An identity the library is built around failed beyond tolerance.
    /// The CLI maps this to its dedicated exit code.
    #[error("identity `{identity}` violated: {detail}")]
    IdentityViolation { identity: String, detail: String },

    /// Input file could not be parsed.
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn identity(identity: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::IdentityViolation {
            identity: identity.into(),
            detail: detail.into(),
        }
    }
}
