//! Error type shared across the toolkit.

use thiserror::Error;

/// Unified error for construction, validation, and analysis failures.
///
/// `Internal` is reserved for checks that can only fail if the library itself
/// is inconsistent (a probability outside [0,1], a commuting model whose
/// marginals disagree with direct computation); callers map it to a distinct
/// exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot normalize a zero vector (norm {norm:.3e})")]
    ZeroVector { norm: f64 },

    #[error("non-finite entry in {what}")]
    NonFinite { what: &'static str },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{what} {size} exceeds the supported maximum {max}")]
    TooLarge {
        what: &'static str,
        size: usize,
        max: usize,
    },

    #[error("enumeration of {count} assignments exceeds the cap {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("pauli strings act on different qubit counts: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },

    #[error("`{word}` is not a pauli word")]
    BadPauliWord { word: String },

    #[error("pauli observable `{id}` needs phase +1 or -1 to be an observable")]
    NonRealPhase { id: String },

    #[error("observable `{id}` is not Hermitian within tolerance")]
    NotHermitian { id: String },

    #[error("observable `{id}` does not square to the identity within tolerance")]
    NotInvolution { id: String },

    #[error("`{id}` is not a valid identifier")]
    BadIdentifier { id: String },

    #[error("duplicate identifier `{id}`")]
    DuplicateId { id: String },

    #[error("unknown observable `{id}`")]
    UnknownObservable { id: String },

    #[error("outcome {outcome} is not in the outcome set of `{id}`")]
    BadOutcome { id: String, outcome: i8 },

    #[error("observable `{id}` is not dichotomic")]
    NotDichotomic { id: String },

    #[error("an event must constrain at least one observable")]
    EmptyEvent,

    #[error("a constraint must mention at least one event or observable")]
    EmptyConstraint,

    #[error("observable `{id}` has an empty outcome set")]
    EmptyOutcomeSet { id: String },

    #[error("a product constraint target must be +1 or -1, got {target}")]
    BadProductTarget { target: i8 },

    #[error("a context must contain at least one observable")]
    EmptyContext,

    #[error("a scenario must declare at least one observable")]
    NoObservables,

    #[error(
        "observables `{a}` and `{b}` are incompatible: no joint statistics are defined for them"
    )]
    IncompatibleEvent { a: String, b: String },

    #[error("partition events {first} and {second} overlap: both are satisfied by {witness}")]
    OverlappingPartition {
        first: usize,
        second: usize,
        witness: String,
    },

    #[error("invalid {what}: {why}")]
    InvalidArgument { what: String, why: String },

    #[error("scenario cannot be written in the text format: {0}")]
    NotRepresentable(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
