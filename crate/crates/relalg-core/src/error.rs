use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by all modules of the crate.
///
/// Checks that are expected to fail on legitimate inputs (clause
/// satisfaction, algebra validation, ...) report through their own result
/// types; `Error` is reserved for ill-formed inputs and exceeded bounds.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("relational arity must be >= 1 (symbol `{0}`)")]
    ZeroRelationalArity(String),
    #[error("invalid quantity lattice: {0}")]
    InvalidLattice(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("arity mismatch for `{symbol}`: expected {expected}, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("index {index} out of range for carrier of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("signatures do not match: {0}")]
    SignatureMismatch(String),
    #[error("map is not relation-preserving")]
    NotPreserving,
    #[error("map is not an algebra morphism: {0}")]
    NotAMorphism(String),
    #[error("map is not surjective")]
    NotSurjective,
    #[error("lifting `{lifting}` is not applicable: {reason}")]
    InapplicableLifting { lifting: String, reason: String },
    #[error("{what} exceeds the configured bound ({actual} > {limit})")]
    BoundExceeded {
        what: String,
        limit: usize,
        actual: usize,
    },
    #[error("equation is not clustered: a premise component has {actual} variables, bound is {bound}")]
    NotClustered { actual: usize, bound: usize },
    #[error("invalid compatible pair: {0}")]
    InvalidPair(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
