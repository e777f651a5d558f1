//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // ---- monoids ----------------------------------------------------------
    #[error("`{value}` is not an element of the {monoid} monoid")]
    InvalidElement { monoid: String, value: String },

    #[error("cannot subtract {subtrahend} from {minuend}: {subtrahend} is not below {minuend} in the natural order")]
    NotSubtractable { minuend: String, subtrahend: String },

    #[error("unsupported monoid: {0}")]
    UnsupportedMonoid(String),

    #[error("invalid monoid table: {0}")]
    InvalidTable(String),

    #[error("unknown monoid `{0}`")]
    UnknownMonoid(String),

    #[error("no eventual period: {0}")]
    NotEventuallyPeriodic(String),

    // ---- schemas, databases, INDs ----------------------------------------
    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("relation `{relation}` has no attribute `{attribute}`")]
    UnknownAttribute { relation: String, attribute: String },

    #[error("attribute `{attribute}` repeated in `{context}`")]
    DuplicateAttribute { context: String, attribute: String },

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("the reserved constant `*` may not occur in input databases (relation `{0}`)")]
    ReservedConstant(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("monoid mismatch: {left} vs {right}")]
    MonoidMismatch { left: String, right: String },

    // ---- inference rules -------------------------------------------------
    #[error("index {index} out of range for an IND of arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("index {0} selected twice")]
    DuplicateIndex(usize),

    #[error("transitivity needs matching middles: `{left}` then `{right}`")]
    MiddleMismatch { left: String, right: String },

    #[error("premise mismatch: {0}")]
    PremiseMismatch(String),

    #[error("invalid proof: {0}")]
    InvalidProof(String),

    // ---- chase and entailment --------------------------------------------
    #[error("the chase exceeded its budget of {0} steps")]
    ChaseBudgetExceeded(usize),

    #[error("the monoid could not be classified: {0}")]
    UnclassifiedMonoid(String),

    #[error("invalid absorptive chain: {0}")]
    InvalidChain(String),

    #[error("invalid absorptive pair: {0}")]
    InvalidPair(String),

    #[error("the top element does not dominate the submonoid: {0}")]
    DominanceFailure(String),

    #[error("`{0}` is derivable, so no countermodel exists")]
    NotRefutable(String),

    #[error("{construction} construction failed verification: {reason}")]
    CountermodelRejected {
        construction: String,
        reason: String,
    },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    // ---- oracle ----------------------------------------------------------
    #[error("search space of {size} databases exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    // ---- io --------------------------------------------------------------
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
