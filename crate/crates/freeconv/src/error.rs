use thiserror::Error;

/// Errors surfaced by the engine.
///
/// `Parse` and `Validation` are reserved for the config layer so the CLI can
/// map them to distinct exit codes; everything numerical that fails does so
/// under one of the remaining variants rather than panicking.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid transform descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("evaluation point must lie in the open upper half-plane")]
    UpperHalfPlaneRequired,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("vertical-limit extrapolation did not converge: {0}")]
    NonConvergence(String),

    #[error("root search failed: {0}")]
    BracketFailure(String),

    #[error("fixed-point iteration failed: {0}")]
    IterationDiverged(String),

    #[error("undecided: {0}")]
    Undecided(String),

    #[error("numerical tolerance conflict: {0}")]
    ToleranceConflict(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config validation error: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
