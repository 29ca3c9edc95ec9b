use thiserror::Error;

/// Errors raised by the exact and numeric routines of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("digit supply exhausted: need partial quotient {needed}, only {available} available")]
    DigitsExhausted { needed: usize, available: usize },

    #[error("precision cap of {cap} bits reached before the result was resolved")]
    PrecisionExhausted { cap: u32 },

    #[error("insufficient structure: {0}")]
    InsufficientStructure(String),

    #[error("invalid roof: {0}")]
    InvalidRoof(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A guarantee of the shadowing lemma failed on a concrete pair. This
    /// always points at an implementation defect.
    #[error("lemma guarantee violated: {0}")]
    LemmaViolation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
