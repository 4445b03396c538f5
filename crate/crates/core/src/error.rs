use thiserror::Error;

/// Every failure the library reports. Callers that only need a message can
/// rely on `Display`; the CLI maps all of these to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension error: need at least {min} coordinates, got {got}")]
    Dimension { min: usize, got: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("site matrix is empty")]
    NoSites,

    #[error("ragged matrix: row {row} has {got} entries, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },

    #[error("weights: {0}")]
    Weights(String),

    #[error("invalid number {0:?}")]
    Number(String),

    #[error("infeasible marginals: {0}")]
    Infeasible(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("newick syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("duplicate leaf label {0:?}")]
    DuplicateLabel(String),

    #[error("missing branch length at byte {0}")]
    MissingLength(usize),

    #[error("negative branch length at byte {0}")]
    NegativeLength(usize),

    #[error("tree is not equidistant; leaves above height 0: {}", .0.join(", "))]
    NotEquidistant(Vec<String>),

    #[error("not an ultrametric: {0}")]
    NotUltrametric(String),

    #[error("taxa mismatch: {0}")]
    TaxaMismatch(String),

    #[error("{0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
