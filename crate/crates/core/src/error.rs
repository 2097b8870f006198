use thiserror::Error;

/// Errors raised when constructing, reading or querying a tournament.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TournamentError {
    #[error("pair {{{0}, {1}}} is oriented more than once")]
    DuplicatePair(usize, usize),
    #[error("pair {{{0}, {1}}} has no orientation")]
    MissingPair(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a tournament on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("pair ({0}, {0}) is not a pair of distinct vertices")]
    SameVertex(usize),
    #[error("malformed tournament file: {0}")]
    Format(String),
}

/// Precondition failures of pure calculators and generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("rejection sampling exhausted after {tries} tries")]
    Exhausted { tries: u64 },
}
