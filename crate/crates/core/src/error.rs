use alloc::string::String;

/// Errors raised while parsing or validating inputs.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("illegal character {found:?} at position {position} in sign pattern")]
    IllegalCharacter { found: char, position: usize },

    #[error("sign pattern of length {0} is not of the form n + n^2")]
    MalformedPattern(usize),

    #[error(
        "diagonal entry b_{index}{index} is negative; pass the diagonal override to accept it"
    )]
    DiagonalSign { index: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("rank {rank} out of range for C({ground}, {size})")]
    RankOutOfRange {
        rank: usize,
        ground: usize,
        size: usize,
    },

    #[error("subset must be strictly increasing within 1..={ground}")]
    InvalidSubset { ground: usize },

    #[error("entry {entry} has sign {found} but the pattern requires {expected}")]
    SignMismatch {
        entry: String,
        expected: char,
        found: char,
    },

    #[error("invalid network: {0}")]
    Network(String),

    #[error("invalid number {0:?}")]
    Number(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("n = {n} is outside the supported range 2..={max}")]
    Unsupported { n: usize, max: usize },
}
