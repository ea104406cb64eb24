use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: u32, right: u32 },

    #[error("symbol {symbol} is not in an alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: u32 },

    #[error("expected a binary sequence, got alphabet size {0}")]
    NotBinary(u32),

    #[error("{what} = {requested} exceeds the limit of {limit}: {reason}")]
    LimitExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
        reason: &'static str,
    },

    #[error("exact search stopped after {nodes} nodes; best independent set found has size {best_found}")]
    SearchBudgetExhausted { nodes: u64, best_found: usize },

    #[error("received string of length {len} is outside [{min}, {max}]")]
    ReceivedLength { len: usize, min: usize, max: usize },

    #[error("no codeword contains the received string as a subsequence")]
    NoCandidate,

    #[error("received string is a subsequence of {0} codewords")]
    Ambiguous(usize),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
