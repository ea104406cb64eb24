//! Lower bounds on the zero-error capacity threshold of the adversarial
//! deletion channel, and the experiments behind them.
//!
//! * [`math`]: entropy and LCS-based thresholds, supersequence counts,
//!   independent-set bounds.
//! * [`lcs`]: reference and word-parallel LCS, subsequence tests, witnesses.
//! * [`source`]: seeded uniform and symmetric Markov bit sources.
//! * [`gamma`]: Monte Carlo estimation of the limiting normalized LCS.
//! * [`codebook`]: confusability graphs, codebook constructions, decoding
//!   and adversarial attacks for small `n`.

pub mod codebook;
pub mod error;
pub mod gamma;
pub mod lcs;
pub mod math;
pub mod sequence;
pub mod source;

pub use error::{Error, Result};
pub use sequence::Sequence;
