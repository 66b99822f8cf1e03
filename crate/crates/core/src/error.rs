use core::fmt;

use alloc::string::String;

use crate::grammar_store::Sig;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A sequence handed to the parser was empty.
    EmptyInput,
    /// Two adjacent parser inputs were equal at `index` and `index + 1`.
    AdjacentEqual { index: usize },
    /// A value equal to the all-ones sentinel was handed to the alphabet reduction.
    SentinelValue,
    /// A block outside the 2..=5 length range was handed to `fold_block`.
    BlockLength(usize),
    /// The operands of a block do not share one level.
    MixedLevels,
    /// An assignment refers to a signature that is not live.
    Dangling(Sig),
    /// The signature is not (or no longer) in the store.
    Dead(Sig),
    /// A position/length pair does not fit the string it addresses.
    Range { pos: u64, len: u64, bound: u64 },
    /// A list that must be nonempty was empty.
    NoPieces,
    /// A text operation received an empty string where one is required.
    EmptyText,
    /// A stored structure violates one of its invariants.
    Invariant(String),
    /// An SLP rule or query names a variable with no rule.
    UnknownVar(u64),
    /// An SLP rule refers to a variable defined at or after itself.
    ForwardRef { id: u64, operand: u64 },
    /// Two SLP rules share one id.
    DuplicateRule(u64),
    /// Malformed external data (LZ77 factors, SLPs, encoding files).
    Format(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "empty input sequence"),
            Error::AdjacentEqual { index } => {
                write!(f, "adjacent equal values at positions {} and {}", index, index + 1)
            }
            Error::SentinelValue => write!(f, "input value collides with the all-ones sentinel"),
            Error::BlockLength(n) => write!(f, "block length {} outside 2..=5", n),
            Error::MixedLevels => write!(f, "block operands do not share a level"),
            Error::Dangling(s) => write!(f, "assignment refers to missing signature {}", s),
            Error::Dead(s) => write!(f, "signature {} is not live", s),
            Error::Range { pos, len, bound } => {
                write!(f, "range at {} of length {} exceeds length {}", pos, len, bound)
            }
            Error::NoPieces => write!(f, "no pieces to merge"),
            Error::EmptyText => write!(f, "empty text"),
            Error::Invariant(msg) => write!(f, "invariant violated: {}", msg),
            Error::UnknownVar(id) => write!(f, "unknown variable {}", id),
            Error::ForwardRef { id, operand } => write!(f, "rule {} refers forward to {}", id, operand),
            Error::DuplicateRule(id) => write!(f, "duplicate rule {}", id),
            Error::Format(msg) => write!(f, "format error: {}", msg),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
