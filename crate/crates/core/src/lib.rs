//! Dynamic compressed text index over signature encodings.
//!
//! A text is kept as a run-length grammar built by repeated locally
//! consistent parsing. Equal substrings get equal signatures, which makes
//! equality checks, longest common extension, edits and pattern search
//! work directly on the grammar.

#![no_std]

extern crate alloc;

pub mod editor;
pub mod encoder;
pub mod error;
pub mod grammar_store;
pub mod index;
pub mod lcp_parse;
pub mod lz77;
pub mod slp;

pub use editor::{merge_pow, EditDelta};
pub use encoder::{Encoding, PowSeq};
pub use error::{Error, Result};
pub use index::{search, Index};
pub use grammar_store::{Assignment, GrammarStore, NodeMeta, Sig, Symbol};
pub use lcp_parse::ParserParams;
pub use lz77::Factor;
pub use slp::{Rule, Slp};
