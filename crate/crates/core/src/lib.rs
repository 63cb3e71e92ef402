//! Morphological analysis and generation for inflective languages.
//!
//! Lexicons are compiled into a compact container of minimal acyclic
//! automatons and numeric paradigm tables ([`compiler`]); a loaded
//! [`dictionary::Dictionary`] answers vocabulary lookups, and an
//! [`analyzer::Analyzer`] runs an ordered pipeline of rule units so that
//! vocabulary and out-of-vocabulary words share one analysis and generation
//! interface. Non-contextual `P(tag | word)` estimates from a partially
//! disambiguated corpus live in [`probability`].

pub mod analyzer;
pub mod automaton;
mod codec;
pub mod compiler;
pub mod dictionary;
pub mod language;
pub mod probability;
pub mod tagset;

pub use analyzer::{Analyzer, AnalyzerError, LexemeForm, Parse};
pub use codec::DecodeError;
pub use dictionary::{Dictionary, DictionaryAnalysis, DictionaryError};
pub use tagset::{GrammemeRegistry, Tag};
