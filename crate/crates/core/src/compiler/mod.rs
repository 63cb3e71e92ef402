//! Lexicon compilation: ingest, link joining, paradigm inference, word and
//! ending automatons, and the binary container.

pub mod container;
pub mod ingest;
pub mod links;
pub mod paradigm;
pub mod prediction;
pub mod sections;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automaton::{Dafsa, SEP};
use crate::language::LanguageData;

pub use container::{read_container, write_container, ContainerError, Section};
pub use ingest::{ingest_text, ingest_xml, IngestError, Lexicon, Link, SourceLexeme};
pub use links::{join_linked_lexemes, DanglingLink, JoinOutcome, JoinableLinks};
pub use paradigm::{infer_paradigm, InferredForm, Paradigm, ParadigmInterner, ParadigmRow, ParadigmTables};
pub use prediction::{build_prediction_dafsas, collect_endings, EndingRecord, PredictionOptions};
pub use sections::{DictionarySections, Meta};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("{what} {value} does not fit in 16 bits")]
    Capacity { what: &'static str, value: usize },
    #[error("lexeme {0} has no forms")]
    EmptyLexeme(u32),
    #[error("language data must list \"\" as the first paradigm prefix")]
    PrefixTable,
    #[error("word {0:?} is empty or contains a control byte")]
    BadWord(String),
}

/// One analysis of one vocabulary form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordRecord {
    pub word: String,
    pub paradigm_id: u32,
    pub form_index: u32,
}

impl WordRecord {
    pub fn key(&self) -> Result<Vec<u8>, CompileError> {
        if self.word.is_empty() || self.word.bytes().any(|b| b == SEP || b == 0) {
            return Err(CompileError::BadWord(self.word.clone()));
        }
        let pid = u16::try_from(self.paradigm_id).map_err(|_| CompileError::Capacity {
            what: "paradigm id",
            value: self.paradigm_id as usize,
        })?;
        let idx = u16::try_from(self.form_index).map_err(|_| CompileError::Capacity {
            what: "form index",
            value: self.form_index as usize,
        })?;
        let mut key = Vec::with_capacity(self.word.len() + 5);
        key.extend_from_slice(self.word.as_bytes());
        key.push(SEP);
        key.extend_from_slice(&pid.to_be_bytes());
        key.extend_from_slice(&idx.to_be_bytes());
        Ok(key)
    }
}

/// Encodes `word SEP be16(paradigm) be16(form)` keys into one automaton.
pub fn build_words_dafsa(records: &[WordRecord]) -> Result<Dafsa, CompileError> {
    let mut keys = records.iter().map(WordRecord::key).collect::<Result<Vec<_>, _>>()?;
    keys.sort();
    keys.dedup();
    Ok(Dafsa::build_from_sorted(&keys).expect("sorted and deduplicated"))
}

#[derive(Debug, Clone)]
pub struct CompileOptions {
    pub language: LanguageData,
    pub joinable_links: JoinableLinks,
    pub prediction: PredictionOptions,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            language: LanguageData::russian(),
            joinable_links: JoinableLinks::All,
            prediction: PredictionOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileStats {
    pub lexemes: usize,
    pub forms: usize,
    pub paradigms: usize,
    pub word_states: usize,
    pub prediction_states: usize,
    pub dangling_links: usize,
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub sections: DictionarySections,
    pub records: Vec<WordRecord>,
    pub stats: CompileStats,
    pub warnings: Vec<String>,
}

/// Compiles an ingested lexicon. Words are lowercased.
pub fn compile(lexicon: Lexicon, options: &CompileOptions) -> Result<Compiled, CompileError> {
    if options.language.paradigm_prefixes.first().map(String::as_str) != Some("") {
        return Err(CompileError::PrefixTable);
    }
    let Lexicon {
        lexemes,
        registry,
        mut warnings,
    } = lexicon;
    let joined = join_linked_lexemes(lexemes, &options.joinable_links);
    for d in &joined.dangling {
        warnings.push(format!(
            "lexeme {}: link to unknown lexeme {} (type {}) ignored",
            d.source, d.link.target, d.link.link_type
        ));
    }

    let prefixes = &options.language.paradigm_prefixes;
    let mut interner = ParadigmInterner::new(prefixes);
    let mut records = BTreeSet::new();
    let mut forms = 0usize;
    for lexeme in &joined.lexemes {
        if lexeme.forms.is_empty() {
            return Err(CompileError::EmptyLexeme(lexeme.id));
        }
        let lowered: Vec<_> = lexeme
            .forms
            .iter()
            .map(|(w, t)| (w.to_lowercase(), t.clone()))
            .collect();
        let (_stem, inferred) = infer_paradigm(&lowered, prefixes);
        let pid = interner.intern(&inferred)?;
        for (idx, (word, _)) in lowered.into_iter().enumerate() {
            records.insert(WordRecord {
                word,
                paradigm_id: pid as u32,
                form_index: idx as u32,
            });
        }
        forms += lexeme.forms.len();
    }
    let records: Vec<WordRecord> = records.into_iter().collect();
    let (tables, lexeme_counts) = interner.finish();

    let words = build_words_dafsa(&records)?;
    let prediction =
        build_prediction_dafsas(&records, &tables, &lexeme_counts, &registry, &options.prediction);

    let stats = CompileStats {
        lexemes: joined.lexemes.len(),
        forms,
        paradigms: tables.paradigms.len(),
        word_states: words.state_count(),
        prediction_states: prediction.iter().map(Dafsa::state_count).sum(),
        dangling_links: joined.dangling.len(),
    };
    let sections = DictionarySections {
        meta: Meta {
            format_version: container::CONTAINER_VERSION,
            language: options.language.name.clone(),
            lexemes: stats.lexemes as u32,
            forms: stats.forms as u32,
            paradigms: stats.paradigms as u32,
            word_states: stats.word_states as u32,
        },
        registry,
        tables,
        words,
        prediction,
        cpd: None,
        language: options.language.clone(),
    };
    Ok(Compiled {
        sections,
        records,
        stats,
        warnings,
    })
}
