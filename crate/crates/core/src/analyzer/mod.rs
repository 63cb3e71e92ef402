//! The analysis pipeline: an ordered list of units, each of which may
//! recognize a token, and each of which knows how to generate the lexeme of
//! the parses it produced.
//!
//! A [`Parse`] records which units produced it, together with whatever each
//! unit needs to regenerate forms (a stripped prefix, a matched ending
//! record, the left half of a compound, …). Lexeme construction walks that
//! trace from the innermost unit outwards, so out-of-vocabulary parses
//! inflect exactly like vocabulary ones.

pub mod units;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dictionary::{Dictionary, LexemeError};
use crate::probability::apply_scores;
use crate::tagset::{GrammemeRegistry, Tag};

pub use units::{
    default_units, DictionaryUnit, EndingsUnit, HyphenAdverbUnit, HyphenCompoundUnit, HyphenParticleUnit,
    InitialsGroup, InitialsUnit, KnownPrefixUnit, NonlexicalUnit, UnitState, UnknownPrefixUnit, UnknownUnit,
};

/// Sub-analyses started by units stop at this nesting depth.
pub const MAX_DEPTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub unit: String,
    pub state: UnitState,
}

/// One candidate analysis of a token.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parse {
    pub word: String,
    pub tag: Tag,
    pub normal_form: String,
    pub score: f64,
    /// Innermost unit first; the last step is the unit that finalized the parse.
    pub trace: Vec<TraceStep>,
}

impl Parse {
    pub fn unit_ids(&self) -> Vec<&str> {
        self.trace.iter().map(|s| s.unit.as_str()).collect()
    }

    fn merge_key(&self) -> (String, String, bool) {
        let fixed_left = matches!(
            self.trace.last().map(|s| &s.state),
            Some(UnitState::HyphenCompound { left: None, .. })
        );
        (self.tag.to_string(), self.normal_form.clone(), fixed_left)
    }
}

/// One form of a generated lexeme. The trace is the one a parse of this
/// form would carry, so forms can be turned back into parses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LexemeForm {
    pub word: String,
    pub tag: Tag,
    pub trace: Vec<TraceStep>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AnalyzerError {
    #[error("empty token")]
    EmptyToken,
    #[error("token {0:?} contains whitespace")]
    Whitespace(String),
    #[error("pipeline has no units")]
    EmptyPipeline,
    #[error("unit id {0:?} is used twice")]
    DuplicateUnit(String),
    #[error("parse references unit {0:?}, which is not in this pipeline")]
    UnknownUnit(String),
    #[error("unit {unit:?} cannot handle state {state}")]
    ForeignState { unit: String, state: String },
    #[error("parse has an empty trace")]
    EmptyTrace,
    #[error(transparent)]
    Lexeme(#[from] LexemeError),
}

/// A token as handed to units: the original spelling (initials are
/// case-sensitive) and its lowercase form.
#[derive(Debug, Clone)]
pub struct Token<'a> {
    pub original: &'a str,
    pub lower: String,
}

impl<'a> Token<'a> {
    pub fn new(original: &'a str) -> Self {
        Token {
            original,
            lower: original.to_lowercase(),
        }
    }
}

pub trait Unit: Send + Sync + fmt::Debug {
    fn id(&self) -> &str;

    /// When a terminal unit yields parses, later units are skipped.
    fn terminal(&self) -> bool {
        false
    }

    /// Non-lexical units are skipped in sub-analyses started by other units.
    fn lexical(&self) -> bool {
        true
    }

    /// A fallback runs only when no earlier unit produced anything.
    fn fallback(&self) -> bool {
        false
    }

    /// Raw (unnormalized) parses of a token.
    fn parse(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse>;

    /// The lexeme of a parse whose trace step for this unit carries `state`.
    /// `inner` is the lexeme produced by the previous trace step, if any.
    fn lexeme(
        &self,
        cx: &Context<'_>,
        state: &UnitState,
        inner: Option<Vec<LexemeForm>>,
    ) -> Result<Vec<LexemeForm>, AnalyzerError>;
}

/// What a unit sees of the analyzer while it runs.
pub struct Context<'a> {
    analyzer: &'a Analyzer,
    depth: usize,
    excluded: Vec<String>,
}

impl<'a> Context<'a> {
    fn root(analyzer: &'a Analyzer) -> Self {
        Context {
            analyzer,
            depth: 0,
            excluded: Vec::new(),
        }
    }

    pub fn dictionary(&self) -> &'a Dictionary {
        &self.analyzer.dictionary
    }

    pub fn registry(&self) -> &'a GrammemeRegistry {
        self.analyzer.dictionary.registry()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Analyzes `text` with the pipeline minus the calling unit, the units
    /// already excluded further up, and the non-lexical units.
    pub fn analyze_sub(&self, caller: &str, text: &str) -> Vec<Parse> {
        if self.depth >= MAX_DEPTH || text.is_empty() {
            return Vec::new();
        }
        let mut excluded = self.excluded.clone();
        excluded.push(caller.to_string());
        let cx = Context {
            analyzer: self.analyzer,
            depth: self.depth + 1,
            excluded,
        };
        self.analyzer.run(&cx, &Token::new(text))
    }

    pub fn get_lexeme(&self, parse: &Parse) -> Result<Vec<LexemeForm>, AnalyzerError> {
        self.analyzer.get_lexeme(parse)
    }

    fn skips(&self, unit: &dyn Unit) -> bool {
        self.depth > 0 && (!unit.lexical() || self.excluded.iter().any(|e| e == unit.id()))
    }
}

#[derive(Debug)]
pub struct Analyzer {
    dictionary: Dictionary,
    units: Vec<Box<dyn Unit>>,
    index: HashMap<String, usize>,
}

fn merge_duplicates(parses: Vec<Parse>) -> Vec<Parse> {
    let mut out: Vec<Parse> = Vec::with_capacity(parses.len());
    let mut seen: HashMap<(String, String, bool), usize> = HashMap::new();
    for parse in parses {
        match seen.get(&parse.merge_key()) {
            Some(&i) => {
                if parse.score > out[i].score {
                    out[i] = parse;
                }
            }
            None => {
                seen.insert(parse.merge_key(), out.len());
                out.push(parse);
            }
        }
    }
    out
}

/// Grammemes a noun takes after the number `n` (Russian rules).
pub fn number_agreement(n: u64) -> [&'static str; 2] {
    if n % 10 == 1 && n % 100 != 11 {
        ["sing", "nomn"]
    } else if (2..=4).contains(&(n % 10)) && !(12..=14).contains(&(n % 100)) {
        ["sing", "gent"]
    } else {
        ["plur", "gent"]
    }
}

impl Analyzer {
    /// The default pipeline for the dictionary's language.
    pub fn new(dictionary: Dictionary) -> Self {
        let units = default_units(dictionary.language());
        Self::with_units(dictionary, units).expect("default pipeline is well-formed")
    }

    pub fn with_units(dictionary: Dictionary, units: Vec<Box<dyn Unit>>) -> Result<Self, AnalyzerError> {
        if units.is_empty() {
            return Err(AnalyzerError::EmptyPipeline);
        }
        let mut index = HashMap::new();
        for (i, unit) in units.iter().enumerate() {
            if index.insert(unit.id().to_string(), i).is_some() {
                return Err(AnalyzerError::DuplicateUnit(unit.id().to_string()));
            }
        }
        Ok(Analyzer {
            dictionary,
            units,
            index,
        })
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    pub fn unit_ids(&self) -> Vec<&str> {
        self.units.iter().map(|u| u.id()).collect()
    }

    pub fn unit(&self, id: &str) -> Option<&dyn Unit> {
        self.index.get(id).map(|&i| self.units[i].as_ref())
    }

    fn run(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse> {
        let mut out = Vec::new();
        for unit in &self.units {
            if cx.skips(unit.as_ref()) || (unit.fallback() && !out.is_empty()) {
                continue;
            }
            let parses = unit.parse(cx, token);
            let found = !parses.is_empty();
            out.extend(parses);
            if found && unit.terminal() {
                break;
            }
        }
        merge_duplicates(out)
    }

    fn check_token(token: &str) -> Result<(), AnalyzerError> {
        if token.is_empty() {
            return Err(AnalyzerError::EmptyToken);
        }
        if token.chars().any(char::is_whitespace) {
            return Err(AnalyzerError::Whitespace(token.to_string()));
        }
        Ok(())
    }

    /// All parses of one token, scored and sorted by descending score. The
    /// result is never empty.
    pub fn analyze(&self, token: &str) -> Result<Vec<Parse>, AnalyzerError> {
        Self::check_token(token)?;
        let token = Token::new(token);
        let mut parses = self.run(&Context::root(self), &token);
        apply_scores(self.dictionary.cpd(), &token.lower, &mut parses);
        Ok(parses)
    }

    /// Raw output of a single unit at the top level, without scoring; for
    /// inspecting what one rule does.
    pub fn run_unit(&self, id: &str, token: &str) -> Result<Vec<Parse>, AnalyzerError> {
        Self::check_token(token)?;
        let unit = self.unit(id).ok_or_else(|| AnalyzerError::UnknownUnit(id.to_string()))?;
        Ok(merge_duplicates(unit.parse(&Context::root(self), &Token::new(token))))
    }

    pub fn get_lexeme(&self, parse: &Parse) -> Result<Vec<LexemeForm>, AnalyzerError> {
        let cx = Context::root(self);
        let mut lexeme = None;
        for step in &parse.trace {
            let unit = self
                .unit(&step.unit)
                .ok_or_else(|| AnalyzerError::UnknownUnit(step.unit.clone()))?;
            lexeme = Some(unit.lexeme(&cx, &step.state, lexeme.take())?);
        }
        lexeme.ok_or(AnalyzerError::EmptyTrace)
    }

    /// Distinct normal forms, best-scored first.
    pub fn normal_forms(&self, token: &str) -> Result<Vec<String>, AnalyzerError> {
        let mut out: Vec<String> = Vec::new();
        for parse in self.analyze(token)? {
            if !out.contains(&parse.normal_form) {
                out.push(parse.normal_form);
            }
        }
        Ok(out)
    }

    /// The first form of the parse's lexeme carrying every required
    /// grammeme.
    pub fn inflect_parse(&self, parse: &Parse, required: &[&str]) -> Result<Option<Parse>, AnalyzerError> {
        let lexeme = self.get_lexeme(parse)?;
        let Some(first) = lexeme.first() else {
            return Ok(None);
        };
        let normal_form = first.word.clone();
        Ok(lexeme
            .into_iter()
            .find(|f| f.tag.contains_all(required.iter().copied()))
            .map(|f| Parse {
                word: f.word,
                tag: f.tag,
                normal_form,
                score: parse.score,
                trace: f.trace,
            }))
    }

    /// The form of the parse's word that agrees with the number `n`.
    pub fn make_agree_with_number(&self, parse: &Parse, n: u64) -> Result<Option<Parse>, AnalyzerError> {
        self.inflect_parse(parse, &number_agreement(n))
    }
}
