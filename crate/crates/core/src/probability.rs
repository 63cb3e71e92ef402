//! Non-contextual `P(tag | word)` estimates from a partially disambiguated
//! corpus, their fixed-point automaton encoding, and parse scoring.
//!
//! For a word the analyzer finds ambiguous,
//!
//! ```text
//! P(tag | word) = (count(word, tag) + 1) / (count(word) + B(word))
//! B(word)       = max(|analyzer tags of word|, |corpus tags of word|)
//! ```
//!
//! where counts come only from corpus occurrences left with a single tag.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use quick_xml::events::Event;
use thiserror::Error;

use crate::analyzer::Parse;
use crate::automaton::Dafsa;

/// Fixed-point scale of stored probabilities.
pub const SCALE: u64 = 1_000_000;
const CPD_SEP: u8 = 0x00;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("corpus XML error at byte {position}: {reason}")]
    Xml { position: u64, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CpdError {
    #[error("{what} {text:?} contains ':' or NUL and cannot be encoded")]
    BadText { what: &'static str, text: String },
}

/// Grammeme-order-insensitive form of a tag string.
pub fn normalize_tag(text: &str) -> String {
    let set: BTreeSet<&str> = text
        .split([',', ' '])
        .map(str::trim)
        .filter(|g| !g.is_empty())
        .collect();
    set.into_iter().collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusCounts {
    word_tag: BTreeMap<(String, String), u64>,
    word: BTreeMap<String, u64>,
}

impl CorpusCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one unambiguous occurrence. Words are lowercased and tags
    /// normalized.
    pub fn add(&mut self, word: &str, tag: &str) {
        let word = word.to_lowercase();
        *self.word_tag.entry((word.clone(), normalize_tag(tag))).or_default() += 1;
        *self.word.entry(word).or_default() += 1;
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn count_word_tag(&self, word: &str, tag: &str) -> u64 {
        self.word_tag
            .get(&(word.to_string(), normalize_tag(tag)))
            .copied()
            .unwrap_or(0)
    }

    pub fn count_word(&self, word: &str) -> u64 {
        self.word.get(word).copied().unwrap_or(0)
    }

    /// Normalized tags seen with the word.
    pub fn corpus_tags(&self, word: &str) -> Vec<&str> {
        self.word_tag
            .range((word.to_string(), String::new())..)
            .take_while(|((w, _), _)| w == word)
            .map(|((_, t), _)| t.as_str())
            .collect()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.word.keys().map(String::as_str)
    }
}

/// Reads the line corpus format: `word<TAB>tag1[;tag2…]`, blank lines
/// between sentences. Lines with more than one tag are still ambiguous and
/// are skipped.
pub fn count_corpus<R: BufRead>(reader: R) -> Result<CorpusCounts, CorpusError> {
    let mut counts = CorpusCounts::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let err = |reason: &str| CorpusError::Line {
            line: i + 1,
            reason: reason.to_string(),
        };
        let (word, tags) = line.split_once('\t').ok_or_else(|| err("expected word<TAB>tags"))?;
        if word.is_empty() {
            return Err(err("empty word"));
        }
        let tags: BTreeSet<String> = tags
            .split(';')
            .map(normalize_tag)
            .collect();
        if tags.iter().any(String::is_empty) {
            return Err(err("empty tag"));
        }
        if tags.len() == 1 {
            counts.add(word, tags.first().expect("one tag"));
        }
    }
    Ok(counts)
}

/// Reads an OpenCorpora annotated corpus export: every `<token>` whose
/// `<tfr>` holds a single `<v>` variant counts, with the variant's `<g v=…>`
/// grammemes as its tag.
pub fn count_corpus_xml<R: BufRead>(reader: R) -> Result<CorpusCounts, CorpusError> {
    let mut xml = quick_xml::Reader::from_reader(reader);
    let mut buf = Vec::new();
    let mut counts = CorpusCounts::new();
    let mut text: Option<String> = None;
    let mut variants: Vec<Vec<String>> = Vec::new();
    loop {
        let event = xml.read_event_into(&mut buf).map_err(|e| CorpusError::Xml {
            position: xml.error_position(),
            reason: e.to_string(),
        })?;
        let attr = |e: &quick_xml::events::BytesStart, name: &str| -> Option<String> {
            e.try_get_attribute(name)
                .ok()
                .flatten()
                .and_then(|a| a.normalized_value(quick_xml::XmlVersion::Implicit1_0).ok())
                .map(|v| v.into_owned())
        };
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => match e.name().as_ref() {
                "token" => {
                    text = attr(e, "text");
                    variants.clear();
                }
                "v" => variants.push(Vec::new()),
                "g" => {
                    if let (Some(v), Some(current)) = (attr(e, "v"), variants.last_mut()) {
                        current.push(v);
                    }
                }
                _ => {}
            },
            Event::End(ref e) if e.name().as_ref() == "token" => {
                if let (Some(word), [only]) = (text.take(), variants.as_slice()) {
                    if !only.is_empty() {
                        counts.add(&word, &only.join(","));
                    }
                }
                variants.clear();
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    Ok(counts)
}

/// One smoothed estimate, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Estimate {
    pub numerator: u64,
    pub denominator: u64,
}

impl Estimate {
    pub fn probability(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// `floor(10^6 · P)`, computed exactly.
    pub fn fixed_point(&self) -> u32 {
        (self.numerator as u128 * SCALE as u128 / self.denominator as u128) as u32
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CondProbTable {
    /// Keyed by (word, analyzer tag string).
    pub entries: BTreeMap<(String, String), Estimate>,
    /// `B(word)` for every covered word.
    pub smoothing: BTreeMap<String, u64>,
    /// Corpus words left out because the analyzer gives them at most one
    /// tag, or because they cannot be encoded.
    pub skipped: Vec<String>,
}

impl CondProbTable {
    pub fn probability(&self, word: &str, tag: &str) -> Option<f64> {
        self.entries
            .get(&(word.to_string(), tag.to_string()))
            .map(Estimate::probability)
    }

    pub fn words(&self) -> usize {
        self.smoothing.len()
    }
}

fn encodable(text: &str) -> bool {
    !text.contains([':', '\0'])
}

/// Estimates for every corpus word the analyzer finds ambiguous.
/// `analyzer_tags` returns the tag strings the analyzer gives a word.
pub fn estimate<F>(counts: &CorpusCounts, mut analyzer_tags: F) -> CondProbTable
where
    F: FnMut(&str) -> Vec<String>,
{
    let mut table = CondProbTable::default();
    for word in counts.words() {
        let mut tags: Vec<String> = Vec::new();
        for t in analyzer_tags(word) {
            if !tags.contains(&t) {
                tags.push(t);
            }
        }
        if tags.len() <= 1 || !encodable(word) || !tags.iter().all(|t| encodable(t)) {
            table.skipped.push(word.to_string());
            continue;
        }
        let b = tags.len().max(counts.corpus_tags(word).len()) as u64;
        let n = counts.count_word(word);
        for tag in tags {
            let c = counts.count_word_tag(word, &tag);
            table.entries.insert(
                (word.to_string(), tag),
                Estimate {
                    numerator: c + 1,
                    denominator: n + b,
                },
            );
        }
        table.smoothing.insert(word.to_string(), b);
    }
    table
}

fn cpd_key(word: &str, tag: &str) -> Vec<u8> {
    let mut key = Vec::with_capacity(word.len() + tag.len() + 1);
    key.extend_from_slice(word.as_bytes());
    key.push(b':');
    key.extend_from_slice(tag.as_bytes());
    key
}

/// Keys `word ":" tag NUL be32(floor(10^6 · P))`.
pub fn build_cpd_dafsa(table: &CondProbTable) -> Result<Dafsa, CpdError> {
    let mut keys = Vec::with_capacity(table.entries.len());
    for ((word, tag), estimate) in &table.entries {
        if !encodable(word) {
            return Err(CpdError::BadText { what: "word", text: word.clone() });
        }
        if !encodable(tag) {
            return Err(CpdError::BadText { what: "tag", text: tag.clone() });
        }
        let mut key = cpd_key(word, tag);
        key.push(CPD_SEP);
        key.extend_from_slice(&estimate.fixed_point().to_be_bytes());
        keys.push(key);
    }
    keys.sort();
    keys.dedup();
    Ok(Dafsa::build_from_sorted(&keys).expect("sorted and deduplicated"))
}

/// The stored fixed-point value for `(word, tag)`.
pub fn cpd_lookup(cpd: &Dafsa, word: &str, tag: &str) -> Option<u32> {
    cpd.payloads_for(&cpd_key(word, tag), CPD_SEP)
        .first()
        .and_then(|p| <[u8; 4]>::try_from(p.as_slice()).ok())
        .map(u32::from_be_bytes)
}

/// Every stored `(word, tag, value)`, in key order.
pub fn cpd_entries(cpd: &Dafsa) -> Vec<(String, String, u32)> {
    let mut out = Vec::new();
    cpd.for_each_key(|key| {
        let Some(nul) = key.len().checked_sub(5).filter(|&i| key[i] == CPD_SEP) else {
            return;
        };
        let text = String::from_utf8_lossy(&key[..nul]);
        if let Some((word, tag)) = text.split_once(':') {
            let value = u32::from_be_bytes(key[nul + 1..].try_into().expect("4 bytes"));
            out.push((word.to_string(), tag.to_string(), value));
        }
    });
    out
}

/// Scores and sorts the parses of one word in place.
///
/// With stored estimates each parse scores its stored value, and unstored
/// tags half the smallest stored one; otherwise the parses' own raw scores
/// (unit penalties) are kept, which is uniform when there are none. Scores
/// are then normalized to sum to 1 and sorted descending; ties keep their
/// order.
pub fn apply_scores(cpd: Option<&Dafsa>, word: &str, parses: &mut [Parse]) {
    if parses.is_empty() {
        return;
    }
    let stored: Vec<Option<u32>> = match cpd {
        Some(cpd) => parses
            .iter()
            .map(|p| cpd_lookup(cpd, word, &p.tag.to_string()))
            .collect(),
        None => vec![None; parses.len()],
    };
    if let Some(min) = stored.iter().flatten().min().copied() {
        for (p, s) in parses.iter_mut().zip(&stored) {
            p.score = match s {
                Some(v) => *v as f64 / SCALE as f64,
                None => min as f64 / 2.0 / SCALE as f64,
            };
        }
    }
    let total: f64 = parses.iter().map(|p| p.score).sum();
    if total > 0.0 && total.is_finite() {
        for p in parses.iter_mut() {
            p.score /= total;
        }
    } else {
        let uniform = 1.0 / parses.len() as f64;
        for p in parses.iter_mut() {
            p.score = uniform;
        }
    }
    parses.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(std::cmp::Ordering::Equal));
}
