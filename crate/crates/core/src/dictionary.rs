//! Read-only view over a compiled dictionary: vocabulary lookup with
//! optional-letter substitution, tag decoding and in-paradigm generation.

use std::path::Path;

use thiserror::Error;

use crate::automaton::{Dafsa, SubstitutionMap, SEP};
use crate::compiler::{ContainerError, DictionarySections, EndingRecord, ParadigmRow, ParadigmTables};
use crate::language::LanguageData;
use crate::tagset::{GrammemeRegistry, Tag};

#[derive(Debug, Error)]
pub enum DictionaryError {
    #[error(transparent)]
    Container(#[from] ContainerError),
    #[error("cannot read dictionary: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt dictionary: {0}")]
    Corrupt(String),
}

/// Violations of the paradigm contract: ids out of range, or a word that does
/// not fit the row it is supposed to be an instance of.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LexemeError {
    #[error("paradigm {paradigm_id} row {form_index} does not exist")]
    OutOfRange { paradigm_id: u16, form_index: u16 },
    #[error("{word:?} does not match paradigm {paradigm_id} row {form_index}")]
    Mismatch {
        word: String,
        paradigm_id: u16,
        form_index: u16,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictionaryAnalysis {
    /// Dictionary spelling, with optional letters restored.
    pub matched_word: String,
    pub paradigm_id: u16,
    pub form_index: u16,
    pub tag: Tag,
}

#[derive(Debug, Clone)]
pub struct Dictionary {
    sections: DictionarySections,
    substitutions: SubstitutionMap,
}

fn split_word_key(key: &[u8]) -> Option<(&[u8], u16, u16)> {
    if key.len() < 5 || key[key.len() - 5] != SEP {
        return None;
    }
    let n = key.len();
    Some((
        &key[..n - 5],
        u16::from_be_bytes([key[n - 4], key[n - 3]]),
        u16::from_be_bytes([key[n - 2], key[n - 1]]),
    ))
}

fn decode_pair(payload: &[u8]) -> Option<(u16, u16)> {
    let b: [u8; 4] = payload.try_into().ok()?;
    Some((u16::from_be_bytes([b[0], b[1]]), u16::from_be_bytes([b[2], b[3]])))
}

impl Dictionary {
    /// Wraps decoded sections, checking that every payload of every
    /// automaton resolves in the paradigm tables.
    pub fn from_sections(sections: DictionarySections) -> Result<Self, DictionaryError> {
        let substitutions = sections
            .language
            .substitution_map()
            .map_err(|e| DictionaryError::Corrupt(format!("language substitutions: {e}")))?;
        let tables = &sections.tables;
        let mut problem = None;
        sections.words.for_each_key(|key| {
            if problem.is_some() {
                return;
            }
            match split_word_key(key) {
                Some((word, pid, idx)) if std::str::from_utf8(word).is_ok() => {
                    if tables.row(pid, idx).is_none() {
                        problem = Some(format!("word payload ({pid}, {idx}) does not resolve"));
                    }
                }
                _ => problem = Some("malformed word key".to_string()),
            }
        });
        for (prefix_id, dafsa) in sections.prediction.iter().enumerate() {
            dafsa.for_each_key(|key| {
                if problem.is_some() {
                    return;
                }
                let ok = key.len() >= 7
                    && key[key.len() - 7] == SEP
                    && EndingRecord::decode(&key[key.len() - 6..]).is_some_and(|r| {
                        tables
                            .row(r.paradigm_id, r.form_index)
                            .is_some_and(|row| row.prefix_id as usize == prefix_id)
                    });
                if !ok {
                    problem = Some(format!("bad ending record in prediction table {prefix_id}"));
                }
            });
        }
        match problem {
            Some(p) => Err(DictionaryError::Corrupt(p)),
            None => Ok(Dictionary {
                sections,
                substitutions,
            }),
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DictionaryError> {
        Self::from_sections(DictionarySections::from_bytes(bytes)?)
    }

    pub fn open<P: AsRef<Path>>(path: P) -> Result<Self, DictionaryError> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    pub fn sections(&self) -> &DictionarySections {
        &self.sections
    }

    pub fn into_sections(self) -> DictionarySections {
        self.sections
    }

    pub fn registry(&self) -> &GrammemeRegistry {
        &self.sections.registry
    }

    pub fn language(&self) -> &LanguageData {
        &self.sections.language
    }

    pub fn tables(&self) -> &ParadigmTables {
        &self.sections.tables
    }

    pub fn substitutions(&self) -> &SubstitutionMap {
        &self.substitutions
    }

    pub fn cpd(&self) -> Option<&Dafsa> {
        self.sections.cpd.as_ref()
    }

    /// Every vocabulary analysis of a lowercase word, including spellings
    /// reachable by restoring optional letters. Ordered by dictionary
    /// spelling, then by paradigm and form.
    pub fn lookup(&self, word: &str) -> Vec<DictionaryAnalysis> {
        let mut out = Vec::new();
        for (matched, payloads) in self
            .sections
            .words
            .similar_payloads(word.as_bytes(), &self.substitutions, SEP)
        {
            let matched = String::from_utf8(matched).expect("keys are validated UTF-8");
            for payload in payloads {
                let (pid, idx) = decode_pair(&payload).expect("payloads are validated at load");
                out.push(DictionaryAnalysis {
                    matched_word: matched.clone(),
                    paradigm_id: pid,
                    form_index: idx,
                    tag: self.decode_tag(pid, idx).expect("validated").clone(),
                });
            }
        }
        out
    }

    /// True when the exact lowercase spelling is stored.
    pub fn contains_word(&self, word: &str) -> bool {
        !self.sections.words.payloads_for(word.as_bytes(), SEP).is_empty()
    }

    fn row(&self, paradigm_id: u16, form_index: u16) -> Result<&ParadigmRow, LexemeError> {
        self.sections
            .tables
            .row(paradigm_id, form_index)
            .ok_or(LexemeError::OutOfRange {
                paradigm_id,
                form_index,
            })
    }

    pub fn decode_tag(&self, paradigm_id: u16, form_index: u16) -> Result<&Tag, LexemeError> {
        let row = self.row(paradigm_id, form_index)?;
        Ok(&self.sections.tables.tags[row.tag_id as usize])
    }

    pub fn paradigm_len(&self, paradigm_id: u16) -> Option<usize> {
        self.sections
            .tables
            .paradigms
            .get(paradigm_id as usize)
            .map(|p| p.rows.len())
    }

    fn stem<'w>(&self, word: &'w str, paradigm_id: u16, form_index: u16) -> Result<&'w str, LexemeError> {
        let row = self.row(paradigm_id, form_index)?;
        let tables = &self.sections.tables;
        let prefix = &tables.prefixes[row.prefix_id as usize];
        let suffix = &tables.suffixes[row.suffix_id as usize];
        word.strip_prefix(prefix.as_str())
            .and_then(|rest| rest.strip_suffix(suffix.as_str()))
            .ok_or_else(|| LexemeError::Mismatch {
                word: word.to_string(),
                paradigm_id,
                form_index,
            })
    }

    fn form(&self, stem: &str, row: &ParadigmRow) -> (String, Tag) {
        let tables = &self.sections.tables;
        (
            format!(
                "{}{}{}",
                tables.prefixes[row.prefix_id as usize],
                stem,
                tables.suffixes[row.suffix_id as usize]
            ),
            tables.tags[row.tag_id as usize].clone(),
        )
    }

    /// The whole lexeme that `word` is form `form_index` of. Works for
    /// words that are not in the vocabulary, as long as they fit the row.
    pub fn build_lexeme(
        &self,
        word: &str,
        paradigm_id: u16,
        form_index: u16,
    ) -> Result<Vec<(String, Tag)>, LexemeError> {
        let stem = self.stem(word, paradigm_id, form_index)?;
        let paradigm = &self.sections.tables.paradigms[paradigm_id as usize];
        Ok(paradigm.rows.iter().map(|row| self.form(stem, row)).collect())
    }

    pub fn normal_form(&self, word: &str, paradigm_id: u16, form_index: u16) -> Result<String, LexemeError> {
        let stem = self.stem(word, paradigm_id, form_index)?;
        let first = &self.sections.tables.paradigms[paradigm_id as usize].rows[0];
        Ok(self.form(stem, first).0)
    }

    /// Forms of the lexeme whose tags carry every required grammeme, in
    /// lexeme order, with their form indices.
    pub fn inflect(
        &self,
        word: &str,
        paradigm_id: u16,
        form_index: u16,
        required: &[&str],
    ) -> Result<Vec<(String, Tag, u16)>, LexemeError> {
        Ok(self
            .build_lexeme(word, paradigm_id, form_index)?
            .into_iter()
            .enumerate()
            .filter(|(_, (_, tag))| tag.contains_all(required.iter().copied()))
            .map(|(i, (w, t))| (w, t, i as u16))
            .collect())
    }

    /// Ending records for `ending` in the table of one paradigm prefix, with
    /// optional letters restored in the matched ending.
    pub fn predict(&self, prefix_id: usize, ending: &str) -> Vec<(String, EndingRecord)> {
        let Some(dafsa) = self.sections.prediction.get(prefix_id) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (matched, payloads) in dafsa.similar_payloads(ending.as_bytes(), &self.substitutions, SEP) {
            let matched = String::from_utf8(matched).expect("keys are validated UTF-8");
            for payload in payloads {
                let record = EndingRecord::decode(&payload).expect("validated at load");
                out.push((matched.clone(), record));
            }
        }
        out
    }

    /// Every `(word, paradigm, form)` triple of the vocabulary, in key order.
    pub fn word_records(&self) -> Vec<(String, u16, u16)> {
        let mut out = Vec::new();
        self.sections.words.for_each_key(|key| {
            let (word, pid, idx) = split_word_key(key).expect("validated at load");
            out.push((String::from_utf8(word.to_vec()).expect("validated"), pid, idx));
        });
        out
    }
}
