//! Paradigm inference and the interned prefix, suffix, tag and paradigm tables.

use std::collections::HashMap;

use crate::tagset::Tag;

use super::CompileError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParadigmRow {
    pub prefix_id: u16,
    pub suffix_id: u16,
    pub tag_id: u16,
}

/// One row per form index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Paradigm {
    pub rows: Vec<ParadigmRow>,
}

/// A form factored as `prefix + stem + suffix`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferredForm {
    pub prefix: String,
    pub suffix: String,
    pub tag: Tag,
}

/// Splits every form of a lexeme into paradigm prefix, common stem and
/// suffix. The prefix of a form is the longest listed paradigm prefix it
/// starts with; the stem is the longest common prefix of the forms with their
/// paradigm prefixes removed.
pub fn infer_paradigm(forms: &[(String, Tag)], paradigm_prefixes: &[String]) -> (String, Vec<InferredForm>) {
    let mut by_length: Vec<&String> = paradigm_prefixes.iter().collect();
    by_length.sort_by_key(|p| std::cmp::Reverse(p.chars().count()));

    let stripped: Vec<(&str, &str)> = forms
        .iter()
        .map(|(word, _)| {
            let prefix = by_length
                .iter()
                .find(|p| word.starts_with(p.as_str()))
                .map_or("", |p| p.as_str());
            (prefix, &word[prefix.len()..])
        })
        .collect();

    let first = stripped.first().map_or("", |(_, rest)| *rest);
    let stem_len = stripped
        .iter()
        .skip(1)
        .fold(first.len(), |len, (_, rest)| common_prefix_bytes(&first[..len], rest));
    let stem = first[..stem_len].to_string();

    let inferred = stripped
        .iter()
        .zip(forms)
        .map(|((prefix, rest), (_, tag))| InferredForm {
            prefix: prefix.to_string(),
            suffix: rest[stem_len..].to_string(),
            tag: tag.clone(),
        })
        .collect();
    (stem, inferred)
}

fn common_prefix_bytes(a: &str, b: &str) -> usize {
    a.chars()
        .zip(b.chars())
        .take_while(|(x, y)| x == y)
        .map(|(x, _)| x.len_utf8())
        .sum()
}

/// The id tables every paradigm row points into.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParadigmTables {
    pub prefixes: Vec<String>,
    pub suffixes: Vec<String>,
    pub tags: Vec<Tag>,
    pub paradigms: Vec<Paradigm>,
}

impl ParadigmTables {
    pub fn row(&self, paradigm_id: u16, form_index: u16) -> Option<&ParadigmRow> {
        self.paradigms
            .get(paradigm_id as usize)?
            .rows
            .get(form_index as usize)
    }
}

fn to_u16(n: usize, what: &'static str) -> Result<u16, CompileError> {
    u16::try_from(n).map_err(|_| CompileError::Capacity { what, value: n })
}

/// Deduplicating builder for [`ParadigmTables`].
#[derive(Debug, Default)]
pub struct ParadigmInterner {
    tables: ParadigmTables,
    suffix_ids: HashMap<String, u16>,
    tag_ids: HashMap<Tag, u16>,
    paradigm_ids: HashMap<Paradigm, u16>,
    /// Lexemes assigned to each paradigm.
    pub lexeme_counts: Vec<u32>,
}

impl ParadigmInterner {
    pub fn new(paradigm_prefixes: &[String]) -> Self {
        ParadigmInterner {
            tables: ParadigmTables {
                prefixes: paradigm_prefixes.to_vec(),
                ..Default::default()
            },
            ..Default::default()
        }
    }

    fn suffix(&mut self, suffix: &str) -> Result<u16, CompileError> {
        if let Some(&id) = self.suffix_ids.get(suffix) {
            return Ok(id);
        }
        let id = to_u16(self.tables.suffixes.len(), "suffix id")?;
        self.tables.suffixes.push(suffix.to_string());
        self.suffix_ids.insert(suffix.to_string(), id);
        Ok(id)
    }

    fn tag(&mut self, tag: &Tag) -> Result<u16, CompileError> {
        if let Some(&id) = self.tag_ids.get(tag) {
            return Ok(id);
        }
        let id = to_u16(self.tables.tags.len(), "tag id")?;
        self.tables.tags.push(tag.clone());
        self.tag_ids.insert(tag.clone(), id);
        Ok(id)
    }

    /// Interns the inferred forms of one lexeme, returning its paradigm id.
    pub fn intern(&mut self, forms: &[InferredForm]) -> Result<u16, CompileError> {
        to_u16(forms.len().saturating_sub(1), "form index")?;
        let mut rows = Vec::with_capacity(forms.len());
        for form in forms {
            let prefix_id = self
                .tables
                .prefixes
                .iter()
                .position(|p| *p == form.prefix)
                .expect("prefix comes from the table");
            rows.push(ParadigmRow {
                prefix_id: prefix_id as u16,
                suffix_id: self.suffix(&form.suffix)?,
                tag_id: self.tag(&form.tag)?,
            });
        }
        let paradigm = Paradigm { rows };
        let id = match self.paradigm_ids.get(&paradigm) {
            Some(&id) => id,
            None => {
                let id = to_u16(self.tables.paradigms.len(), "paradigm id")?;
                self.tables.paradigms.push(paradigm.clone());
                self.paradigm_ids.insert(paradigm, id);
                self.lexeme_counts.push(0);
                id
            }
        };
        self.lexeme_counts[id as usize] += 1;
        Ok(id)
    }

    pub fn tables(&self) -> &ParadigmTables {
        &self.tables
    }

    pub fn finish(self) -> (ParadigmTables, Vec<u32>) {
        (self.tables, self.lexeme_counts)
    }
}
