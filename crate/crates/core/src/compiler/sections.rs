//! Encoding of the compiled tables into container sections.

use serde::{Deserialize, Serialize};

use crate::automaton::Dafsa;
use crate::codec::{DecodeError, Reader, Writer};
use crate::language::LanguageData;
use crate::tagset::GrammemeRegistry;

use super::container::{read_container, write_container, ContainerError, Section};
use super::paradigm::{Paradigm, ParadigmRow, ParadigmTables};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub format_version: u16,
    pub language: String,
    pub lexemes: u32,
    pub forms: u32,
    pub paradigms: u32,
    pub word_states: u32,
}

/// Everything a dictionary container holds, decoded.
#[derive(Debug, Clone, PartialEq)]
pub struct DictionarySections {
    pub meta: Meta,
    pub registry: GrammemeRegistry,
    pub tables: ParadigmTables,
    pub words: Dafsa,
    /// Indexed by paradigm prefix id.
    pub prediction: Vec<Dafsa>,
    pub cpd: Option<Dafsa>,
    pub language: LanguageData,
}

pub const SECTION_ORDER: [&str; 10] = [
    "meta",
    "grammemes",
    "tags",
    "prefixes",
    "suffixes",
    "paradigms",
    "words",
    "prediction",
    "cpd",
    "language",
];

fn encode_strings<'a, I: ExactSizeIterator<Item = &'a str>>(items: I) -> Vec<u8> {
    let mut w = Writer::new();
    w.u32(items.len() as u32);
    for s in items {
        w.str(s);
    }
    w.finish()
}

fn decode_strings(body: &[u8]) -> Result<Vec<String>, DecodeError> {
    let mut r = Reader::new(body);
    let n = r.u32()? as usize;
    let mut out = Vec::with_capacity(n.min(body.len()));
    for _ in 0..n {
        out.push(r.str()?.to_string());
    }
    r.expect_end()?;
    Ok(out)
}

fn encode_grammemes(registry: &GrammemeRegistry) -> Vec<u8> {
    let mut w = Writer::new();
    w.u32(registry.len() as u32);
    for g in registry.grammemes() {
        w.str(&g.name);
        w.str(g.parent.as_deref().unwrap_or(""));
        w.u8(g.flags());
    }
    w.finish()
}

fn decode_grammemes(body: &[u8]) -> Result<GrammemeRegistry, DecodeError> {
    let mut r = Reader::new(body);
    let n = r.u32()? as usize;
    let mut registry = GrammemeRegistry::new();
    for _ in 0..n {
        let name = r.str()?;
        let parent = r.str()?;
        let flags = r.u8()?;
        if let Err(e) = registry.insert_raw(name, (!parent.is_empty()).then_some(parent), flags) {
            return r.fail(e.to_string());
        }
    }
    r.expect_end()?;
    Ok(registry)
}

fn encode_paradigms(paradigms: &[Paradigm]) -> Vec<u8> {
    let mut w = Writer::new();
    w.u32(paradigms.len() as u32);
    for p in paradigms {
        w.u16(p.rows.len() as u16);
        for row in &p.rows {
            w.u16(row.prefix_id);
            w.u16(row.suffix_id);
            w.u16(row.tag_id);
        }
    }
    w.finish()
}

fn decode_paradigms(body: &[u8]) -> Result<Vec<Paradigm>, DecodeError> {
    let mut r = Reader::new(body);
    let n = r.u32()? as usize;
    let mut out = Vec::with_capacity(n.min(body.len()));
    for _ in 0..n {
        let rows = r.u16()? as usize;
        let mut p = Paradigm {
            rows: Vec::with_capacity(rows),
        };
        for _ in 0..rows {
            p.rows.push(ParadigmRow {
                prefix_id: r.u16()?,
                suffix_id: r.u16()?,
                tag_id: r.u16()?,
            });
        }
        out.push(p);
    }
    r.expect_end()?;
    Ok(out)
}

fn encode_prediction(dafsas: &[Dafsa]) -> Vec<u8> {
    let mut w = Writer::new();
    w.u16(dafsas.len() as u16);
    for d in dafsas {
        w.blob(&d.serialize());
    }
    w.finish()
}

fn decode_prediction(body: &[u8]) -> Result<Vec<Dafsa>, DecodeError> {
    let mut r = Reader::new(body);
    let n = r.u16()? as usize;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let at = r.pos();
        let blob = r.blob()?;
        out.push(Dafsa::deserialize(blob).map_err(|e| DecodeError {
            offset: at + 4 + e.offset,
            reason: e.reason,
        })?);
    }
    r.expect_end()?;
    Ok(out)
}

fn section_error(section: &str, reason: impl std::fmt::Display) -> ContainerError {
    ContainerError::Section {
        section: section.to_string(),
        reason: reason.to_string(),
    }
}

impl DictionarySections {
    pub fn to_sections(&self) -> Vec<Section> {
        let tags: Vec<String> = self.tables.tags.iter().map(|t| t.to_string()).collect();
        let mut out = vec![
            ("meta", serde_json::to_vec(&self.meta).expect("meta serializes")),
            ("grammemes", encode_grammemes(&self.registry)),
            ("tags", encode_strings(tags.iter().map(String::as_str))),
            ("prefixes", encode_strings(self.tables.prefixes.iter().map(String::as_str))),
            ("suffixes", encode_strings(self.tables.suffixes.iter().map(String::as_str))),
            ("paradigms", encode_paradigms(&self.tables.paradigms)),
            ("words", self.words.serialize()),
            ("prediction", encode_prediction(&self.prediction)),
        ];
        if let Some(cpd) = &self.cpd {
            out.push(("cpd", cpd.serialize()));
        }
        out.push((
            "language",
            serde_json::to_vec(&self.language).expect("language data serializes"),
        ));
        out.into_iter()
            .map(|(name, body)| Section {
                name: name.to_string(),
                body,
            })
            .collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        write_container(&self.to_sections())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ContainerError> {
        let sections = read_container(bytes)?;
        for s in &sections {
            if !SECTION_ORDER.contains(&s.name.as_str()) {
                return Err(section_error(&s.name, "unknown section"));
            }
        }
        let get = |name: &str| -> Result<&[u8], ContainerError> {
            sections
                .iter()
                .find(|s| s.name == name)
                .map(|s| s.body.as_slice())
                .ok_or_else(|| ContainerError::Missing(name.to_string()))
        };
        let meta: Meta = serde_json::from_slice(get("meta")?).map_err(|e| section_error("meta", e))?;
        let registry = decode_grammemes(get("grammemes")?).map_err(|e| section_error("grammemes", e))?;
        let tags = decode_strings(get("tags")?)
            .map_err(|e| section_error("tags", e))?
            .iter()
            .map(|t| registry.parse_tag(t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| section_error("tags", e))?;
        let prefixes = decode_strings(get("prefixes")?).map_err(|e| section_error("prefixes", e))?;
        let suffixes = decode_strings(get("suffixes")?).map_err(|e| section_error("suffixes", e))?;
        let paradigms = decode_paradigms(get("paradigms")?).map_err(|e| section_error("paradigms", e))?;
        for (pid, p) in paradigms.iter().enumerate() {
            for row in &p.rows {
                if row.prefix_id as usize >= prefixes.len()
                    || row.suffix_id as usize >= suffixes.len()
                    || row.tag_id as usize >= tags.len()
                {
                    return Err(section_error("paradigms", format!("paradigm {pid} has a dangling id")));
                }
            }
        }
        let words = Dafsa::deserialize(get("words")?).map_err(|e| section_error("words", e))?;
        let prediction = decode_prediction(get("prediction")?).map_err(|e| section_error("prediction", e))?;
        if prediction.len() != prefixes.len() {
            return Err(section_error("prediction", "one automaton per paradigm prefix expected"));
        }
        let cpd = match sections.iter().find(|s| s.name == "cpd") {
            Some(s) => Some(Dafsa::deserialize(&s.body).map_err(|e| section_error("cpd", e))?),
            None => None,
        };
        let language: LanguageData =
            serde_json::from_slice(get("language")?).map_err(|e| section_error("language", e))?;
        Ok(DictionarySections {
            meta,
            registry,
            tables: ParadigmTables {
                prefixes,
                suffixes,
                tags,
                paradigms,
            },
            words,
            prediction,
            cpd,
            language,
        })
    }
}
