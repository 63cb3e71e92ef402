//! Ending → analysis tables used to guess out-of-vocabulary words.

use std::collections::BTreeMap;

use crate::automaton::{Dafsa, SEP};
use crate::tagset::GrammemeRegistry;

use super::paradigm::ParadigmTables;
use super::WordRecord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionOptions {
    /// Paradigms shared by fewer lexemes are not used for guessing.
    pub min_paradigm_lexemes: u32,
    /// Endings seen fewer times (over all their analyses) are dropped.
    pub min_ending_frequency: u32,
    /// Analyses kept per ending and part of speech.
    pub max_top_per_pos: usize,
    pub min_ending_length: usize,
    pub max_ending_length: usize,
}

impl Default for PredictionOptions {
    fn default() -> Self {
        PredictionOptions {
            min_paradigm_lexemes: 3,
            min_ending_frequency: 2,
            max_top_per_pos: 1,
            min_ending_length: 1,
            max_ending_length: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct EndingRecord {
    pub frequency: u16,
    pub paradigm_id: u16,
    pub form_index: u16,
}

impl EndingRecord {
    pub fn encode(&self) -> [u8; 6] {
        let mut out = [0u8; 6];
        out[..2].copy_from_slice(&self.frequency.to_be_bytes());
        out[2..4].copy_from_slice(&self.paradigm_id.to_be_bytes());
        out[4..].copy_from_slice(&self.form_index.to_be_bytes());
        out
    }

    pub fn decode(payload: &[u8]) -> Option<EndingRecord> {
        let b: [u8; 6] = payload.try_into().ok()?;
        Some(EndingRecord {
            frequency: u16::from_be_bytes([b[0], b[1]]),
            paradigm_id: u16::from_be_bytes([b[2], b[3]]),
            form_index: u16::from_be_bytes([b[4], b[5]]),
        })
    }
}

type Analysis = (u16, u16);

/// Per paradigm prefix, the cleaned-up mapping from ending to analyses.
pub fn collect_endings(
    records: &[WordRecord],
    tables: &ParadigmTables,
    paradigm_lexemes: &[u32],
    registry: &GrammemeRegistry,
    options: &PredictionOptions,
) -> Vec<BTreeMap<String, Vec<EndingRecord>>> {
    let mut counts: Vec<BTreeMap<String, BTreeMap<Analysis, u32>>> =
        vec![BTreeMap::new(); tables.prefixes.len()];
    for record in records {
        let (Ok(pid), Ok(idx)) = (u16::try_from(record.paradigm_id), u16::try_from(record.form_index)) else {
            continue;
        };
        if paradigm_lexemes.get(pid as usize).copied().unwrap_or(0) < options.min_paradigm_lexemes {
            continue;
        }
        let Some(row) = tables.row(pid, idx) else {
            continue;
        };
        if !registry.is_open_class(&tables.tags[row.tag_id as usize]) {
            continue;
        }
        let prefix_chars = tables.prefixes[row.prefix_id as usize].chars().count();
        let suffix_chars = tables.suffixes[row.suffix_id as usize].chars().count();
        let chars: Vec<char> = record.word.chars().collect();
        let available = chars.len().saturating_sub(prefix_chars);
        let shortest = options.min_ending_length.max(suffix_chars).max(1);
        for len in shortest..=options.max_ending_length.min(available) {
            let ending: String = chars[chars.len() - len..].iter().collect();
            *counts[row.prefix_id as usize]
                .entry(ending)
                .or_default()
                .entry((pid, idx))
                .or_default() += 1;
        }
    }

    counts
        .into_iter()
        .map(|per_ending| {
            per_ending
                .into_iter()
                .filter_map(|(ending, analyses)| {
                    let total: u32 = analyses.values().sum();
                    if total < options.min_ending_frequency {
                        return None;
                    }
                    let mut by_pos: BTreeMap<&str, Vec<EndingRecord>> = BTreeMap::new();
                    for ((pid, idx), freq) in analyses {
                        let row = tables.row(pid, idx).expect("checked above");
                        let pos = tables.tags[row.tag_id as usize].pos().unwrap_or("");
                        by_pos.entry(pos).or_default().push(EndingRecord {
                            frequency: freq.min(u16::MAX as u32) as u16,
                            paradigm_id: pid,
                            form_index: idx,
                        });
                    }
                    let mut kept: Vec<EndingRecord> = by_pos
                        .into_values()
                        .flat_map(|mut candidates| {
                            candidates.sort_by(|a, b| {
                                b.frequency
                                    .cmp(&a.frequency)
                                    .then(a.paradigm_id.cmp(&b.paradigm_id))
                                    .then(a.form_index.cmp(&b.form_index))
                            });
                            candidates.truncate(options.max_top_per_pos);
                            candidates
                        })
                        .collect();
                    kept.sort();
                    Some((ending, kept))
                })
                .collect()
        })
        .collect()
}

pub fn encode_endings(endings: &BTreeMap<String, Vec<EndingRecord>>) -> Dafsa {
    let mut keys: Vec<Vec<u8>> = endings
        .iter()
        .flat_map(|(ending, records)| {
            records.iter().map(move |r| {
                let mut key = ending.as_bytes().to_vec();
                key.push(SEP);
                key.extend_from_slice(&r.encode());
                key
            })
        })
        .collect();
    keys.sort();
    keys.dedup();
    Dafsa::build_from_sorted(&keys).expect("sorted and deduplicated")
}

/// One ending automaton per paradigm prefix, indexed by prefix id.
pub fn build_prediction_dafsas(
    records: &[WordRecord],
    tables: &ParadigmTables,
    paradigm_lexemes: &[u32],
    registry: &GrammemeRegistry,
    options: &PredictionOptions,
) -> Vec<Dafsa> {
    collect_endings(records, tables, paradigm_lexemes, registry, options)
        .iter()
        .map(encode_endings)
        .collect()
}
