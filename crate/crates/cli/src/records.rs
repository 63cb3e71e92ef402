//! Output records. One TSV line per parse; one JSONL object per token.
//!
//! TSV columns: token, rank, tag, normal form, score, trace, word, and for
//! lemma/inflect/agree also result and result tag (empty when nothing
//! satisfies the request). Traces list unit ids innermost first, joined by
//! `+`.

use std::io::{self, Write};

use clap::ValueEnum;
use morphkit::Parse;
use serde::Serialize;

/// Version of the JSONL schema.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Jsonl,
}

#[derive(Serialize)]
pub struct Record {
    #[serde(skip)]
    token: String,
    rank: usize,
    word: String,
    tag: String,
    normal_form: String,
    score: f64,
    trace: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result_tag: Option<String>,
}

#[derive(Serialize)]
struct Line<'a> {
    version: u32,
    token: &'a str,
    parses: &'a [Record],
}

fn six_places(score: f64) -> f64 {
    format!("{score:.6}").parse().expect("formatted float")
}

impl Record {
    /// `derived` is `None` for plain analysis, `Some(None)` when a derived
    /// command found no form.
    pub fn new(token: &str, rank: usize, parse: &Parse, derived: Option<Option<&Parse>>) -> Self {
        Record {
            token: token.to_string(),
            rank,
            word: parse.word.clone(),
            tag: parse.tag.to_string(),
            normal_form: parse.normal_form.clone(),
            score: six_places(parse.score),
            trace: parse.unit_ids().into_iter().map(String::from).collect(),
            result: derived.map(|d| d.map(|p| p.word.clone()).unwrap_or_default()),
            result_tag: derived.map(|d| d.map(|p| p.tag.to_string()).unwrap_or_default()),
        }
    }

    fn tsv(&self) -> String {
        let mut fields = vec![
            self.token.clone(),
            self.rank.to_string(),
            self.tag.clone(),
            self.normal_form.clone(),
            format!("{:.6}", self.score),
            self.trace.join("+"),
            self.word.clone(),
        ];
        if let (Some(r), Some(t)) = (&self.result, &self.result_tag) {
            fields.push(r.clone());
            fields.push(t.clone());
        }
        fields.join("\t")
    }
}

pub fn write<W: Write>(out: &mut W, format: Format, token: &str, records: &[Record]) -> io::Result<()> {
    match format {
        Format::Tsv => {
            for r in records {
                writeln!(out, "{}", r.tsv())?;
            }
        }
        Format::Jsonl => {
            let line = Line {
                version: SCHEMA_VERSION,
                token,
                parses: records,
            };
            serde_json::to_writer(&mut *out, &line)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
