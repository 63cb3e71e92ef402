#![allow(dead_code)]

use std::path::PathBuf;

use morphkit::automaton::Dafsa;
use morphkit::compiler::{
    build_words_dafsa, compile, ingest_text, CompileOptions, Compiled, DictionarySections, Meta, Paradigm,
    ParadigmRow, ParadigmTables, WordRecord,
};
use morphkit::language::LanguageData;
use morphkit::{Analyzer, Dictionary, GrammemeRegistry};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

pub fn compile_text(text: &str) -> Compiled {
    compile(ingest_text(text.as_bytes()).unwrap(), &CompileOptions::default()).unwrap()
}

pub fn toy() -> Compiled {
    compile_text(&read("toy_ru.txt"))
}

pub fn toy_dictionary() -> Dictionary {
    Dictionary::from_sections(toy().sections).unwrap()
}

pub fn toy_analyzer() -> Analyzer {
    Analyzer::new(toy_dictionary())
}

pub fn analyzer_for(text: &str) -> Analyzer {
    Analyzer::new(Dictionary::from_sections(compile_text(text).sections).unwrap())
}

/// (word, paradigm, form) triples of the DAFSA figure.
pub const FIG1: [(&str, u16, u16); 6] = [
    ("двор", 103, 0),
    ("ёж", 104, 0),
    ("дворник", 101, 2),
    ("дворник", 102, 2),
    ("ёжик", 101, 2),
    ("ёжик", 102, 2),
];

/// A dictionary holding exactly the figure's six records. Paradigms below
/// 101 are one-row fillers so the figure's ids resolve.
pub fn fig1_sections() -> DictionarySections {
    let registry = GrammemeRegistry::opencorpora();
    let tag = |t: &str| registry.parse_tag(t).unwrap();
    let tags = vec![
        tag("NOUN,inan,masc sing,nomn"),
        tag("NOUN,inan,masc sing,gent"),
        tag("NOUN,anim,masc sing,nomn"),
        tag("NOUN,anim,masc sing,gent"),
        tag("NOUN,anim,masc sing,datv"),
    ];
    let row = |tag_id| ParadigmRow {
        prefix_id: 0,
        suffix_id: 0,
        tag_id,
    };
    let mut paradigms: Vec<Paradigm> = (0..101).map(|_| Paradigm { rows: vec![row(0)] }).collect();
    paradigms.push(Paradigm { rows: vec![row(2), row(3), row(4)] });
    paradigms.push(Paradigm { rows: vec![row(0), row(1), row(0)] });
    paradigms.push(Paradigm { rows: vec![row(0)] });
    paradigms.push(Paradigm { rows: vec![row(2)] });
    let records: Vec<WordRecord> = FIG1
        .iter()
        .map(|&(w, p, i)| WordRecord {
            word: w.into(),
            paradigm_id: p as u32,
            form_index: i as u32,
        })
        .collect();
    let language = LanguageData::russian();
    let words = build_words_dafsa(&records).unwrap();
    DictionarySections {
        meta: Meta {
            format_version: 1,
            language: language.name.clone(),
            lexemes: 6,
            forms: 6,
            paradigms: paradigms.len() as u32,
            word_states: words.state_count() as u32,
        },
        registry,
        tables: ParadigmTables {
            prefixes: language.paradigm_prefixes.clone(),
            suffixes: vec![String::new()],
            tags,
            paradigms,
        },
        words,
        prediction: vec![Dafsa::empty(); language.paradigm_prefixes.len()],
        cpd: None,
        language,
    }
}

pub fn tags_of(analyzer: &Analyzer, token: &str) -> Vec<String> {
    analyzer
        .analyze(token)
        .unwrap()
        .iter()
        .map(|p| p.tag.to_string())
        .collect()
}
