mod common;

use std::collections::{BTreeMap, BTreeSet};

use morphkit::automaton::SEP;
use morphkit::compiler::{
    build_words_dafsa, compile, infer_paradigm, ingest_text, ingest_xml, join_linked_lexemes, read_container,
    CompileError, CompileOptions, ContainerError, DictionarySections, EndingRecord, IngestError, JoinableLinks,
    Link, PredictionOptions, SourceLexeme, WordRecord,
};
use morphkit::{Dictionary, GrammemeRegistry};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Rewrites the text lexicon format as an OpenCorpora-style export. The
/// part of a tag before the space goes on `<l>` when every form of the
/// lexeme agrees on it.
fn text_to_xml(text: &str) -> String {
    let lexicon = ingest_text(text.as_bytes()).unwrap();
    let mut raw: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for line in text.lines() {
        if line.trim().is_empty() {
            if !raw.last().unwrap().is_empty() {
                raw.push(Vec::new());
            }
        } else if !line.starts_with('#') {
            let (w, t) = line.split_once('\t').unwrap();
            raw.last_mut().unwrap().push((w.to_string(), t.to_string()));
        }
    }
    raw.retain(|l| !l.is_empty());
    assert_eq!(raw.len(), lexicon.lexemes.len());

    let g = |names: &str| -> String {
        names
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|n| format!("<g v=\"{n}\"/>"))
            .collect()
    };
    let mut xml = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<dictionary version=\"0.8\">\n");
    xml.push_str("<grammemes><grammeme parent=\"\"><name>POST</name></grammeme>");
    xml.push_str("<grammeme parent=\"POST\"><name>NOUN</name></grammeme></grammemes>\n<lemmata>\n");
    for (lexeme, forms) in lexicon.lexemes.iter().zip(&raw) {
        let heads: BTreeSet<&str> = forms
            .iter()
            .map(|(_, t)| t.split_once(' ').map_or("", |(h, _)| h))
            .collect();
        let shared = (heads.len() == 1).then(|| *heads.iter().next().unwrap()).filter(|h| !h.is_empty());
        xml.push_str(&format!(
            "<lemma id=\"{}\" rev=\"1\"><l t=\"{}\">{}</l>",
            lexeme.id,
            forms[0].0,
            shared.map(g).unwrap_or_default()
        ));
        for (w, t) in forms {
            let rest = match shared {
                Some(_) => t.split_once(' ').unwrap().1.to_string(),
                None => t.replace(' ', ","),
            };
            xml.push_str(&format!("<f t=\"{w}\">{}</f>", g(&rest)));
        }
        xml.push_str("</lemma>\n");
    }
    xml.push_str("</lemmata>\n<links>\n");
    let mut n = 0;
    for lexeme in &lexicon.lexemes {
        for link in &lexeme.links {
            n += 1;
            xml.push_str(&format!(
                "<link id=\"{n}\" from=\"{}\" to=\"{}\" type=\"{}\"/>\n",
                lexeme.id, link.target, link.link_type
            ));
        }
    }
    xml.push_str("</links>\n</dictionary>\n");
    xml
}

fn joined_source() -> Vec<SourceLexeme> {
    let lexicon = ingest_text(common::read("toy_ru.txt").as_bytes()).unwrap();
    join_linked_lexemes(lexicon.lexemes, &JoinableLinks::All).lexemes
}

#[test]
fn toy_lexicon_size() {
    let compiled = common::toy();
    assert!(compiled.stats.lexemes >= 20);
    assert!(compiled.stats.forms >= 150);
    assert!(compiled.warnings.is_empty(), "{:?}", compiled.warnings);
}

#[test]
fn completeness_no_misses_no_extras() {
    let dict = common::toy_dictionary();
    let mut expected: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for lexeme in joined_source() {
        for (w, t) in &lexeme.forms {
            *expected
                .entry(w.to_lowercase())
                .or_default()
                .entry(t.to_string())
                .or_default() += 1;
        }
    }
    for (word, tags) in &expected {
        let mut got: BTreeMap<String, usize> = BTreeMap::new();
        for a in dict.lookup(word).iter().filter(|a| a.matched_word == *word) {
            *got.entry(a.tag.to_string()).or_default() += 1;
        }
        // Identical (word, tag) pairs of one homonym lexeme collapse.
        let want: BTreeSet<&String> = tags.keys().collect();
        assert_eq!(got.keys().collect::<BTreeSet<_>>(), want, "word {word}");
    }
    let distinct: BTreeSet<String> = dict.word_records().into_iter().map(|r| r.0).collect();
    assert_eq!(distinct, expected.keys().cloned().collect());
}

#[test]
fn lexeme_reconstruction() {
    let compiled = common::toy();
    let dict = Dictionary::from_sections(compiled.sections.clone()).unwrap();
    let source = joined_source();
    for record in &compiled.records {
        let built = dict
            .build_lexeme(&record.word, record.paradigm_id as u16, record.form_index as u16)
            .unwrap();
        let built: Vec<(String, String)> = built.into_iter().map(|(w, t)| (w, t.to_string())).collect();
        let matches = source.iter().any(|l| {
            let forms: Vec<(String, String)> = l.forms.iter().map(|(w, t)| (w.to_lowercase(), t.to_string())).collect();
            forms == built && forms[record.form_index as usize].0 == record.word
        });
        assert!(matches, "record {record:?} rebuilds {built:?}");
    }
}

#[test]
fn stem_inference_examples() {
    let reg = GrammemeRegistry::opencorpora();
    let prefixes: Vec<String> = vec!["".into(), "по".into(), "наи".into()];
    let forms = |list: &[(&str, &str)]| -> Vec<(String, morphkit::Tag)> {
        list.iter().map(|(w, t)| (w.to_string(), reg.parse_tag(t).unwrap())).collect()
    };
    let (stem, rows) = infer_paradigm(
        &forms(&[
            ("стол", "NOUN,inan,masc sing,nomn"),
            ("стола", "NOUN,inan,masc sing,gent"),
            ("столу", "NOUN,inan,masc sing,datv"),
        ]),
        &prefixes,
    );
    assert_eq!(stem, "стол");
    assert_eq!(rows.iter().map(|r| r.suffix.as_str()).collect::<Vec<_>>(), ["", "а", "у"]);
    assert!(rows.iter().all(|r| r.prefix.is_empty()));

    let (stem, rows) = infer_paradigm(&forms(&[("вчера", "ADVB")]), &prefixes);
    assert_eq!((stem.as_str(), rows[0].suffix.as_str(), rows[0].prefix.as_str()), ("вчера", "", ""));

    let (stem, rows) = infer_paradigm(
        &forms(&[("ёж", "NOUN,anim,masc sing,nomn"), ("ежа", "NOUN,anim,masc sing,gent")]),
        &prefixes,
    );
    assert_eq!(stem, "");
    assert_eq!(rows[0].suffix, "ёж");
    assert_eq!(rows[1].suffix, "ежа");

    let (stem, rows) = infer_paradigm(
        &forms(&[("хороший", "ADJF,masc,sing,nomn"), ("наилучший", "ADJF,Supr,masc,sing,nomn")]),
        &prefixes,
    );
    assert_eq!(rows[1].prefix, "наи");
    assert_eq!(stem, "");
}

#[test]
fn paradigm_deduplication() {
    for n in [1usize, 2, 5, 40] {
        let mut text = String::new();
        for i in 0..n {
            let stem: String = std::iter::repeat('к').take(i + 1).chain("от".chars()).collect();
            text.push_str(&format!(
                "{stem}\tNOUN,anim,masc sing,nomn\n{stem}а\tNOUN,anim,masc sing,gent\n{stem}ы\tNOUN,anim,masc plur,nomn\n\n"
            ));
        }
        let compiled = common::compile_text(&text);
        assert_eq!(compiled.stats.paradigms, 1, "{n} copies");
        assert_eq!(compiled.stats.lexemes, n);
    }
}

#[test]
fn homonym_records_coexist() {
    let dict = common::toy_dictionary();
    let stali: Vec<_> = dict.lookup("стали");
    assert!(stali.iter().any(|a| a.tag.contains("VERB")));
    assert!(stali.iter().any(|a| a.tag.contains("NOUN")));
}

#[test]
fn words_dafsa_against_multimap() {
    assert!(build_words_dafsa(&[]).unwrap().is_empty());
    let mut rng = StdRng::seed_from_u64(0xc0ffee);
    let letters = ['а', 'б', 'в', 'ё', 'е'];
    let mut records = Vec::new();
    let mut oracle: BTreeMap<String, BTreeSet<(u16, u16)>> = BTreeMap::new();
    for _ in 0..1000 {
        let len = rng.gen_range(1..=4);
        let word: String = (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect();
        let (p, i) = (rng.gen_range(0..600u16), rng.gen_range(0..300u16));
        oracle.entry(word.clone()).or_default().insert((p, i));
        records.push(WordRecord {
            word,
            paradigm_id: p as u32,
            form_index: i as u32,
        });
    }
    let d = build_words_dafsa(&records).unwrap();
    for (word, pairs) in &oracle {
        let got: Vec<(u16, u16)> = d
            .payloads_for(word.as_bytes(), SEP)
            .iter()
            .map(|p| (u16::from_be_bytes([p[0], p[1]]), u16::from_be_bytes([p[2], p[3]])))
            .collect();
        assert_eq!(got, pairs.iter().copied().collect::<Vec<_>>(), "word {word}");
    }
}

#[test]
fn id_capacity_and_bad_words() {
    let record = |word: &str, p: u32, i: u32| WordRecord {
        word: word.into(),
        paradigm_id: p,
        form_index: i,
    };
    assert!(matches!(
        build_words_dafsa(&[record("кот", 65536, 0)]),
        Err(CompileError::Capacity { .. })
    ));
    assert!(matches!(
        build_words_dafsa(&[record("кот", 0, 70000)]),
        Err(CompileError::Capacity { .. })
    ));
    assert!(build_words_dafsa(&[record("кот", 65535, 65535)]).is_ok());
    assert!(matches!(
        build_words_dafsa(&[record("ко\u{1}т", 0, 0)]),
        Err(CompileError::BadWord(_))
    ));
}

/// Brute-force ending table: scan every record for every candidate ending,
/// then apply the cleanup rules one by one.
fn ending_oracle(
    sections: &DictionarySections,
    records: &[WordRecord],
    options: &PredictionOptions,
) -> Vec<BTreeMap<String, BTreeSet<EndingRecord>>> {
    let tables = &sections.tables;
    let mut lexemes: BTreeMap<u32, BTreeSet<&str>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.form_index == 0) {
        lexemes.entry(r.paradigm_id).or_default().insert(&r.word);
    }
    let mut candidates: BTreeSet<String> = BTreeSet::new();
    for r in records {
        let chars: Vec<char> = r.word.chars().collect();
        for len in 1..=5.min(chars.len()) {
            candidates.insert(chars[chars.len() - len..].iter().collect());
        }
    }
    let mut out = vec![BTreeMap::new(); tables.prefixes.len()];
    for (prefix_id, table) in out.iter_mut().enumerate() {
        for ending in &candidates {
            let mut counts: BTreeMap<(u16, u16), u32> = BTreeMap::new();
            for r in records {
                let row = &tables.paradigms[r.paradigm_id as usize].rows[r.form_index as usize];
                let prefix = &tables.prefixes[row.prefix_id as usize];
                let suffix = &tables.suffixes[row.suffix_id as usize];
                let tag = &tables.tags[row.tag_id as usize];
                let body = &r.word[prefix.len()..];
                if row.prefix_id as usize == prefix_id
                    && body.ends_with(ending.as_str())
                    && ending.chars().count() >= suffix.chars().count()
                    && lexemes.get(&r.paradigm_id).map_or(0, BTreeSet::len) >= options.min_paradigm_lexemes as usize
                    && sections.registry.is_open_class(tag)
                {
                    *counts.entry((r.paradigm_id as u16, r.form_index as u16)).or_default() += 1;
                }
            }
            if counts.values().sum::<u32>() < options.min_ending_frequency || counts.is_empty() {
                continue;
            }
            let mut best: BTreeMap<String, (u32, (u16, u16))> = BTreeMap::new();
            for (&(p, i), &c) in &counts {
                let pos = tables.tags[tables.paradigms[p as usize].rows[i as usize].tag_id as usize]
                    .pos()
                    .unwrap_or("")
                    .to_string();
                let better = best.get(&pos).is_none_or(|&(bc, bk)| c > bc || (c == bc && (p, i) < bk));
                if better {
                    best.insert(pos, (c, (p, i)));
                }
            }
            table.insert(
                ending.clone(),
                best.values()
                    .map(|&(c, (p, i))| EndingRecord {
                        frequency: c as u16,
                        paradigm_id: p,
                        form_index: i,
                    })
                    .collect(),
            );
        }
    }
    out
}

fn stored_endings(dict: &Dictionary) -> Vec<BTreeMap<String, BTreeSet<EndingRecord>>> {
    dict.sections()
        .prediction
        .iter()
        .map(|d| {
            let mut table: BTreeMap<String, BTreeSet<EndingRecord>> = BTreeMap::new();
            d.for_each_key(|key| {
                let cut = key.len() - 7;
                assert_eq!(key[cut], SEP);
                table
                    .entry(String::from_utf8(key[..cut].to_vec()).unwrap())
                    .or_default()
                    .insert(EndingRecord::decode(&key[cut + 1..]).unwrap());
            });
            table
        })
        .collect()
}

#[test]
fn prediction_tables_match_suffix_counting() {
    let compiled = common::toy();
    let oracle = ending_oracle(&compiled.sections, &compiled.records, &PredictionOptions::default());
    let dict = Dictionary::from_sections(compiled.sections).unwrap();
    assert_eq!(stored_endings(&dict), oracle);
}

#[test]
fn ost_paradigm_endings() {
    let dict = common::toy_dictionary();
    let radost = dict.lookup("радость");
    // nomn and accs
    assert_eq!(radost.len(), 2);
    let pid = radost[0].paradigm_id;
    for w in ["гадость", "слабость", "новость"] {
        assert_eq!(dict.lookup(w)[0].paradigm_id, pid);
    }
    let nomn = EndingRecord {
        frequency: 4,
        paradigm_id: pid,
        form_index: 0,
    };
    assert_eq!(dict.predict(0, "ость"), vec![("ость".to_string(), nomn)]);
    // Oblique endings: each distinct ending maps to its first form in the
    // paradigm (top-1 per part of speech, ties broken by form index).
    let forms = dict.build_lexeme("радость", pid, 0).unwrap();
    let mut first_index: BTreeMap<String, u16> = BTreeMap::new();
    for (i, (w, _)) in forms.iter().enumerate() {
        let tail: String = w.chars().skip(w.chars().count() - 4).collect();
        first_index.entry(tail).or_insert(i as u16);
    }
    for (tail, idx) in first_index {
        let got = dict.predict(0, &tail);
        assert_eq!(
            got,
            vec![(
                tail.clone(),
                EndingRecord {
                    frequency: 4,
                    paradigm_id: pid,
                    form_index: idx
                }
            )],
            "ending {tail}"
        );
    }
    // Five-letter "дость" is shared by two of the four lexemes.
    assert_eq!(dict.predict(0, "дость")[0].1.frequency, 2);
}

#[test]
fn small_paradigms_do_not_predict() {
    let text = "кошка\tNOUN,anim,femn sing,nomn\nкошки\tNOUN,anim,femn sing,gent\n\n\
                мошка\tNOUN,anim,femn sing,nomn\nмошки\tNOUN,anim,femn sing,gent\n";
    let compiled = common::compile_text(text);
    assert!(compiled.sections.prediction.iter().all(|d| d.is_empty()));
    let with_third = format!("{text}\nблошка\tNOUN,anim,femn sing,nomn\nблошки\tNOUN,anim,femn sing,gent\n");
    let compiled = common::compile_text(&with_third);
    assert!(!compiled.sections.prediction[0].is_empty());
}

#[test]
fn cleanup_is_monotone() {
    let lexicon = || ingest_text(common::read("toy_ru.txt").as_bytes()).unwrap();
    let count = |min: u32| -> usize {
        let options = CompileOptions {
            prediction: PredictionOptions {
                min_ending_frequency: min,
                ..Default::default()
            },
            ..Default::default()
        };
        let compiled = compile(lexicon(), &options).unwrap();
        compiled.sections.prediction.iter().map(|d| d.keys().len()).sum()
    };
    let mut previous = usize::MAX;
    for min in 0..8 {
        let n = count(min);
        assert!(n <= previous, "min {min}: {n} > {previous}");
        previous = n;
    }
}

#[test]
fn empty_lexicon_compiles() {
    let compiled = common::compile_text("");
    assert_eq!(compiled.stats.lexemes, 0);
    assert!(compiled.sections.words.is_empty());
    assert_eq!(compiled.sections.prediction.len(), 3);
    assert!(compiled.sections.prediction.iter().all(|d| d.is_empty()));
    let dict = Dictionary::from_bytes(&compiled.sections.to_bytes()).unwrap();
    assert!(dict.lookup("кот").is_empty());
}

#[test]
fn text_ingest_examples() {
    let lex = ingest_text("стол\tNOUN,inan,masc,sing,nomn\nстола\tNOUN,inan,masc,sing,gent\n".as_bytes()).unwrap();
    assert_eq!(lex.lexemes.len(), 1);
    assert_eq!(lex.lexemes[0].forms.len(), 2);
    assert!(ingest_text("".as_bytes()).unwrap().lexemes.is_empty());
    match ingest_text("стол\tNOUN\nстола NOUN\n".as_bytes()) {
        Err(IngestError::Text { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a line error, got {other:?}"),
    }
}

#[test]
fn xml_ingest_examples() {
    let toy = common::read("toy_ru.txt");
    let from_xml = ingest_xml(text_to_xml(&toy).as_bytes()).unwrap();
    let ezh = &from_xml.lexemes[0];
    assert_eq!(ezh.forms.len(), 12);
    assert_eq!(ezh.forms[0].0, "ёж");
    assert_eq!(ezh.forms[0].1.to_string(), "NOUN,anim,masc,sing,nomn");
    let from_text = ingest_text(toy.as_bytes()).unwrap();
    assert_eq!(from_xml.lexemes, from_text.lexemes);
    assert!(from_xml.lexemes.iter().any(|l| !l.links.is_empty()));

    let empty = ingest_xml("<dictionary><lemmata></lemmata></dictionary>".as_bytes()).unwrap();
    assert!(empty.lexemes.is_empty());

    let bad = ingest_xml("<dictionary><lemmata><lemma id=\"1\"><l t=\"x\"></lemma>".as_bytes());
    assert!(matches!(bad, Err(IngestError::Xml { .. })));
    let bare = "<dictionary><lemmata><lemma id=\"7\"><l t=\"x\"/><f t=\"x\"/></lemma></lemmata></dictionary>";
    assert!(matches!(ingest_xml(bare.as_bytes()), Err(IngestError::Lemma { lemma: 7, .. })));
}

#[test]
fn xml_and_text_containers_are_identical() {
    let toy = common::read("toy_ru.txt");
    let options = CompileOptions::default();
    let a = compile(ingest_text(toy.as_bytes()).unwrap(), &options).unwrap();
    let b = compile(ingest_xml(text_to_xml(&toy).as_bytes()).unwrap(), &options).unwrap();
    assert_eq!(a.sections.to_bytes(), b.sections.to_bytes());
}

#[test]
fn compilation_is_deterministic() {
    let first = common::toy().sections.to_bytes();
    for _ in 0..3 {
        assert_eq!(common::toy().sections.to_bytes(), first);
    }
}

#[test]
fn link_joining() {
    let reg = GrammemeRegistry::opencorpora();
    let lexeme = |id: u32, word: &str, links: Vec<Link>| SourceLexeme {
        id,
        forms: vec![(word.to_string(), reg.parse_tag("NOUN").unwrap())],
        links,
    };
    let link = |target, link_type| Link { target, link_type };

    let plain = vec![lexeme(1, "а", vec![]), lexeme(2, "б", vec![])];
    assert_eq!(join_linked_lexemes(plain.clone(), &JoinableLinks::All).lexemes, plain);

    let chain = vec![
        lexeme(1, "а", vec![link(2, 5)]),
        lexeme(2, "б", vec![link(3, 5)]),
        lexeme(3, "в", vec![]),
    ];
    let joined = join_linked_lexemes(chain.clone(), &JoinableLinks::All).lexemes;
    assert_eq!(joined.len(), 1);
    let words: Vec<&str> = joined[0].forms.iter().map(|(w, _)| w.as_str()).collect();
    assert_eq!(words, ["а", "б", "в"]);

    assert_eq!(join_linked_lexemes(chain.clone(), &JoinableLinks::None).lexemes.len(), 3);
    let only = JoinableLinks::Only([7].into());
    assert_eq!(join_linked_lexemes(chain, &only).lexemes.len(), 3);

    let dangling = vec![lexeme(1, "а", vec![link(9, 1)])];
    let outcome = join_linked_lexemes(dangling, &JoinableLinks::All);
    assert_eq!(outcome.lexemes.len(), 1);
    assert_eq!(outcome.dangling.len(), 1);
}

#[test]
fn joined_verb_lexeme_normal_form() {
    let dict = common::toy_dictionary();
    let smotryu = dict.lookup("смотрю");
    assert_eq!(smotryu.len(), 1);
    let a = &smotryu[0];
    assert_eq!(dict.normal_form("смотрю", a.paradigm_id, a.form_index).unwrap(), "смотреть");
}

#[test]
fn container_round_trip() {
    let compiled = common::toy();
    let bytes = compiled.sections.to_bytes();
    let back = DictionarySections::from_bytes(&bytes).unwrap();
    assert_eq!(back, compiled.sections);
    assert_eq!(back.to_bytes(), bytes);
    let names: Vec<String> = read_container(&bytes).unwrap().into_iter().map(|s| s.name).collect();
    assert_eq!(
        names,
        ["meta", "grammemes", "tags", "prefixes", "suffixes", "paradigms", "words", "prediction", "language"]
    );
}

#[test]
fn container_errors() {
    let bytes = common::toy().sections.to_bytes();
    assert_eq!(read_container(b"MKD2\x01\x00\x00\x00").unwrap_err(), ContainerError::BadMagic);
    assert_eq!(
        read_container(b"MKD1\x09\x00\x00\x00").unwrap_err(),
        ContainerError::BadVersion(9)
    );
    assert_eq!(
        read_container(&bytes[..20]).unwrap_err(),
        ContainerError::Truncated("directory".into())
    );
    match read_container(&bytes[..bytes.len() - 1]).unwrap_err() {
        ContainerError::Truncated(name) => assert_eq!(name, "language"),
        other => panic!("unexpected {other:?}"),
    }
    let mut flipped = bytes.clone();
    let last = flipped.len() - 3;
    flipped[last] ^= 0x20;
    assert_eq!(
        read_container(&flipped).unwrap_err(),
        ContainerError::Checksum("language".into())
    );
}

#[test]
fn figure_container_golden_file() {
    let bytes = common::fig1_sections().to_bytes();
    let path = common::data("fig1.mkd");
    if std::env::var_os("MORPHKIT_BLESS").is_some() {
        std::fs::write(&path, &bytes).unwrap();
    }
    let golden = std::fs::read(&path).expect("golden file; regenerate with MORPHKIT_BLESS=1");
    assert_eq!(bytes, golden);
    let dict = Dictionary::from_bytes(&golden).unwrap();
    assert_eq!(dict.decode_tag(103, 0).unwrap().to_string(), "NOUN,inan,masc,sing,nomn");
}
