mod common;

use std::collections::{BTreeMap, BTreeSet};

use morphkit::compiler::{compile, ingest_text, CompileOptions};
use morphkit::language::LanguageData;
use morphkit::probability::{
    apply_scores, build_cpd_dafsa, count_corpus, count_corpus_xml, cpd_entries, cpd_lookup, estimate, CorpusCounts,
    CpdError, SCALE,
};
use morphkit::{Analyzer, Dictionary};
use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const VERB: &str = "VERB,perf,intr,plur,past,indc";
const NOUN: &str = "NOUN,inan,femn,sing,gent";

fn stali_analyzer_with_cpd() -> Analyzer {
    let mut compiled = common::compile_text(&common::read("stali.txt"));
    let plain = Analyzer::new(Dictionary::from_sections(compiled.sections.clone()).unwrap());
    let counts = count_corpus(common::read("stali_corpus.tsv").as_bytes()).unwrap();
    let table = estimate(&counts, |w| common::tags_of(&plain, w));
    compiled.sections.cpd = Some(build_cpd_dafsa(&table).unwrap());
    Analyzer::new(Dictionary::from_bytes(&compiled.sections.to_bytes()).unwrap())
}

#[test]
fn corpus_counting() {
    let counts = count_corpus(common::read("stali_corpus.tsv").as_bytes()).unwrap();
    assert_eq!(counts.count_word_tag("стали", VERB), 3);
    assert_eq!(counts.count_word_tag("стали", NOUN), 1);
    assert_eq!(counts.count_word("стали"), 4);
    let two = count_corpus(format!("стали\t{VERB}\nстали\t{VERB}\nСтали\t{NOUN}\n").as_bytes()).unwrap();
    assert_eq!(two.count_word_tag("стали", VERB), 2);
    assert_eq!(two.count_word_tag("стали", NOUN), 1);
    let ambiguous = count_corpus(format!("стали\t{VERB};{NOUN}\n").as_bytes()).unwrap();
    assert!(ambiguous.is_empty());
    assert!(count_corpus("".as_bytes()).unwrap().is_empty());
}

#[test]
fn corpus_xml_matches_lines() {
    let xml = r#"<annotation><text><paragraphs><paragraph><sentence><tokens>
        <token id="1" text="стали"><tfr><v><l id="1" t="стать"><g v="VERB"/><g v="perf"/><g v="intr"/><g v="plur"/><g v="past"/><g v="indc"/></l></v></tfr></token>
        <token id="2" text="Стали"><tfr><v><l id="2" t="сталь"><g v="NOUN"/><g v="inan"/><g v="femn"/><g v="sing"/><g v="gent"/></l></v></tfr></token>
        <token id="3" text="стали"><tfr><v><l id="1" t="стать"><g v="VERB"/></l></v><v><l id="2" t="сталь"><g v="NOUN"/></l></v></tfr></token>
        </tokens></sentence></paragraph></paragraphs></text></annotation>"#;
    let from_xml = count_corpus_xml(xml.as_bytes()).unwrap();
    let from_lines = count_corpus(format!("стали\t{VERB}\nстали\t{NOUN}\n").as_bytes()).unwrap();
    assert_eq!(from_xml, from_lines);
}

#[test]
fn worked_example_fixed_point() {
    let a = stali_analyzer_with_cpd();
    let cpd = a.dictionary().cpd().unwrap();
    assert_eq!(cpd_lookup(cpd, "стали", VERB), Some(666_666));
    assert_eq!(cpd_lookup(cpd, "стали", NOUN), Some(333_333));
    assert_eq!(cpd_entries(cpd).len(), 2);

    let parses = a.analyze("стали").unwrap();
    assert_eq!(parses[0].tag.to_string(), VERB);
    assert!((parses[0].score - 666_666.0 / 999_999.0).abs() < 1e-12);
    assert!((parses[1].score - 333_333.0 / 999_999.0).abs() < 1e-12);
}

#[test]
fn unambiguous_and_unknown_words_are_skipped() {
    let compiled = common::compile_text(&common::read("stali.txt"));
    let a = Analyzer::new(Dictionary::from_sections(compiled.sections).unwrap());
    let counts = count_corpus(format!("сталь\tNOUN,inan,femn sing,nomn\nбнопня\tNOUN\nстали\t{VERB}\n").as_bytes()).unwrap();
    let table = estimate(&counts, |w| common::tags_of(&a, w));
    assert_eq!(table.words(), 1);
    assert_eq!(table.skipped, ["бнопня", "сталь"]);
    let entries: BTreeSet<&str> = table.entries.keys().map(|(_, t)| t.as_str()).collect();
    assert_eq!(entries, [VERB, NOUN].into());
    // NOUN was never seen: smoothing floor (0+1)/(1+2).
    assert_eq!(table.probability("стали", NOUN), Some(1.0 / 3.0));
}

#[test]
fn estimates_against_rational_oracle() {
    let mut rng = StdRng::seed_from_u64(0xe9_0001);
    let pool = ["NOUN", "VERB", "ADJF", "ADVB", "PRCL", "CONJ", "INTJ"];
    for round in 0..1000 {
        let mut counts = CorpusCounts::new();
        let mut analyzer: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for w in 0..rng.gen_range(1..6) {
            let word = format!("w{round}x{w}");
            let k = rng.gen_range(1..=pool.len());
            let mut tags: Vec<String> = pool.iter().map(|t| t.to_string()).collect();
            for i in (1..tags.len()).rev() {
                tags.swap(i, rng.gen_range(0..=i));
            }
            tags.truncate(k);
            for tag in pool {
                if !rng.gen_bool(0.6) {
                    continue;
                }
                for _ in 0..rng.gen_range(0..30) {
                    counts.add(&word, tag);
                }
            }
            if counts.count_word(&word) == 0 {
                counts.add(&word, pool[rng.gen_range(0..pool.len())]);
            }
            analyzer.insert(word, tags);
        }
        let table = estimate(&counts, |w| analyzer[w].clone());
        let mut expected_entries = 0;
        for (word, tags) in &analyzer {
            if tags.len() <= 1 {
                assert!(table.entries.keys().all(|(w, _)| w != word));
                continue;
            }
            let n = counts.count_word(word);
            let b = tags.len().max(counts.corpus_tags(word).len()) as u64;
            let mut sum = Ratio::from_integer(0u64);
            for tag in tags {
                let p = Ratio::new(counts.count_word_tag(word, tag) + 1, n + b);
                sum += p;
                let e = table.entries[&(word.clone(), tag.clone())];
                let exact = *p.numer() as f64 / *p.denom() as f64;
                assert!((e.probability() - exact).abs() < 1e-12);
                let fixed = (p * Ratio::from_integer(SCALE)).floor().to_integer();
                assert_eq!(e.fixed_point() as u64, fixed);
                expected_entries += 1;
            }
            assert!(sum <= Ratio::from_integer(1));
        }
        assert_eq!(table.entries.len(), expected_entries);
    }
}

#[test]
fn more_evidence_never_lowers_probability() {
    let mut rng = StdRng::seed_from_u64(0xe9_0002);
    let tags = vec!["NOUN".to_string(), "VERB".to_string(), "ADJF".to_string()];
    for _ in 0..300 {
        let mut counts = CorpusCounts::new();
        for t in &tags {
            for _ in 0..rng.gen_range(0..10) {
                counts.add("w", t);
            }
        }
        let before = estimate(&counts, |_| tags.clone());
        let t = &tags[rng.gen_range(0..tags.len())];
        counts.add("w", t);
        let after = estimate(&counts, |_| tags.clone());
        let key = ("w".to_string(), t.clone());
        assert!(after.entries[&key].probability() >= before.entries[&key].probability());
    }
}

#[test]
fn cpd_round_trip_and_order() {
    let mut rng = StdRng::seed_from_u64(0xe9_0003);
    let tags = ["NOUN", "VERB", "ADJF", "ADVB"];
    for _ in 0..200 {
        let mut counts = CorpusCounts::new();
        let mut raw: BTreeMap<&str, u32> = BTreeMap::new();
        for t in tags {
            let c = rng.gen_range(0..50);
            raw.insert(t, c);
            for _ in 0..c {
                counts.add("слово", t);
            }
        }
        if counts.is_empty() {
            continue;
        }
        let analyzer: Vec<String> = tags.iter().map(|t| t.to_string()).collect();
        let table = estimate(&counts, |_| analyzer.clone());
        let cpd = build_cpd_dafsa(&table).unwrap();
        for ((w, t), e) in &table.entries {
            assert_eq!(cpd_lookup(&cpd, w, t), Some(e.fixed_point()));
        }
        // Scores order like corpus counts.
        let reg = morphkit::GrammemeRegistry::opencorpora();
        let mut parses: Vec<morphkit::Parse> = tags
            .iter()
            .map(|t| morphkit::Parse {
                word: "слово".into(),
                tag: reg.parse_tag(t).unwrap(),
                normal_form: "слово".into(),
                score: 1.0,
                trace: Vec::new(),
            })
            .collect();
        apply_scores(Some(&cpd), "слово", &mut parses);
        let got: Vec<u32> = parses.iter().map(|p| raw[p.tag.to_string().as_str()]).collect();
        assert!(got.windows(2).all(|w| w[0] >= w[1]), "{got:?}");
        let sum: f64 = parses.iter().map(|p| p.score).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }
}

#[test]
fn encoding_errors_and_empty_table() {
    let mut counts = CorpusCounts::new();
    counts.add("w", "NOUN");
    let mut table = estimate(&counts, |_| vec!["NOUN".into(), "VERB".into()]);
    assert!(build_cpd_dafsa(&table).is_ok());
    let e = *table.entries.values().next().unwrap();
    table.entries.insert(("a:b".into(), "NOUN".into()), e);
    assert!(matches!(build_cpd_dafsa(&table), Err(CpdError::BadText { what: "word", .. })));
    let empty = estimate(&CorpusCounts::new(), |_| Vec::new());
    assert!(build_cpd_dafsa(&empty).unwrap().is_empty());
}

#[test]
fn scoring_fallbacks() {
    let reg = morphkit::GrammemeRegistry::opencorpora();
    let parse = |t: &str| morphkit::Parse {
        word: "w".into(),
        tag: reg.parse_tag(t).unwrap(),
        normal_form: "w".into(),
        score: 1.0,
        trace: Vec::new(),
    };
    let mut uniform: Vec<_> = ["NOUN", "VERB", "ADJF", "ADVB"].iter().map(|t| parse(t)).collect();
    apply_scores(None, "w", &mut uniform);
    assert!(uniform.iter().all(|p| p.score == 0.25));

    let mut counts = CorpusCounts::new();
    counts.add("w", "NOUN");
    let table = estimate(&counts, |_| vec!["NOUN".into(), "VERB".into()]);
    let cpd = build_cpd_dafsa(&table).unwrap();
    // NOUN 2/3, VERB 1/3 stored; ADJF unstored gets half the minimum.
    let mut partial: Vec<_> = ["ADJF", "VERB", "NOUN"].iter().map(|t| parse(t)).collect();
    apply_scores(Some(&cpd), "w", &mut partial);
    let order: Vec<String> = partial.iter().map(|p| p.tag.to_string()).collect();
    assert_eq!(order, ["NOUN", "VERB", "ADJF"]);
    let raw = [666_666.0, 333_333.0, 166_666.5];
    let total: f64 = raw.iter().sum();
    for (p, r) in partial.iter().zip(raw) {
        assert!((p.score - r / total).abs() < 1e-12);
    }
}

#[test]
fn ukrainian_scores_are_uniform() {
    let text = "ґанок\tNOUN,inan,masc sing,nomn\nґанку\tNOUN,inan,masc sing,datv\nґанку\tNOUN,inan,masc sing,loct\n";
    let options = CompileOptions {
        language: LanguageData::ukrainian(),
        ..Default::default()
    };
    let compiled = compile(ingest_text(text.as_bytes()).unwrap(), &options).unwrap();
    assert!(compiled.sections.cpd.is_none());
    let a = Analyzer::new(Dictionary::from_sections(compiled.sections).unwrap());
    let parses = a.analyze("ганку").unwrap();
    assert_eq!(parses.len(), 2);
    assert!(parses.iter().all(|p| p.score == 0.5 && p.word == "ґанку"));
    assert!(!a.unit_ids().contains(&"hyphen_adverb"));
}
