//! Source lexicon readers: OpenCorpora XML exports and a tab-separated
//! text format for hand-written lexicons.
//!
//! Text format: one `word<TAB>tag` line per form, lexemes separated by blank
//! lines, `#link <target> <type>` lines attach a link from the current lexeme
//! to the lexeme with the given 1-based ordinal. Other `#` lines are comments.

use std::collections::HashMap;
use std::io::BufRead;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

use crate::tagset::{GrammemeRegistry, Tag, TagError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Link {
    pub target: u32,
    pub link_type: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceLexeme {
    pub id: u32,
    /// First form is the normal form.
    pub forms: Vec<(String, Tag)>,
    pub links: Vec<Link>,
}

/// An ingested lexicon with the registry its tags were parsed against.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub lexemes: Vec<SourceLexeme>,
    pub registry: GrammemeRegistry,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    Text { line: usize, reason: String },
    #[error("XML error at byte {position}: {reason}")]
    Xml { position: u64, reason: String },
    #[error("lemma {lemma}: {reason}")]
    Lemma { lemma: u32, reason: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub fn ingest_text<R: BufRead>(input: R) -> Result<Lexicon, IngestError> {
    let mut registry = GrammemeRegistry::opencorpora();
    let mut lexemes = Vec::new();
    let mut current = SourceLexeme {
        id: 1,
        forms: Vec::new(),
        links: Vec::new(),
    };
    let flush = |current: &mut SourceLexeme, lexemes: &mut Vec<SourceLexeme>| {
        if !current.forms.is_empty() {
            let next_id = current.id + 1;
            lexemes.push(std::mem::replace(
                current,
                SourceLexeme {
                    id: next_id,
                    forms: Vec::new(),
                    links: Vec::new(),
                },
            ));
        }
    };
    for (n, line) in input.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut current, &mut lexemes);
            continue;
        }
        if let Some(rest) = line.strip_prefix("#link") {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                [target, link_type] => target.parse().ok().zip(link_type.parse().ok()),
                _ => None,
            };
            let Some((target, link_type)) = parsed else {
                return Err(IngestError::Text {
                    line: line_no,
                    reason: "expected `#link <target> <type>`".into(),
                });
            };
            current.links.push(Link { target, link_type });
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let Some((word, tag)) = line.split_once('\t') else {
            return Err(IngestError::Text {
                line: line_no,
                reason: "missing tab between word and tag".into(),
            });
        };
        let tag = registry
            .parse_tag_ingest(tag)
            .map_err(|e| IngestError::Text {
                line: line_no,
                reason: e.to_string(),
            })?;
        current.forms.push((word.trim().to_string(), tag));
    }
    flush(&mut current, &mut lexemes);
    Ok(Lexicon {
        lexemes,
        registry,
        warnings: Vec::new(),
    })
}

#[derive(Default)]
struct LemmaBuilder {
    id: u32,
    lemma_grammemes: Vec<String>,
    forms: Vec<(String, Vec<String>)>,
    in_lemma_head: bool,
}

fn attr(e: &BytesStart<'_>, name: &str, position: u64) -> Result<Option<String>, IngestError> {
    let xml_err = |reason: String| IngestError::Xml { position, reason };
    match e.try_get_attribute(name).map_err(|err| xml_err(err.to_string()))? {
        Some(a) => Ok(Some(
            a.normalized_value(quick_xml::XmlVersion::Implicit1_0)
                .map_err(|err| xml_err(err.to_string()))?
                .into_owned(),
        )),
        None => Ok(None),
    }
}

fn required_attr(e: &BytesStart<'_>, name: &str, position: u64) -> Result<String, IngestError> {
    attr(e, name, position)?.ok_or_else(|| IngestError::Xml {
        position,
        reason: format!(
            "<{}> is missing attribute {name:?}",
            e.name().as_ref().to_string()
        ),
    })
}

fn parse_u32(value: &str, position: u64) -> Result<u32, IngestError> {
    value.parse().map_err(|_| IngestError::Xml {
        position,
        reason: format!("expected an integer, got {value:?}"),
    })
}

/// Reads an OpenCorpora dictionary export.
pub fn ingest_xml<R: BufRead>(input: R) -> Result<Lexicon, IngestError> {
    let mut reader = Reader::from_reader(input);
    let mut registry = GrammemeRegistry::opencorpora();
    let mut buf = Vec::new();

    let mut raw_lemmas: Vec<(u32, Vec<(String, Vec<String>)>)> = Vec::new();
    let mut raw_links: Vec<(u32, u32, u32)> = Vec::new();
    let mut lemma: Option<LemmaBuilder> = None;
    let mut grammeme_parent: Option<String> = None;
    let mut in_grammeme_name = false;
    let mut grammeme_name = String::new();

    loop {
        let position = reader.buffer_position();
        let event = reader.read_event_into(&mut buf).map_err(|e| IngestError::Xml {
            position: reader.error_position(),
            reason: e.to_string(),
        })?;
        match event {
            Event::Eof => break,
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                match e.name().as_ref() {
                    "grammeme" => {
                        grammeme_parent = Some(attr(e, "parent", position)?.unwrap_or_default());
                        grammeme_name.clear();
                    }
                    "name" if grammeme_parent.is_some() => in_grammeme_name = !empty,
                    "lemma" => {
                        let id = parse_u32(&required_attr(e, "id", position)?, position)?;
                        lemma = Some(LemmaBuilder {
                            id,
                            ..Default::default()
                        });
                        if empty {
                            return Err(IngestError::Lemma {
                                lemma: id,
                                reason: "lemma has no forms".into(),
                            });
                        }
                    }
                    "l" => {
                        if let Some(l) = lemma.as_mut() {
                            l.in_lemma_head = !empty;
                        }
                    }
                    "f" => {
                        if let Some(l) = lemma.as_mut() {
                            let word = required_attr(e, "t", position)?;
                            l.forms.push((word, Vec::new()));
                            l.in_lemma_head = false;
                        }
                    }
                    "g" => {
                        if let Some(l) = lemma.as_mut() {
                            let v = required_attr(e, "v", position)?;
                            if l.in_lemma_head {
                                l.lemma_grammemes.push(v);
                            } else if let Some((_, gs)) = l.forms.last_mut() {
                                gs.push(v);
                            }
                        }
                    }
                    "link" => {
                        let from = parse_u32(&required_attr(e, "from", position)?, position)?;
                        let to = parse_u32(&required_attr(e, "to", position)?, position)?;
                        let ty = parse_u32(&required_attr(e, "type", position)?, position)?;
                        raw_links.push((from, to, ty));
                    }
                    _ => {}
                }
            }
            Event::Text(ref t) if in_grammeme_name => {
                grammeme_name.push_str(t.xml10_content().trim());
            }
            Event::End(ref e) => match e.name().as_ref() {
                "name" => in_grammeme_name = false,
                "grammeme" => {
                    if let Some(parent) = grammeme_parent.take() {
                        if grammeme_name.is_empty() {
                            return Err(IngestError::Xml {
                                position,
                                reason: "grammeme without a name".into(),
                            });
                        }
                        let parent = (!parent.is_empty()).then_some(parent.as_str());
                        registry
                            .register(&grammeme_name, parent)
                            .map_err(|e| IngestError::Xml {
                                position,
                                reason: e.to_string(),
                            })?;
                    }
                }
                "l" => {
                    if let Some(l) = lemma.as_mut() {
                        l.in_lemma_head = false;
                    }
                }
                "lemma" => {
                    if let Some(l) = lemma.take() {
                        if l.forms.is_empty() {
                            return Err(IngestError::Lemma {
                                lemma: l.id,
                                reason: "lemma has no forms".into(),
                            });
                        }
                        let forms = l
                            .forms
                            .into_iter()
                            .map(|(w, gs)| {
                                let mut all = l.lemma_grammemes.clone();
                                all.extend(gs);
                                (w, all)
                            })
                            .collect();
                        raw_lemmas.push((l.id, forms));
                    }
                }
                _ => {}
            },
            _ => {}
        }
        buf.clear();
    }

    let mut lexemes = Vec::with_capacity(raw_lemmas.len());
    for (id, forms) in raw_lemmas {
        let mut parsed = Vec::with_capacity(forms.len());
        for (word, grammemes) in forms {
            if grammemes.is_empty() {
                return Err(IngestError::Lemma {
                    lemma: id,
                    reason: format!("form {word:?} has no grammemes"),
                });
            }
            parsed.push((word, tag_from_names(&mut registry, &grammemes, id)?));
        }
        lexemes.push(SourceLexeme {
            id,
            forms: parsed,
            links: Vec::new(),
        });
    }

    let index: HashMap<u32, usize> = lexemes.iter().enumerate().map(|(i, l)| (l.id, i)).collect();
    let mut warnings = Vec::new();
    for (from, to, link_type) in raw_links {
        match index.get(&from) {
            Some(&i) => lexemes[i].links.push(Link {
                target: to,
                link_type,
            }),
            None => warnings.push(format!("link {from}->{to}: unknown source lemma, ignored")),
        }
    }
    Ok(Lexicon {
        lexemes,
        registry,
        warnings,
    })
}

fn tag_from_names(
    registry: &mut GrammemeRegistry,
    names: &[String],
    lemma: u32,
) -> Result<Tag, IngestError> {
    let wrap = |e: TagError| IngestError::Lemma {
        lemma,
        reason: e.to_string(),
    };
    for name in names {
        if registry.get(name).is_none() {
            registry.register(name, None).map_err(wrap)?;
        }
    }
    registry.make_tag(names).map_err(wrap)
}

#[cfg(test)]
mod tests {
    use super::*;

    const YOZH_TEXT: &str = "ёж\tNOUN,anim,masc sing,nomn
ежа\tNOUN,anim,masc sing,gent
ежу\tNOUN,anim,masc sing,datv
ежа\tNOUN,anim,masc sing,accs
ежом\tNOUN,anim,masc sing,ablt
еже\tNOUN,anim,masc sing,loct
ежи\tNOUN,anim,masc plur,nomn
ежей\tNOUN,anim,masc plur,gent
ежам\tNOUN,anim,masc plur,datv
ежей\tNOUN,anim,masc plur,accs
ежами\tNOUN,anim,masc plur,ablt
ежах\tNOUN,anim,masc plur,loct
";

    fn yozh_xml() -> String {
        let forms: String = YOZH_TEXT
            .lines()
            .map(|l| {
                let (w, t) = l.split_once('\t').unwrap();
                let form_part = t.split_once(' ').unwrap().1;
                let gs: String = form_part
                    .split(',')
                    .map(|g| format!("<g v=\"{g}\"/>"))
                    .collect();
                format!("<f t=\"{w}\">{gs}</f>")
            })
            .collect();
        format!(
            r#"<?xml version="1.0" encoding="utf-8"?>
<dictionary version="0.92">
<grammemes>
<grammeme parent=""><name>POST</name></grammeme>
<grammeme parent="POST"><name>NOUN</name></grammeme>
</grammemes>
<lemmata>
<lemma id="7" rev="7"><l t="ёж"><g v="NOUN"/><g v="anim"/><g v="masc"/></l>{forms}</lemma>
</lemmata>
</dictionary>"#
        )
    }

    #[test]
    fn text_lexeme() {
        let lex = ingest_text("стол\tNOUN,inan,masc,sing,nomn\nстола\tNOUN,inan,masc,sing,gent\n".as_bytes())
            .unwrap();
        assert_eq!(lex.lexemes.len(), 1);
        assert_eq!(lex.lexemes[0].forms.len(), 2);
        assert_eq!(lex.lexemes[0].forms[1].0, "стола");
    }

    #[test]
    fn blank_text_is_empty() {
        assert!(ingest_text("".as_bytes()).unwrap().lexemes.is_empty());
        assert!(ingest_text("\n\n".as_bytes()).unwrap().lexemes.is_empty());
    }

    #[test]
    fn tabless_line_reports_line_number() {
        let err = ingest_text("стол\tNOUN\n\nбез таба\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::Text { line: 3, .. }), "{err}");
    }

    #[test]
    fn text_links_and_ordinals() {
        let src = "стать\tINFN,perf\n\nстал\tVERB,perf,masc,sing,past\n#link 1 3\n";
        let lex = ingest_text(src.as_bytes()).unwrap();
        assert_eq!(lex.lexemes[0].id, 1);
        assert_eq!(lex.lexemes[1].id, 2);
        assert_eq!(lex.lexemes[1].links, vec![Link { target: 1, link_type: 3 }]);
    }

    #[test]
    fn xml_yozh_matches_text() {
        let xml = ingest_xml(yozh_xml().as_bytes()).unwrap();
        let text = ingest_text(YOZH_TEXT.as_bytes()).unwrap();
        assert_eq!(xml.lexemes.len(), 1);
        let lexeme = &xml.lexemes[0];
        assert_eq!(lexeme.id, 7);
        assert_eq!(lexeme.forms.len(), 12);
        assert_eq!(lexeme.forms[0].0, "ёж");
        assert_eq!(lexeme.forms[0].1.to_string(), "NOUN,anim,masc,sing,nomn");
        assert_eq!(lexeme.forms, text.lexemes[0].forms);
    }

    #[test]
    fn xml_empty_lemmata() {
        let xml = r#"<dictionary><grammemes></grammemes><lemmata></lemmata></dictionary>"#;
        assert!(ingest_xml(xml.as_bytes()).unwrap().lexemes.is_empty());
    }

    #[test]
    fn xml_links() {
        let xml = r#"<dictionary><lemmata>
<lemma id="1"><l t="стать"><g v="INFN"/></l><f t="стать"/></lemma>
<lemma id="2"><l t="стал"><g v="VERB"/></l><f t="стал"><g v="past"/></f></lemma>
</lemmata>
<link_types><type id="3">INFN-VERB</type></link_types>
<links><link id="1" from="1" to="2" type="3"/></links></dictionary>"#;
        let lex = ingest_xml(xml.as_bytes()).unwrap();
        assert_eq!(lex.lexemes[0].links, vec![Link { target: 2, link_type: 3 }]);
        assert_eq!(lex.lexemes[0].forms[0].1.to_string(), "INFN");
    }

    #[test]
    fn xml_form_without_grammemes() {
        let xml = r#"<dictionary><lemmata><lemma id="5"><l t="x"/><f t="x"/></lemma></lemmata></dictionary>"#;
        let err = ingest_xml(xml.as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::Lemma { lemma: 5, .. }), "{err}");
    }

    #[test]
    fn malformed_xml_has_position() {
        let xml = "<dictionary><lemmata><lemma id=\"1\"></lemmata>";
        let err = ingest_xml(xml.as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::Xml { .. }), "{err}");
    }

    #[test]
    fn xml_grammeme_section_registers_parents() {
        let xml = r#"<dictionary><grammemes>
<grammeme parent=""><name>XCAT</name></grammeme>
<grammeme parent="XCAT"><name>xval</name></grammeme>
</grammemes><lemmata></lemmata></dictionary>"#;
        let lex = ingest_xml(xml.as_bytes()).unwrap();
        assert_eq!(lex.registry.get("xval").unwrap().parent.as_deref(), Some("XCAT"));
    }
}
