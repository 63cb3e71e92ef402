//! The individual analyzer units and the default pipeline.

use serde::Serialize;

use crate::automaton::Dafsa;
use crate::language::LanguageData;
use crate::tagset::{GrammemeRegistry, Tag};

use super::{AnalyzerError, Context, LexemeForm, Parse, Token, TraceStep, Unit};

/// Unit-local state recorded in a parse trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnitState {
    Nonlexical {
        word: String,
        tag: String,
    },
    Dictionary {
        word: String,
        paradigm_id: u16,
        form_index: u16,
    },
    Initials {
        letter: String,
        group: InitialsGroup,
        form_index: u16,
    },
    KnownPrefix {
        prefix: String,
    },
    UnknownPrefix {
        prefix: String,
        word: String,
        paradigm_id: u16,
        form_index: u16,
    },
    HyphenParticle {
        particle: String,
    },
    HyphenAdverb {
        word: String,
    },
    /// `left == None` marks the variant whose left part never inflects.
    HyphenCompound {
        left_word: String,
        left: Option<Box<Parse>>,
        /// Position of the original right-hand parse in its lexeme.
        anchor: u16,
    },
    Endings {
        word: String,
        prefix_id: u16,
        ending: String,
        frequency: u16,
        paradigm_id: u16,
        form_index: u16,
    },
    Unknown {
        word: String,
    },
}

fn step(unit: &dyn Unit, state: UnitState) -> TraceStep {
    TraceStep {
        unit: unit.id().to_string(),
        state,
    }
}

fn foreign(unit: &dyn Unit, state: &UnitState) -> AnalyzerError {
    AnalyzerError::ForeignState {
        unit: unit.id().to_string(),
        state: format!("{state:?}"),
    }
}

fn need_inner(unit: &dyn Unit, state: &UnitState, inner: Option<Vec<LexemeForm>>) -> Result<Vec<LexemeForm>, AnalyzerError> {
    inner.ok_or_else(|| foreign(unit, state))
}

fn wrap(unit: &dyn Unit, inner: Parse, word: String, normal_form: String, score: f64, state: UnitState) -> Parse {
    let mut trace = inner.trace;
    trace.push(step(unit, state));
    Parse {
        word,
        tag: inner.tag,
        normal_form,
        score,
        trace,
    }
}

fn wrap_forms(unit: &dyn Unit, forms: Vec<LexemeForm>, state: &UnitState, spell: impl Fn(&str) -> String) -> Vec<LexemeForm> {
    forms
        .into_iter()
        .map(|mut f| {
            f.word = spell(&f.word);
            f.trace.push(step(unit, state.clone()));
            f
        })
        .collect()
}

fn tag_of(registry: &GrammemeRegistry, text: &str) -> Option<Tag> {
    registry.parse_tag(text).ok()
}

// ---------------------------------------------------------------------------

fn is_punctuation(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic() || (('\u{00C0}'..='\u{024F}').contains(&c) && c.is_alphabetic())
}

fn is_real(token: &str) -> bool {
    let mut parts = token.splitn(2, ['.', ',']);
    let (Some(a), Some(b)) = (parts.next(), parts.next()) else {
        return false;
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    digits(a) && digits(b)
}

const ROMAN: [(u32, &str); 13] = [
    (1000, "M"),
    (900, "CM"),
    (500, "D"),
    (400, "CD"),
    (100, "C"),
    (90, "XC"),
    (50, "L"),
    (40, "XL"),
    (10, "X"),
    (9, "IX"),
    (5, "V"),
    (4, "IV"),
    (1, "I"),
];

pub fn to_roman(mut n: u32) -> String {
    let mut out = String::new();
    for (value, digits) in ROMAN {
        while n >= value {
            out.push_str(digits);
            n -= value;
        }
    }
    out
}

/// Value of a canonical uppercase Roman numeral in 1..=3999.
pub fn parse_roman(token: &str) -> Option<u32> {
    let digit = |c| match c {
        'I' => Some(1),
        'V' => Some(5),
        'X' => Some(10),
        'L' => Some(50),
        'C' => Some(100),
        'D' => Some(500),
        'M' => Some(1000),
        _ => None,
    };
    let values: Vec<i64> = token.chars().map(digit).collect::<Option<_>>()?;
    let mut total = 0i64;
    for (i, &v) in values.iter().enumerate() {
        match values.get(i + 1) {
            Some(&next) if next > v => total -= v,
            _ => total += v,
        }
    }
    // Only the canonical spelling of the value is accepted.
    let total = u32::try_from(total).ok().filter(|t| (1..=3999).contains(t))?;
    (to_roman(total) == token).then_some(total)
}

/// The token class of a non-word token, most specific first.
pub fn classify_nonlexical(token: &str) -> Option<&'static str> {
    if token.is_empty() {
        return None;
    }
    if token.chars().all(is_punctuation) {
        Some("PNCT")
    } else if token.bytes().all(|b| b.is_ascii_digit()) {
        Some("NUMB,intg")
    } else if is_real(token) {
        Some("NUMB,real")
    } else if parse_roman(token).is_some() {
        Some("ROMN")
    } else if token.chars().next().is_some_and(is_latin_letter)
        && token.chars().all(|c| is_latin_letter(c) || c == '-' || c == '\'')
    {
        Some("LATN")
    } else {
        None
    }
}

/// Punctuation, numbers, Roman numerals and Latin-script words.
#[derive(Debug, Default)]
pub struct NonlexicalUnit;

impl Unit for NonlexicalUnit {
    fn id(&self) -> &str {
        "nonlexical"
    }

    fn terminal(&self) -> bool {
        true
    }

    fn lexical(&self) -> bool {
        false
    }

    fn parse(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse> {
        let Some(class) = classify_nonlexical(token.original) else {
            return Vec::new();
        };
        let Some(tag) = tag_of(cx.registry(), class) else {
            return Vec::new();
        };
        let state = UnitState::Nonlexical {
            word: token.lower.clone(),
            tag: class.to_string(),
        };
        vec![Parse {
            word: token.lower.clone(),
            tag,
            normal_form: token.lower.clone(),
            score: 1.0,
            trace: vec![step(self, state)],
        }]
    }

    fn lexeme(&self, cx: &Context<'_>, state: &UnitState, _: Option<Vec<LexemeForm>>) -> Result<Vec<LexemeForm>, AnalyzerError> {
        match state {
            UnitState::Nonlexical { word, tag } => {
                let tag = tag_of(cx.registry(), tag).ok_or_else(|| foreign(self, state))?;
                Ok(vec![LexemeForm {
                    word: word.clone(),
                    tag,
                    trace: vec![step(self, state.clone())],
                }])
            }
            _ => Err(foreign(self, state)),
        }
    }
}

// ---------------------------------------------------------------------------

/// Vocabulary lookup.
#[derive(Debug, Default)]
pub struct DictionaryUnit;

impl Unit for DictionaryUnit {
    fn id(&self) -> &str {
        "dictionary"
    }

    fn terminal(&self) -> bool {
        true
    }

    fn parse(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse> {
        let dict = cx.dictionary();
        dict.lookup(&token.lower)
            .into_iter()
            .filter_map(|a| {
                let normal_form = dict.normal_form(&a.matched_word, a.paradigm_id, a.form_index).ok()?;
                let state = UnitState::Dictionary {
                    word: a.matched_word.clone(),
                    paradigm_id: a.paradigm_id,
                    form_index: a.form_index,
                };
                Some(Parse {
                    word: a.matched_word,
                    tag: a.tag,
                    normal_form,
                    score: 1.0,
                    trace: vec![step(self, state)],
                })
            })
            .collect()
    }

    fn lexeme(&self, cx: &Context<'_>, state: &UnitState, _: Option<Vec<LexemeForm>>) -> Result<Vec<LexemeForm>, AnalyzerError> {
        let UnitState::Dictionary {
            word,
            paradigm_id,
            form_index,
        } = state
        else {
            return Err(foreign(self, state));
        };
        let forms = cx.dictionary().build_lexeme(word, *paradigm_id, *form_index)?;
        Ok(forms
            .into_iter()
            .enumerate()
            .map(|(k, (w, tag))| {
                let state = UnitState::Dictionary {
                    word: w.clone(),
                    paradigm_id: *paradigm_id,
                    form_index: k as u16,
                };
                LexemeForm {
                    word: w,
                    tag,
                    trace: vec![step(self, state)],
                }
            })
            .collect())
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialsGroup {
    MascName,
    FemnName,
    Patronymic,
}

impl InitialsGroup {
    pub const ALL: [InitialsGroup; 3] = [
        InitialsGroup::MascName,
        InitialsGroup::FemnName,
        InitialsGroup::Patronymic,
    ];

    fn tags(self, registry: &GrammemeRegistry) -> Vec<Tag> {
        let genders: &[&str] = match self {
            InitialsGroup::MascName => &["masc"],
            InitialsGroup::FemnName => &["femn"],
            InitialsGroup::Patronymic => &["masc", "femn"],
        };
        let kind = if self == InitialsGroup::Patronymic { "Patr" } else { "Name" };
        let mut out = Vec::new();
        for gender in genders {
            for case in registry.children_of("CAse") {
                let names = ["NOUN", "anim", gender, kind, "Fixd", "Abbr", "Init", "sing", case];
                if names.iter().all(|g| registry.get(g).is_some()) {
                    if let Ok(tag) = registry.make_tag(&names) {
                        out.push(tag);
                    }
                }
            }
        }
        out
    }
}

/// A single uppercase letter read as an abbreviated first name or
/// patronymic. Case-sensitive: works on the original spelling.
#[derive(Debug, Default)]
pub struct InitialsUnit;

impl Unit for InitialsUnit {
    fn id(&self) -> &str {
        "initials"
    }

    fn lexical(&self) -> bool {
        false
    }

    fn parse(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse> {
        let mut chars = token.original.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Vec::new();
        };
        if !cx.dictionary().language().is_uppercase_letter(c) {
            return Vec::new();
        }
        let letter = token.lower.clone();
        let mut out = Vec::new();
        for group in InitialsGroup::ALL {
            for (k, tag) in group.tags(cx.registry()).into_iter().enumerate() {
                let state = UnitState::Initials {
                    letter: letter.clone(),
                    group,
                    form_index: k as u16,
                };
                out.push(Parse {
                    word: letter.clone(),
                    tag,
                    normal_form: letter.clone(),
                    score: 1.0,
                    trace: vec![step(self, state)],
                });
            }
        }
        out
    }

    fn lexeme(&self, cx: &Context<'_>, state: &UnitState, _: Option<Vec<LexemeForm>>) -> Result<Vec<LexemeForm>, AnalyzerError> {
        let UnitState::Initials { letter, group, .. } = state else {
            return Err(foreign(self, state));
        };
        Ok(group
            .tags(cx.registry())
            .into_iter()
            .enumerate()
            .map(|(k, tag)| LexemeForm {
                word: letter.clone(),
                tag,
                trace: vec![step(
                    self,
                    UnitState::Initials {
                        letter: letter.clone(),
                        group: *group,
                        form_index: k as u16,
                    },
                )],
            })
            .collect())
    }
}

// ---------------------------------------------------------------------------

/// Prefixes that attach to open-class words without changing their grammar:
/// strip, analyze the rest, re-attach.
#[derive(Debug)]
pub struct KnownPrefixUnit {
    prefixes: Dafsa,
    /// Shortest remainder worth analyzing, in characters.
    pub min_remainder: usize,
}

impl KnownPrefixUnit {
    pub fn new<S: AsRef<str>>(prefixes: &[S]) -> Self {
        let mut keys: Vec<&[u8]> = prefixes
            .iter()
            .map(|p| p.as_ref().as_bytes())
            .filter(|p| !p.is_empty())
            .collect();
        keys.sort();
        keys.dedup();
        KnownPrefixUnit {
            prefixes: Dafsa::build_from_sorted(keys).expect("sorted and deduplicated"),
            min_remainder: 3,
        }
    }
}

impl Unit for KnownPrefixUnit {
    fn id(&self) -> &str {
        "known_prefix"
    }

    fn parse(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse> {
        let word = &token.lower;
        let mut out = Vec::new();
        for len in self.prefixes.prefix_lengths(word.as_bytes()) {
            let (prefix, rest) = word.split_at(len);
            if rest.chars().count() < self.min_remainder {
                continue;
            }
            for sub in cx.analyze_sub(self.id(), rest) {
                if !cx.registry().is_open_class(&sub.tag) {
                    continue;
                }
                let state = UnitState::KnownPrefix { prefix: prefix.to_string() };
                let (w, n, s) = (format!("{prefix}{}", sub.word), format!("{prefix}{}", sub.normal_form), sub.score);
                out.push(wrap(self, sub, w, n, s, state));
            }
        }
        out
    }

    fn lexeme(&self, _: &Context<'_>, state: &UnitState, inner: Option<Vec<LexemeForm>>) -> Result<Vec<LexemeForm>, AnalyzerError> {
        let UnitState::KnownPrefix { prefix } = state else {
            return Err(foreign(self, state));
        };
        let inner = need_inner(self, state, inner)?;
        Ok(wrap_forms(self, inner, state, |w| format!("{prefix}{w}")))
    }
}

// ---------------------------------------------------------------------------

/// A short unknown prefix, letters only, in front of a vocabulary word.
#[derive(Debug)]
pub struct UnknownPrefixUnit {
    pub max_prefix_length: usize,
    /// The remainder must be strictly longer than this, in characters.
    pub min_remainder_exclusive: usize,
    pub penalty: f64,
}

impl Default for UnknownPrefixUnit {
    fn default() -> Self {
        UnknownPrefixUnit {
            max_prefix_length: 5,
            min_remainder_exclusive: 3,
            penalty: 0.5,
        }
    }
}

impl Unit for UnknownPrefixUnit {
    fn id(&self) -> &str {
        "unknown_prefix"
    }

    fn parse(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse> {
        let dict = cx.dictionary();
        let chars: Vec<(usize, char)> = token.lower.char_indices().collect();
        let n = chars.len();
        let mut out = Vec::new();
        for len in 1..=self.max_prefix_length.min(n.saturating_sub(1)) {
            if n - len <= self.min_remainder_exclusive {
                continue;
            }
            let (prefix, rest) = token.lower.split_at(chars[len].0);
            if !prefix.chars().all(char::is_alphabetic) {
                break;
            }
            for a in dict.lookup(rest) {
                if !cx.registry().is_open_class(&a.tag) {
                    continue;
                }
                let Ok(normal) = dict.normal_form(&a.matched_word, a.paradigm_id, a.form_index) else {
                    continue;
                };
                let state = UnitState::UnknownPrefix {
                    prefix: prefix.to_string(),
                    word: a.matched_word.clone(),
                    paradigm_id: a.paradigm_id,
                    form_index: a.form_index,
                };
                out.push(Parse {
                    word: format!("{prefix}{}", a.matched_word),
                    tag: a.tag,
                    normal_form: format!("{prefix}{normal}"),
                    score: self.penalty,
                    trace: vec![step(self, state)],
                });
            }
        }
        out
    }

    fn lexeme(&self, cx: &Context<'_>, state: &UnitState, _: Option<Vec<LexemeForm>>) -> Result<Vec<LexemeForm>, AnalyzerError> {
        let UnitState::UnknownPrefix {
            prefix,
            word,
            paradigm_id,
            form_index,
        } = state
        else {
            return Err(foreign(self, state));
        };
        let forms = cx.dictionary().build_lexeme(word, *paradigm_id, *form_index)?;
        Ok(forms
            .into_iter()
            .enumerate()
            .map(|(k, (w, tag))| {
                let state = UnitState::UnknownPrefix {
                    prefix: prefix.clone(),
                    word: w.clone(),
                    paradigm_id: *paradigm_id,
                    form_index: k as u16,
                };
                LexemeForm {
                    word: format!("{prefix}{w}"),
                    tag,
                    trace: vec![step(self, state)],
                }
            })
            .collect())
    }
}

// ---------------------------------------------------------------------------

/// A hyphenated particle after a word: strip, analyze, re-attach.
#[derive(Debug)]
pub struct HyphenParticleUnit {
    /// Longest first.
    particles: Vec<String>,
    pub penalty: f64,
}

impl HyphenParticleUnit {
    pub fn new<S: AsRef<str>>(particles: &[S]) -> Self {
        let mut particles: Vec<String> = particles.iter().map(|p| p.as_ref().to_string()).collect();
        particles.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
        particles.dedup();
        HyphenParticleUnit {
            particles,
            penalty: 0.9,
        }
    }
}

impl Unit for HyphenParticleUnit {
    fn id(&self) -> &str {
        "hyphen_particle"
    }

    fn parse(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse> {
        let word = &token.lower;
        let Some(particle) = self
            .particles
            .iter()
            .find(|p| word.len() > p.len() && word.ends_with(p.as_str()))
        else {
            return Vec::new();
        };
        let rest = &word[..word.len() - particle.len()];
        cx.analyze_sub(self.id(), rest)
            .into_iter()
            .map(|sub| {
                let state = UnitState::HyphenParticle {
                    particle: particle.clone(),
                };
                let (w, n, s) = (
                    format!("{}{particle}", sub.word),
                    format!("{}{particle}", sub.normal_form),
                    sub.score * self.penalty,
                );
                wrap(self, sub, w, n, s, state)
            })
            .collect()
    }

    fn lexeme(&self, _: &Context<'_>, state: &UnitState, inner: Option<Vec<LexemeForm>>) -> Result<Vec<LexemeForm>, AnalyzerError> {
        let UnitState::HyphenParticle { particle } = state else {
            return Err(foreign(self, state));
        };
        let inner = need_inner(self, state, inner)?;
        Ok(wrap_forms(self, inner, state, |w| format!("{w}{particle}")))
    }
}

// ---------------------------------------------------------------------------

/// `по-` followed by a full adjective in the singular dative is an adverb.
#[derive(Debug)]
pub struct HyphenAdverbUnit {
    pub prefix: String,
    /// The whole token must be strictly longer than this, in characters.
    pub min_length_exclusive: usize,
}

impl HyphenAdverbUnit {
    pub fn new(prefix: &str) -> Self {
        HyphenAdverbUnit {
            prefix: prefix.to_string(),
            min_length_exclusive: 5,
        }
    }
}

impl Unit for HyphenAdverbUnit {
    fn id(&self) -> &str {
        "hyphen_adverb"
    }

    fn parse(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse> {
        let word = &token.lower;
        let Some(rest) = word.strip_prefix(self.prefix.as_str()) else {
            return Vec::new();
        };
        if word.chars().count() <= self.min_length_exclusive {
            return Vec::new();
        }
        let is_adjective = cx
            .analyze_sub(self.id(), rest)
            .iter()
            .any(|p| p.tag.contains_all(["ADJF", "sing", "datv"]));
        let Some(tag) = tag_of(cx.registry(), "ADVB").filter(|_| is_adjective) else {
            return Vec::new();
        };
        vec![Parse {
            word: word.clone(),
            tag,
            normal_form: word.clone(),
            score: 1.0,
            trace: vec![step(self, UnitState::HyphenAdverb { word: word.clone() })],
        }]
    }

    fn lexeme(&self, cx: &Context<'_>, state: &UnitState, _: Option<Vec<LexemeForm>>) -> Result<Vec<LexemeForm>, AnalyzerError> {
        let UnitState::HyphenAdverb { word } = state else {
            return Err(foreign(self, state));
        };
        let tag = tag_of(cx.registry(), "ADVB").ok_or_else(|| foreign(self, state))?;
        Ok(vec![LexemeForm {
            word: word.clone(),
            tag,
            trace: vec![step(self, state.clone())],
        }])
    }
}

// ---------------------------------------------------------------------------

/// Words with a single hyphen whose halves are analyzed separately.
///
/// Every compatible (left, right) pair yields a parse whose lexeme inflects
/// both halves in step; every right parse also yields one whose left half
/// stays as written.
#[derive(Debug)]
pub struct HyphenCompoundUnit {
    /// Right halves that are particles are left to the particle unit.
    particles: Vec<String>,
}

impl HyphenCompoundUnit {
    pub fn new<S: AsRef<str>>(particles: &[S]) -> Self {
        HyphenCompoundUnit {
            particles: particles.iter().map(|p| p.as_ref().to_string()).collect(),
        }
    }
}

fn own_index(lexeme: &[LexemeForm], parse: &Parse) -> usize {
    lexeme
        .iter()
        .position(|f| f.word == parse.word && f.tag == parse.tag)
        .unwrap_or(0)
}

/// For every right form, the left form it pairs with: the original left form
/// at the anchor, elsewhere the first compatible left form, falling back to
/// the original one.
fn align_compound(
    registry: &GrammemeRegistry,
    left: &[LexemeForm],
    left_index: usize,
    right: &[LexemeForm],
    anchor: usize,
) -> Vec<String> {
    right
        .iter()
        .enumerate()
        .map(|(k, rf)| {
            let lf = if k == anchor {
                &left[left_index]
            } else {
                left.iter()
                    .find(|lf| registry.compatible(&lf.tag, &rf.tag))
                    .unwrap_or(&left[left_index])
            };
            format!("{}-{}", lf.word, rf.word)
        })
        .collect()
}

impl Unit for HyphenCompoundUnit {
    fn id(&self) -> &str {
        "hyphen_compound"
    }

    fn parse(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse> {
        let word = &token.lower;
        let Some((left, right)) = word.split_once('-') else {
            return Vec::new();
        };
        if left.is_empty() || right.is_empty() || right.contains('-') {
            return Vec::new();
        }
        if self.particles.iter().any(|p| p.strip_prefix('-') == Some(right)) {
            return Vec::new();
        }
        let registry = cx.registry();
        let rights: Vec<(Parse, Vec<LexemeForm>)> = cx
            .analyze_sub(self.id(), right)
            .into_iter()
            .filter_map(|r| {
                let lexeme = cx.get_lexeme(&r).ok()?;
                Some((r, lexeme))
            })
            .collect();
        if rights.is_empty() {
            return Vec::new();
        }
        let lefts: Vec<(Parse, Vec<LexemeForm>)> = cx
            .analyze_sub(self.id(), left)
            .into_iter()
            .filter_map(|l| {
                let lexeme = cx.get_lexeme(&l).ok()?;
                Some((l, lexeme))
            })
            .collect();

        let mut out = Vec::new();
        for (l, l_lexeme) in &lefts {
            let left_index = own_index(l_lexeme, l);
            for (r, r_lexeme) in &rights {
                if !registry.compatible(&l.tag, &r.tag) {
                    continue;
                }
                let anchor = own_index(r_lexeme, r);
                let words = align_compound(registry, l_lexeme, left_index, r_lexeme, anchor);
                let state = UnitState::HyphenCompound {
                    left_word: left.to_string(),
                    left: Some(Box::new(l.clone())),
                    anchor: anchor as u16,
                };
                out.push(wrap(
                    self,
                    r.clone(),
                    format!("{}-{}", l.word, r.word),
                    words[0].clone(),
                    l.score * r.score,
                    state,
                ));
            }
        }
        for (r, r_lexeme) in rights {
            let state = UnitState::HyphenCompound {
                left_word: left.to_string(),
                left: None,
                anchor: own_index(&r_lexeme, &r) as u16,
            };
            let (w, n, s) = (format!("{left}-{}", r.word), format!("{left}-{}", r_lexeme[0].word), r.score);
            out.push(wrap(self, r, w, n, s, state));
        }
        out
    }

    fn lexeme(&self, cx: &Context<'_>, state: &UnitState, inner: Option<Vec<LexemeForm>>) -> Result<Vec<LexemeForm>, AnalyzerError> {
        let UnitState::HyphenCompound {
            left_word,
            left,
            anchor,
        } = state
        else {
            return Err(foreign(self, state));
        };
        let right = need_inner(self, state, inner)?;
        let words = match left {
            None => right.iter().map(|f| format!("{left_word}-{}", f.word)).collect(),
            Some(left) => {
                let l_lexeme = cx.get_lexeme(left)?;
                let left_index = own_index(&l_lexeme, left);
                align_compound(cx.registry(), &l_lexeme, left_index, &right, *anchor as usize)
            }
        };
        Ok(right
            .into_iter()
            .zip(words)
            .map(|(mut f, w)| {
                f.word = w;
                f.trace.push(step(self, state.clone()));
                f
            })
            .collect())
    }
}

// ---------------------------------------------------------------------------

/// Guessing from word endings against the per-prefix prediction tables.
#[derive(Debug)]
pub struct EndingsUnit {
    pub max_ending_length: usize,
}

impl Default for EndingsUnit {
    fn default() -> Self {
        EndingsUnit { max_ending_length: 5 }
    }
}

impl Unit for EndingsUnit {
    fn id(&self) -> &str {
        "endings"
    }

    fn terminal(&self) -> bool {
        true
    }

    fn parse(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse> {
        let dict = cx.dictionary();
        let word = &token.lower;
        // Hyphenated tokens belong to the hyphen units, which guess each
        // half separately.
        if word.contains('-') {
            return Vec::new();
        }
        let starts: Vec<usize> = word.char_indices().map(|(i, _)| i).collect();
        let mut found = Vec::new();
        for (prefix_id, prefix) in dict.tables().prefixes.iter().enumerate() {
            if !word.starts_with(prefix.as_str()) {
                continue;
            }
            let available = word[prefix.len()..].chars().count();
            for len in (1..=self.max_ending_length.min(available)).rev() {
                let at = starts[starts.len() - len];
                let ending = &word[at..];
                let records = dict.predict(prefix_id, ending);
                if records.is_empty() {
                    continue;
                }
                for (matched, record) in records {
                    let synthetic = format!("{}{matched}", &word[..at]);
                    let Ok(lexeme) = dict.build_lexeme(&synthetic, record.paradigm_id, record.form_index) else {
                        continue;
                    };
                    let normal_form = lexeme[0].0.clone();
                    // Every form of the guessed lexeme spelled like the token is
                    // a reading, not only the form the record was counted for.
                    for (k, (form, tag)) in lexeme.into_iter().enumerate() {
                        if form != synthetic {
                            continue;
                        }
                        let state = UnitState::Endings {
                            word: synthetic.clone(),
                            prefix_id: prefix_id as u16,
                            ending: matched.clone(),
                            frequency: record.frequency,
                            paradigm_id: record.paradigm_id,
                            form_index: k as u16,
                        };
                        found.push((
                            record.frequency,
                            Parse {
                                word: synthetic.clone(),
                                tag,
                                normal_form: normal_form.clone(),
                                score: 0.0,
                                trace: vec![step(self, state)],
                            },
                        ));
                    }
                }
                break;
            }
        }
        let total: f64 = found.iter().map(|(f, _)| *f as f64).sum();
        found.sort_by(|a, b| b.0.cmp(&a.0));
        found
            .into_iter()
            .map(|(freq, mut p)| {
                p.score = freq as f64 / total;
                p
            })
            .collect()
    }

    fn lexeme(&self, cx: &Context<'_>, state: &UnitState, _: Option<Vec<LexemeForm>>) -> Result<Vec<LexemeForm>, AnalyzerError> {
        let UnitState::Endings {
            word,
            prefix_id,
            ending,
            frequency,
            paradigm_id,
            form_index,
        } = state
        else {
            return Err(foreign(self, state));
        };
        let forms = cx.dictionary().build_lexeme(word, *paradigm_id, *form_index)?;
        Ok(forms
            .into_iter()
            .enumerate()
            .map(|(k, (w, tag))| {
                let state = UnitState::Endings {
                    word: w.clone(),
                    prefix_id: *prefix_id,
                    ending: ending.clone(),
                    frequency: *frequency,
                    paradigm_id: *paradigm_id,
                    form_index: k as u16,
                };
                LexemeForm {
                    word: w,
                    tag,
                    trace: vec![step(self, state)],
                }
            })
            .collect())
    }
}

// ---------------------------------------------------------------------------

/// Last resort: anything else is `UNKN`.
#[derive(Debug, Default)]
pub struct UnknownUnit;

impl Unit for UnknownUnit {
    fn id(&self) -> &str {
        "unknown"
    }

    fn lexical(&self) -> bool {
        false
    }

    fn fallback(&self) -> bool {
        true
    }

    fn parse(&self, cx: &Context<'_>, token: &Token<'_>) -> Vec<Parse> {
        let Some(tag) = tag_of(cx.registry(), "UNKN") else {
            return Vec::new();
        };
        vec![Parse {
            word: token.lower.clone(),
            tag,
            normal_form: token.lower.clone(),
            score: 1.0,
            trace: vec![step(
                self,
                UnitState::Unknown {
                    word: token.lower.clone(),
                },
            )],
        }]
    }

    fn lexeme(&self, cx: &Context<'_>, state: &UnitState, _: Option<Vec<LexemeForm>>) -> Result<Vec<LexemeForm>, AnalyzerError> {
        let UnitState::Unknown { word } = state else {
            return Err(foreign(self, state));
        };
        let tag = tag_of(cx.registry(), "UNKN").ok_or_else(|| foreign(self, state))?;
        Ok(vec![LexemeForm {
            word: word.clone(),
            tag,
            trace: vec![step(self, state.clone())],
        }])
    }
}

/// nonlexical, dictionary, initials, known prefix, unknown prefix, hyphen
/// particle, hyphen adverb (when the language has one), hyphen compound,
/// endings, unknown.
pub fn default_units(language: &LanguageData) -> Vec<Box<dyn Unit>> {
    let mut units: Vec<Box<dyn Unit>> = vec![
        Box::new(NonlexicalUnit),
        Box::new(DictionaryUnit),
        Box::new(InitialsUnit),
        Box::new(KnownPrefixUnit::new(&language.known_prefixes)),
        Box::new(UnknownPrefixUnit::default()),
        Box::new(HyphenParticleUnit::new(&language.particles)),
    ];
    if let Some(prefix) = &language.hyphen_adverb_prefix {
        units.push(Box::new(HyphenAdverbUnit::new(prefix)));
    }
    units.push(Box::new(HyphenCompoundUnit::new(&language.particles)));
    units.push(Box::new(EndingsUnit::default()));
    units.push(Box::new(UnknownUnit));
    units
}
