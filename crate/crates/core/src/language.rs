//! Per-language data consumed by the compiler and the analyzer units.

use serde::{Deserialize, Serialize};

use crate::automaton::{SubstitutionError, SubstitutionMap};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageData {
    pub name: String,
    /// Prefixes allowed to vary between forms of one paradigm. Always
    /// contains `""` at index 0.
    pub paradigm_prefixes: Vec<String>,
    /// Prefixes that attach to open-class words without changing their grammar.
    pub known_prefixes: Vec<String>,
    /// Hyphen-separated particles, written with the leading hyphen.
    pub particles: Vec<String>,
    /// Uppercase letters recognized as initials.
    pub uppercase_letters: String,
    /// Optional-letter substitutions applied to input text, `(written, dictionary)`.
    pub substitutions: Vec<(String, String)>,
    /// Prefix of hyphenated adverbs, `"по-"` for Russian.
    pub hyphen_adverb_prefix: Option<String>,
}

const RUSSIAN_KNOWN_PREFIXES: &[&str] = &[
    "авиа", "авто", "агро", "анти", "архи", "аудио", "быстро", "вело", "видео", "гео",
    "гидро", "гипер", "дву", "евро", "зоо", "инфра", "квази", "кибер", "контр", "космо",
    "макро", "микро", "мини", "мото", "мульти", "нано", "не", "нео", "пара",
    "пост", "пред", "прото", "псевдо", "радио", "само", "сверх", "спец", "стерео", "супер",
    "теле", "турбо", "ультра", "фото", "экзо", "экс", "экстра", "эко", "электро",
];

const UKRAINIAN_KNOWN_PREFIXES: &[&str] = &[
    "авіа", "авто", "анти", "архі", "аудіо", "не", "псевдо", "квазі", "контр", "мега",
    "мікро", "міні", "мульти", "нано", "супер", "теле", "ультра", "фото", "екс", "електро",
];

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl LanguageData {
    pub fn russian() -> Self {
        LanguageData {
            name: "ru".into(),
            paradigm_prefixes: strings(&["", "по", "наи"]),
            known_prefixes: strings(RUSSIAN_KNOWN_PREFIXES),
            particles: strings(&["-то", "-ка", "-таки", "-де", "-тко", "-тка", "-с", "-ста"]),
            uppercase_letters: "АБВГДЕЁЖЗИЙКЛМНОПРСТУФХЦЧШЩЭЮЯ".into(),
            substitutions: vec![("е".into(), "ё".into())],
            hyphen_adverb_prefix: Some("по-".into()),
        }
    }

    pub fn ukrainian() -> Self {
        LanguageData {
            name: "uk".into(),
            paradigm_prefixes: strings(&["", "най", "якнай", "щонай"]),
            known_prefixes: strings(UKRAINIAN_KNOWN_PREFIXES),
            particles: strings(&["-но", "-таки", "-бо", "-от"]),
            uppercase_letters: "АБВГҐДЕЄЖЗИІЇЙКЛМНОПРСТУФХЦЧШЩЬЮЯ".into(),
            substitutions: vec![("г".into(), "ґ".into())],
            hyphen_adverb_prefix: None,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "ru" => Some(Self::russian()),
            "uk" => Some(Self::ukrainian()),
            _ => None,
        }
    }

    pub fn substitution_map(&self) -> Result<SubstitutionMap, SubstitutionError> {
        SubstitutionMap::from_pairs(
            self.substitutions
                .iter()
                .map(|(a, b)| (a.as_str(), b.as_str())),
        )
    }

    pub fn is_uppercase_letter(&self, c: char) -> bool {
        self.uppercase_letters.contains(c)
    }
}
