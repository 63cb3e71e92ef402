//! Grammemes, tags and the registry that gives them categories.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Exclusive grammatical category a grammeme belongs to. A tag holds at most
/// one grammeme per role other than [`Role::Other`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Other = 0,
    Pos = 1,
    Case = 2,
    Number = 3,
    Gender = 4,
}

impl Role {
    fn from_u8(v: u8) -> Option<Role> {
        Some(match v {
            0 => Role::Other,
            1 => Role::Pos,
            2 => Role::Case,
            3 => Role::Number,
            4 => Role::Gender,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::Other => "other",
            Role::Pos => "part of speech",
            Role::Case => "case",
            Role::Number => "number",
            Role::Gender => "gender",
        }
    }
}

const OPEN_CLASS_FLAG: u8 = 0x08;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammeme {
    pub name: String,
    pub parent: Option<String>,
    pub role: Role,
    pub open_class: bool,
}

impl Grammeme {
    /// Packed category flags as stored in the grammeme table.
    pub fn flags(&self) -> u8 {
        self.role as u8 | if self.open_class { OPEN_CLASS_FLAG } else { 0 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TagError {
    #[error("empty tag")]
    Empty,
    #[error("unknown grammeme {0:?}")]
    Unknown(String),
    #[error("tag has two {} grammemes: {first} and {second}", category.name())]
    Conflict {
        category: Role,
        first: String,
        second: String,
    },
    #[error("grammeme {name:?} has a cyclic parent chain")]
    CyclicParent { name: String },
    #[error("grammeme {0:?} is declared twice")]
    Duplicate(String),
    #[error("bad grammeme flags {flags:#x} for {name:?}")]
    BadFlags { name: String, flags: u8 },
}

/// A grammatical tag: an ordered set of grammemes, at most one per
/// exclusive category.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag {
    grammemes: Vec<String>,
    pos: Option<usize>,
}

impl Tag {
    pub fn pos(&self) -> Option<&str> {
        self.pos.map(|i| self.grammemes[i].as_str())
    }

    pub fn grammemes(&self) -> &[String] {
        &self.grammemes
    }

    pub fn contains(&self, grammeme: &str) -> bool {
        self.grammemes.iter().any(|g| g == grammeme)
    }

    pub fn contains_all<'a, I>(&self, required: I) -> bool
    where
        I: IntoIterator<Item = &'a str>,
    {
        required.into_iter().all(|g| self.contains(g))
    }

    /// Order-insensitive identity, used to match tags written in a different
    /// grammeme order.
    pub fn set_key(&self) -> String {
        let set: BTreeSet<&str> = self.grammemes.iter().map(String::as_str).collect();
        set.into_iter().collect::<Vec<_>>().join(",")
    }
}

impl serde::Serialize for Tag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.grammemes.join(","))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GrammemeRegistry {
    grammemes: Vec<Grammeme>,
    index: HashMap<String, usize>,
}

/// Category roots whose descendants are mutually exclusive within a tag.
const CATEGORY_ROOTS: [(&str, Role); 3] = [
    ("CAse", Role::Case),
    ("NMbr", Role::Number),
    ("GNdr", Role::Gender),
];

// (name, parent) in OpenCorpora conventions, plus the non-lexical classes
// (LATN, PNCT, NUMB, ROMN, UNKN) the analyzer emits.
const RUSSIAN_GRAMMEMES: &[(&str, &str)] = &[
    ("POST", ""),
    ("NOUN", "POST"),
    ("ADJF", "POST"),
    ("ADJS", "POST"),
    ("COMP", "POST"),
    ("VERB", "POST"),
    ("INFN", "POST"),
    ("PRTF", "POST"),
    ("PRTS", "POST"),
    ("GRND", "POST"),
    ("NUMR", "POST"),
    ("ADVB", "POST"),
    ("NPRO", "POST"),
    ("PRED", "POST"),
    ("PREP", "POST"),
    ("CONJ", "POST"),
    ("PRCL", "POST"),
    ("INTJ", "POST"),
    ("LATN", "POST"),
    ("PNCT", "POST"),
    ("NUMB", "POST"),
    ("ROMN", "POST"),
    ("UNKN", "POST"),
    ("intg", ""),
    ("real", ""),
    ("ANim", ""),
    ("anim", "ANim"),
    ("inan", "ANim"),
    ("GNdr", ""),
    ("masc", "GNdr"),
    ("femn", "GNdr"),
    ("neut", "GNdr"),
    ("ms-f", "GNdr"),
    ("NMbr", ""),
    ("sing", "NMbr"),
    ("plur", "NMbr"),
    ("Sgtm", ""),
    ("Pltm", ""),
    ("Fixd", ""),
    ("CAse", ""),
    ("nomn", "CAse"),
    ("gent", "CAse"),
    ("datv", "CAse"),
    ("accs", "CAse"),
    ("ablt", "CAse"),
    ("loct", "CAse"),
    ("voct", "nomn"),
    ("gen1", "gent"),
    ("gen2", "gent"),
    ("acc2", "accs"),
    ("loc1", "loct"),
    ("loc2", "loct"),
    ("Abbr", ""),
    ("Name", ""),
    ("Surn", ""),
    ("Patr", ""),
    ("Geox", ""),
    ("Orgn", ""),
    ("Trad", ""),
    ("Subx", ""),
    ("Supr", ""),
    ("Qual", ""),
    ("Apro", ""),
    ("Anum", ""),
    ("Poss", ""),
    ("V-ey", ""),
    ("V-oy", ""),
    ("Cmp2", ""),
    ("V-ej", ""),
    ("ASpc", ""),
    ("perf", "ASpc"),
    ("impf", "ASpc"),
    ("TRns", ""),
    ("tran", "TRns"),
    ("intr", "TRns"),
    ("Impe", ""),
    ("Impx", ""),
    ("Mult", ""),
    ("Refl", ""),
    ("PErs", ""),
    ("1per", "PErs"),
    ("2per", "PErs"),
    ("3per", "PErs"),
    ("TEns", ""),
    ("pres", "TEns"),
    ("past", "TEns"),
    ("futr", "TEns"),
    ("MOod", ""),
    ("indc", "MOod"),
    ("impr", "MOod"),
    ("INvl", ""),
    ("incl", "INvl"),
    ("excl", "INvl"),
    ("VOic", ""),
    ("actv", "VOic"),
    ("pssv", "VOic"),
    ("Infr", ""),
    ("Slng", ""),
    ("Arch", ""),
    ("Litr", ""),
    ("Erro", ""),
    ("Dist", ""),
    ("Ques", ""),
    ("Dmns", ""),
    ("Prnt", ""),
    ("V-be", ""),
    ("V-en", ""),
    ("V-ie", ""),
    ("V-bi", ""),
    ("Fimp", ""),
    ("Prdx", ""),
    ("Coun", ""),
    ("Coll", ""),
    ("V-sh", ""),
    ("Af-p", ""),
    ("Inmx", ""),
    ("Vpre", ""),
    ("Anph", ""),
    ("Init", ""),
    ("Adjx", ""),
    ("Ms-f", ""),
    ("Hypo", ""),
];

/// Noun, verb, adjective, participle and gerund, in both the full and the
/// short/infinitive variants the tagset distinguishes.
pub const DEFAULT_OPEN_CLASSES: &[&str] =
    &["NOUN", "VERB", "INFN", "ADJF", "ADJS", "PRTF", "PRTS", "GRND"];

impl GrammemeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The OpenCorpora-style grammeme table shared by the Russian and
    /// Ukrainian configurations.
    pub fn opencorpora() -> Self {
        let mut reg = GrammemeRegistry::new();
        for &(name, parent) in RUSSIAN_GRAMMEMES {
            reg.register(name, (!parent.is_empty()).then_some(parent))
                .expect("builtin table is acyclic");
        }
        reg.set_open_classes(DEFAULT_OPEN_CLASSES.iter().copied());
        reg
    }

    pub fn len(&self) -> usize {
        self.grammemes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grammemes.is_empty()
    }

    pub fn grammemes(&self) -> &[Grammeme] {
        &self.grammemes
    }

    pub fn get(&self, name: &str) -> Option<&Grammeme> {
        self.index.get(name).map(|&i| &self.grammemes[i])
    }

    pub fn role(&self, name: &str) -> Role {
        self.get(name).map_or(Role::Other, |g| g.role)
    }

    /// Registers a grammeme, deriving its role from the parent chain. An
    /// already known grammeme keeps its entry unless `parent` differs, in which
    /// case the parent (and role) are updated.
    pub fn register(&mut self, name: &str, parent: Option<&str>) -> Result<(), TagError> {
        if let Some(parent) = parent {
            if parent == name {
                return Err(TagError::CyclicParent { name: name.into() });
            }
            if self.get(parent).is_none() {
                self.register(parent, None)?;
            }
            if self.ancestors(parent).any(|a| a == name) {
                return Err(TagError::CyclicParent { name: name.into() });
            }
        }
        let role = self.derive_role(parent);
        match self.index.get(name) {
            Some(&i) => {
                let g = &mut self.grammemes[i];
                if g.parent.as_deref() != parent {
                    g.parent = parent.map(str::to_string);
                    g.role = role;
                }
            }
            None => {
                self.index.insert(name.to_string(), self.grammemes.len());
                self.grammemes.push(Grammeme {
                    name: name.to_string(),
                    parent: parent.map(str::to_string),
                    role,
                    open_class: false,
                });
            }
        }
        Ok(())
    }

    /// Inserts a grammeme with explicit flags, as read from a stored table.
    pub fn insert_raw(&mut self, name: &str, parent: Option<&str>, flags: u8) -> Result<(), TagError> {
        let role = Role::from_u8(flags & 0x07).ok_or_else(|| TagError::BadFlags {
            name: name.into(),
            flags,
        })?;
        if flags & !(0x07 | OPEN_CLASS_FLAG) != 0 {
            return Err(TagError::BadFlags {
                name: name.into(),
                flags,
            });
        }
        if let Some(p) = parent {
            if self.get(p).is_none() {
                return Err(TagError::Unknown(p.into()));
            }
        }
        if self.index.contains_key(name) {
            return Err(TagError::Duplicate(name.into()));
        }
        self.index.insert(name.to_string(), self.grammemes.len());
        self.grammemes.push(Grammeme {
            name: name.to_string(),
            parent: parent.map(str::to_string),
            role,
            open_class: flags & OPEN_CLASS_FLAG != 0,
        });
        Ok(())
    }

    fn ancestors<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        let mut current = Some(name);
        std::iter::from_fn(move || {
            let here = current?;
            current = self.get(here).and_then(|g| g.parent.as_deref());
            Some(here)
        })
    }

    fn derive_role(&self, parent: Option<&str>) -> Role {
        let Some(parent) = parent else {
            return Role::Other;
        };
        if parent == "POST" {
            return Role::Pos;
        }
        let root = self.ancestors(parent).last().unwrap_or(parent);
        CATEGORY_ROOTS
            .iter()
            .find(|(r, _)| *r == root)
            .map_or(Role::Other, |&(_, role)| role)
    }

    pub fn set_open_classes<'a, I: IntoIterator<Item = &'a str>>(&mut self, classes: I) {
        let wanted: BTreeSet<&str> = classes.into_iter().collect();
        for g in &mut self.grammemes {
            g.open_class = g.role == Role::Pos && wanted.contains(g.name.as_str());
        }
    }

    pub fn open_classes(&self) -> Vec<&str> {
        self.grammemes
            .iter()
            .filter(|g| g.open_class)
            .map(|g| g.name.as_str())
            .collect()
    }

    pub fn is_open_class(&self, tag: &Tag) -> bool {
        tag.pos()
            .and_then(|p| self.get(p))
            .is_some_and(|g| g.open_class)
    }

    /// Direct members of a category, e.g. the six main cases for `CAse`.
    pub fn children_of(&self, parent: &str) -> Vec<&str> {
        self.grammemes
            .iter()
            .filter(|g| g.parent.as_deref() == Some(parent))
            .map(|g| g.name.as_str())
            .collect()
    }

    /// Parses a tag; every grammeme must already be registered.
    pub fn parse_tag(&self, text: &str) -> Result<Tag, TagError> {
        let names = split_tag(text);
        for name in &names {
            if self.get(name).is_none() {
                return Err(TagError::Unknown(name.to_string()));
            }
        }
        self.make_tag(&names)
    }

    /// Parses a tag, registering unknown grammemes without a parent.
    pub fn parse_tag_ingest(&mut self, text: &str) -> Result<Tag, TagError> {
        let names = split_tag(text);
        for name in &names {
            if self.get(name).is_none() {
                self.register(name, None)?;
            }
        }
        self.make_tag(&names)
    }

    /// Builds a tag from grammeme names, checking category exclusivity.
    pub fn make_tag<S: AsRef<str>>(&self, names: &[S]) -> Result<Tag, TagError> {
        let mut grammemes: Vec<String> = Vec::with_capacity(names.len());
        let mut seen: HashMap<Role, usize> = HashMap::new();
        let mut pos = None;
        for name in names {
            let name = name.as_ref();
            if grammemes.iter().any(|g| g == name) {
                continue;
            }
            let role = self.role(name);
            if role != Role::Other {
                if let Some(&prev) = seen.get(&role) {
                    return Err(TagError::Conflict {
                        category: role,
                        first: grammemes[prev].clone(),
                        second: name.to_string(),
                    });
                }
                seen.insert(role, grammemes.len());
                if role == Role::Pos {
                    pos = Some(grammemes.len());
                }
            }
            grammemes.push(name.to_string());
        }
        if grammemes.is_empty() {
            return Err(TagError::Empty);
        }
        Ok(Tag { grammemes, pos })
    }

    fn value<'t>(&self, tag: &'t Tag, role: Role) -> Option<&'t str> {
        tag.grammemes
            .iter()
            .find(|g| self.role(g) == role)
            .map(String::as_str)
    }

    /// Compatibility of the two halves of a hyphenated compound: same part of
    /// speech, and case and number agree wherever both sides carry them.
    pub fn compatible(&self, left: &Tag, right: &Tag) -> bool {
        self.compatible_on(left, right, &[Role::Case, Role::Number])
    }

    pub fn compatible_on(&self, left: &Tag, right: &Tag, categories: &[Role]) -> bool {
        if left.pos() != right.pos() {
            return false;
        }
        categories.iter().all(|&role| {
            match (self.value(left, role), self.value(right, role)) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            }
        })
    }
}

fn split_tag(text: &str) -> Vec<&str> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}
