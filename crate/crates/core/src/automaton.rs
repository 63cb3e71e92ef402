//! Minimal deterministic acyclic finite-state automaton over byte strings.
//!
//! Keys are built incrementally from strictly sorted input, merging
//! right-language-equivalent states through a registry as soon as a branch
//! can no longer change. Values are attached by storing `key ++ SEP ++ payload`
//! and enumerating the subtree behind the separator.
//!
//! State ids are assigned children-first, so every transition points to a
//! state with a smaller id and the root is always the last state. The
//! serialized form relies on this ordering to reject cyclic input.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

/// Separator between a stored key and its payload.
pub const SEP: u8 = 0x01;

const MAGIC: &[u8; 4] = b"MKDA";
const FORMAT_VERSION: u16 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("key #{index} is not strictly greater than the previous key")]
    Unsorted { index: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("automaton format error at byte {offset}: {reason}")]
pub struct FormatError {
    pub offset: usize,
    pub reason: String,
}

impl FormatError {
    fn new(offset: usize, reason: impl Into<String>) -> Self {
        FormatError {
            offset,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct State {
    is_final: bool,
    transitions: Vec<(u8, u32)>,
}

/// An immutable minimal DAFSA.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dafsa {
    states: Vec<State>,
    root: u32,
}

/// Text-level replacements tried during [`Dafsa::similar_payloads`].
///
/// For Russian the dictionary spells `ё` while input text may write `е`, so the
/// map is `е → ё`: every `е` in a query is tried both as itself and as `ё`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubstitutionMap {
    pairs: BTreeMap<Vec<u8>, Vec<u8>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubstitutionError {
    #[error("substitution strings must be non-empty")]
    Empty,
    #[error("substitution maps {0:?} to itself")]
    Identity(String),
}

impl SubstitutionMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, SubstitutionError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut map = SubstitutionMap::new();
        for (from, to) in pairs {
            map.insert(from.as_ref(), to.as_ref())?;
        }
        Ok(map)
    }

    pub fn insert(&mut self, from: &str, to: &str) -> Result<(), SubstitutionError> {
        if from.is_empty() || to.is_empty() {
            return Err(SubstitutionError::Empty);
        }
        if from == to {
            return Err(SubstitutionError::Identity(from.to_string()));
        }
        self.pairs
            .insert(from.as_bytes().to_vec(), to.as_bytes().to_vec());
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&[u8], &[u8])> {
        self.pairs.iter().map(|(a, b)| (a.as_slice(), b.as_slice()))
    }
}

struct PendingNode {
    is_final: bool,
    transitions: Vec<(u8, u32)>,
    /// Byte of the edge leading to the next pending node on the path.
    open_edge: Option<u8>,
}

impl PendingNode {
    fn new() -> Self {
        PendingNode {
            is_final: false,
            transitions: Vec::new(),
            open_edge: None,
        }
    }
}

/// Incremental builder for sorted input.
pub struct DafsaBuilder {
    states: Vec<State>,
    registry: HashMap<State, u32>,
    path: Vec<PendingNode>,
    previous: Option<Vec<u8>>,
    inserted: usize,
}

impl Default for DafsaBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl DafsaBuilder {
    pub fn new() -> Self {
        DafsaBuilder {
            states: Vec::new(),
            registry: HashMap::new(),
            path: vec![PendingNode::new()],
            previous: None,
            inserted: 0,
        }
    }

    pub fn insert(&mut self, key: &[u8]) -> Result<(), BuildError> {
        let index = self.inserted;
        let common = match &self.previous {
            Some(prev) => {
                if key <= prev.as_slice() {
                    return Err(BuildError::Unsorted { index });
                }
                common_prefix_len(prev, key)
            }
            None => 0,
        };
        self.freeze_down_to(common);
        for &byte in &key[common..] {
            self.path.last_mut().expect("root").open_edge = Some(byte);
            self.path.push(PendingNode::new());
        }
        self.path.last_mut().expect("root").is_final = true;
        self.previous = Some(key.to_vec());
        self.inserted += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Dafsa {
        self.freeze_down_to(0);
        let root = self.path.pop().expect("root");
        let id = self.states.len() as u32;
        self.states.push(State {
            is_final: root.is_final,
            transitions: root.transitions,
        });
        Dafsa {
            states: self.states,
            root: id,
        }
    }

    /// Registers every pending node deeper than `depth`.
    fn freeze_down_to(&mut self, depth: usize) {
        while self.path.len() > depth + 1 {
            let node = self.path.pop().expect("non-empty path");
            debug_assert!(node.open_edge.is_none());
            let state = State {
                is_final: node.is_final,
                transitions: node.transitions,
            };
            let id = match self.registry.get(&state) {
                Some(&id) => id,
                None => {
                    let id = self.states.len() as u32;
                    self.states.push(state.clone());
                    self.registry.insert(state, id);
                    id
                }
            };
            let parent = self.path.last_mut().expect("parent");
            let byte = parent.open_edge.take().expect("open edge to child");
            parent.transitions.push((byte, id));
        }
    }
}

fn common_prefix_len(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl Dafsa {
    /// Builds the minimal automaton for a strictly ascending key sequence.
    pub fn build_from_sorted<I, K>(keys: I) -> Result<Dafsa, BuildError>
    where
        I: IntoIterator<Item = K>,
        K: AsRef<[u8]>,
    {
        let mut builder = DafsaBuilder::new();
        for key in keys {
            builder.insert(key.as_ref())?;
        }
        Ok(builder.finish())
    }

    /// Automaton accepting the empty language.
    pub fn empty() -> Dafsa {
        DafsaBuilder::new().finish()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.states.iter().map(|s| s.transitions.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        let root = &self.states[self.root as usize];
        !root.is_final && root.transitions.is_empty()
    }

    fn step(&self, state: u32, byte: u8) -> Option<u32> {
        let transitions = &self.states[state as usize].transitions;
        transitions
            .binary_search_by_key(&byte, |&(b, _)| b)
            .ok()
            .map(|i| transitions[i].1)
    }

    fn walk(&self, from: u32, bytes: &[u8]) -> Option<u32> {
        bytes.iter().try_fold(from, |s, &b| self.step(s, b))
    }

    pub fn contains(&self, key: &[u8]) -> bool {
        self.walk(self.root, key)
            .is_some_and(|s| self.states[s as usize].is_final)
    }

    /// Lengths of every accepted key that is a prefix of `text`, longest first.
    pub fn prefix_lengths(&self, text: &[u8]) -> Vec<usize> {
        let mut found = Vec::new();
        let mut state = self.root;
        if self.states[state as usize].is_final {
            found.push(0);
        }
        for (i, &b) in text.iter().enumerate() {
            match self.step(state, b) {
                Some(next) => state = next,
                None => break,
            }
            if self.states[state as usize].is_final {
                found.push(i + 1);
            }
        }
        found.reverse();
        found
    }

    /// Every accepted string, in lexicographic order.
    pub fn keys(&self) -> Vec<Vec<u8>> {
        self.suffixes_from(self.root)
    }

    /// Visits every accepted key in lexicographic order without
    /// materializing the whole key set.
    pub fn for_each_key<F: FnMut(&[u8])>(&self, mut f: F) {
        let mut current = Vec::new();
        self.visit(self.root, &mut current, &mut f);
    }

    fn visit<F: FnMut(&[u8])>(&self, state: u32, current: &mut Vec<u8>, f: &mut F) {
        let node = &self.states[state as usize];
        if node.is_final {
            f(current);
        }
        for &(byte, target) in &node.transitions {
            current.push(byte);
            self.visit(target, current, f);
            current.pop();
        }
    }

    fn suffixes_from(&self, state: u32) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        self.collect(state, &mut current, &mut out);
        out
    }

    fn collect(&self, state: u32, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let node = &self.states[state as usize];
        if node.is_final {
            out.push(current.clone());
        }
        for &(byte, target) in &node.transitions {
            current.push(byte);
            self.collect(target, current, out);
            current.pop();
        }
    }

    /// Payloads `p` such that `key ++ sep ++ p` is accepted, in byte order.
    pub fn payloads_for(&self, key: &[u8], sep: u8) -> Vec<Vec<u8>> {
        match self.walk(self.root, key).and_then(|s| self.step(s, sep)) {
            Some(state) => self.suffixes_from(state),
            None => Vec::new(),
        }
    }

    /// Stored keys reachable from `key` by optionally applying substitutions
    /// at each position, paired with their payloads. The automaton and the
    /// substitution alternatives are walked together, so dead branches are
    /// pruned as soon as the automaton has no matching transition.
    pub fn similar_payloads(
        &self,
        key: &[u8],
        subs: &SubstitutionMap,
        sep: u8,
    ) -> Vec<(Vec<u8>, Vec<Vec<u8>>)> {
        let mut reached = BTreeMap::new();
        let mut matched = Vec::with_capacity(key.len() + 4);
        self.walk_similar(self.root, key, 0, subs, &mut matched, &mut reached);
        reached
            .into_iter()
            .filter_map(|(word, state)| {
                let payloads = match self.step(state, sep) {
                    Some(s) => self.suffixes_from(s),
                    None => Vec::new(),
                };
                (!payloads.is_empty()).then_some((word, payloads))
            })
            .collect()
    }

    fn walk_similar(
        &self,
        state: u32,
        key: &[u8],
        pos: usize,
        subs: &SubstitutionMap,
        matched: &mut Vec<u8>,
        reached: &mut BTreeMap<Vec<u8>, u32>,
    ) {
        if pos == key.len() {
            reached.insert(matched.clone(), state);
            return;
        }
        if let Some(next) = self.step(state, key[pos]) {
            matched.push(key[pos]);
            self.walk_similar(next, key, pos + 1, subs, matched, reached);
            matched.pop();
        }
        for (from, to) in subs.pairs() {
            if !key[pos..].starts_with(from) {
                continue;
            }
            if let Some(next) = self.walk(state, to) {
                let mark = matched.len();
                matched.extend_from_slice(to);
                self.walk_similar(next, key, pos + from.len(), subs, matched, reached);
                matched.truncate(mark);
            }
        }
    }

    /// Serialized layout (all integers little-endian):
    ///
    /// ```text
    /// "MKDA" | version u16 | state_count u32 | root u32
    /// per state: flags u8 (bit 0 = final) | n u16 | n × (byte u8, target u32)
    /// ```
    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(14 + self.states.len() * 3 + self.transition_count() * 5);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.states.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.root.to_le_bytes());
        for state in &self.states {
            out.push(state.is_final as u8);
            out.extend_from_slice(&(state.transitions.len() as u16).to_le_bytes());
            for &(byte, target) in &state.transitions {
                out.push(byte);
                out.extend_from_slice(&target.to_le_bytes());
            }
        }
        out
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Dafsa, FormatError> {
        let mut reader = Reader { bytes, pos: 0 };
        let magic = reader.take(4)?;
        if magic != MAGIC {
            return Err(FormatError::new(0, "bad magic"));
        }
        let version = reader.u16()?;
        if version != FORMAT_VERSION {
            return Err(FormatError::new(4, format!("unsupported version {version}")));
        }
        let count_at = reader.pos;
        let count = reader.u32()? as usize;
        if count == 0 {
            return Err(FormatError::new(count_at, "zero states"));
        }
        let root_at = reader.pos;
        let root = reader.u32()?;
        if root as usize != count - 1 {
            return Err(FormatError::new(root_at, "root must be the last state"));
        }
        let mut states = Vec::with_capacity(count.min(bytes.len()));
        for id in 0..count {
            let flag_at = reader.pos;
            let flags = reader.u8()?;
            if flags > 1 {
                return Err(FormatError::new(flag_at, "unknown state flags"));
            }
            let n = reader.u16()? as usize;
            let mut transitions = Vec::with_capacity(n.min(256));
            for _ in 0..n {
                let at = reader.pos;
                let byte = reader.u8()?;
                let target = reader.u32()?;
                if target as usize >= id {
                    return Err(FormatError::new(at, "transition target must precede its source"));
                }
                if transitions.last().is_some_and(|&(b, _)| b >= byte) {
                    return Err(FormatError::new(at, "transitions not strictly sorted"));
                }
                transitions.push((byte, target));
            }
            states.push(State {
                is_final: flags == 1,
                transitions,
            });
        }
        if reader.pos != bytes.len() {
            return Err(FormatError::new(reader.pos, "trailing bytes"));
        }
        Ok(Dafsa { states, root })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.bytes.len() - self.pos < n {
            return Err(FormatError::new(self.pos, "truncated"));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}
