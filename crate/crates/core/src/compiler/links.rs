//! Joining of linked lexemes (infinitive, finite verb, participles, ...)
//! into single lexemes.

use std::collections::{BTreeSet, HashMap};

use super::ingest::{Link, SourceLexeme};

/// Which link types merge lexemes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum JoinableLinks {
    #[default]
    All,
    None,
    Only(BTreeSet<u32>),
}

impl JoinableLinks {
    pub fn joins(&self, link_type: u32) -> bool {
        match self {
            JoinableLinks::All => true,
            JoinableLinks::None => false,
            JoinableLinks::Only(types) => types.contains(&link_type),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DanglingLink {
    pub source: u32,
    pub link: Link,
}

#[derive(Debug, Clone)]
pub struct JoinOutcome {
    pub lexemes: Vec<SourceLexeme>,
    pub dangling: Vec<DanglingLink>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Concatenates every connected component over joinable links into one
/// lexeme. Each component starts from its root (a member no joinable link
/// points to) and follows outgoing links depth-first; the merged lexeme
/// takes the root's id and sits at the position of the component's first
/// member in the input.
pub fn join_linked_lexemes(lexemes: Vec<SourceLexeme>, joinable: &JoinableLinks) -> JoinOutcome {
    let n = lexemes.len();
    let index: HashMap<u32, usize> = lexemes.iter().enumerate().map(|(i, l)| (l.id, i)).collect();

    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut has_incoming = vec![false; n];
    let mut parent: Vec<usize> = (0..n).collect();
    let mut dangling = Vec::new();
    for (i, lexeme) in lexemes.iter().enumerate() {
        for link in &lexeme.links {
            if !joinable.joins(link.link_type) {
                continue;
            }
            match index.get(&link.target) {
                Some(&j) if j != i => {
                    outgoing[i].push(j);
                    has_incoming[j] = true;
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
                Some(_) => {}
                None => dangling.push(DanglingLink {
                    source: lexeme.id,
                    link: *link,
                }),
            }
        }
    }

    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut component_of: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        let c = *component_of.entry(root).or_insert_with(|| {
            components.push(Vec::new());
            components.len() - 1
        });
        components[c].push(i);
    }

    let mut slots: Vec<Option<SourceLexeme>> = lexemes.into_iter().map(Some).collect();
    let mut out = Vec::with_capacity(components.len());
    for members in components {
        if members.len() == 1 {
            out.push(slots[members[0]].take().expect("each lexeme used once"));
            continue;
        }
        let mut order = Vec::with_capacity(members.len());
        let mut visited = BTreeSet::new();
        let starts = members
            .iter()
            .copied()
            .filter(|&m| !has_incoming[m])
            .chain(members.iter().copied());
        for start in starts {
            let mut stack = vec![start];
            while let Some(node) = stack.pop() {
                if !visited.insert(node) {
                    continue;
                }
                order.push(node);
                for &next in outgoing[node].iter().rev() {
                    if !visited.contains(&next) {
                        stack.push(next);
                    }
                }
            }
        }
        let mut merged: Option<SourceLexeme> = None;
        for m in order {
            let lexeme = slots[m].take().expect("each lexeme used once");
            let kept_links = lexeme
                .links
                .iter()
                .copied()
                .filter(|l| !joinable.joins(l.link_type));
            match merged.as_mut() {
                None => {
                    let links = kept_links.collect();
                    merged = Some(SourceLexeme { links, ..lexeme });
                }
                Some(acc) => {
                    acc.links.extend(kept_links);
                    acc.forms.extend(lexeme.forms);
                }
            }
        }
        out.push(merged.expect("non-empty component"));
    }
    JoinOutcome {
        lexemes: out,
        dangling,
    }
}
