use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::symbol::{closing_twin, Symbol, SymbolRole};

/// Handle of a stored pattern; assigned in insertion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct PatternId(pub(crate) u32);

impl PatternId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// A token as written by the user, before interning. `id_marked` is the
/// explicit `%` prefix of the file format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken {
    pub name: String,
    pub id_marked: bool,
}

impl RawToken {
    pub fn new(name: impl Into<String>, id_marked: bool) -> Self {
        Self {
            name: name.into(),
            id_marked,
        }
    }

    /// Splits a leading `%` marker off a whitespace-free token.
    pub fn from_marked(token: &str) -> Self {
        match token.strip_prefix('%') {
            Some(rest) => Self::new(rest, true),
            None => Self::new(token, false),
        }
    }

    /// Tokenizes a whitespace-separated string, honouring `%` markers.
    pub fn parse_line(text: &str) -> Vec<Self> {
        text.split_whitespace().map(Self::from_marked).collect()
    }
}

/// One stored pattern: an ordered run of symbols, each with a role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub(crate) id: PatternId,
    pub(crate) symbols: Vec<Symbol>,
    pub(crate) roles: Vec<SymbolRole>,
    pub(crate) frequency: u64,
    pub(crate) label: Option<String>,
}

impl Pattern {
    pub fn id(&self) -> PatternId {
        self.id
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn roles(&self) -> &[SymbolRole] {
        &self.roles
    }

    pub fn frequency(&self) -> u64 {
        self.frequency
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Positions of the identification occurrences.
    pub fn id_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_id())
            .map(|(i, _)| i)
    }
}

/// Resolves roles: explicit markers win; otherwise the first token is an
/// identifier, and so is the last one when it is the first one's closing twin.
pub(crate) fn resolve_roles(tokens: &[RawToken]) -> Vec<SymbolRole> {
    if tokens.iter().any(|t| t.id_marked) {
        return tokens
            .iter()
            .map(|t| {
                if t.id_marked {
                    SymbolRole::Identification
                } else {
                    SymbolRole::Contents
                }
            })
            .collect();
    }
    let mut roles = vec![SymbolRole::Contents; tokens.len()];
    if let Some(first) = tokens.first() {
        roles[0] = SymbolRole::Identification;
        let last = tokens.len() - 1;
        if last > 0 && tokens[last].name == closing_twin(&first.name) {
            roles[last] = SymbolRole::Identification;
        }
    }
    roles
}

/// Stack check for `x ... #x` pairs that both occur in the pattern.
/// Unpaired boundary symbols are references and pass untouched.
pub(crate) fn check_boundaries<S: AsRef<str>>(names: &[S]) -> Result<()> {
    let present: HashSet<&str> = names.iter().map(AsRef::as_ref).collect();
    let is_paired_open = |n: &str| {
        !n.starts_with('#') && present.contains(n) && present.contains(closing_twin(n).as_str())
    };
    let mut stack: Vec<(&str, usize)> = Vec::new();
    for (i, n) in names.iter().map(AsRef::as_ref).enumerate() {
        if is_paired_open(n) {
            stack.push((n, i));
        } else if let Some(open) = n.strip_prefix('#') {
            if !is_paired_open(open) {
                continue;
            }
            match stack.pop() {
                Some((top, _)) if top == open => {}
                Some((top, _)) => {
                    return Err(Error::Validation {
                        index: i,
                        reason: format!("`{n}` closes while `{top}` is still open"),
                    })
                }
                None => {
                    return Err(Error::Validation {
                        index: i,
                        reason: format!("`{n}` closes before `{open}` opens"),
                    })
                }
            }
        }
    }
    if let Some((top, i)) = stack.pop() {
        return Err(Error::Validation {
            index: i,
            reason: format!("`{top}` is never closed"),
        });
    }
    Ok(())
}

/// Positions `(open, close)` of every `x ... #x` pair in a valid pattern.
pub(crate) fn boundary_pairs<S: AsRef<str>>(names: &[S]) -> Vec<(usize, usize)> {
    let present: HashSet<&str> = names.iter().map(AsRef::as_ref).collect();
    let is_paired_open = |n: &str| {
        !n.starts_with('#') && present.contains(n) && present.contains(closing_twin(n).as_str())
    };
    let mut stack: Vec<(&str, usize)> = Vec::new();
    let mut pairs = Vec::new();
    for (i, n) in names.iter().map(AsRef::as_ref).enumerate() {
        if is_paired_open(n) {
            stack.push((n, i));
        } else if let Some(open) = n.strip_prefix('#') {
            if let Some(k) = stack.iter().rposition(|&(o, _)| o == open) {
                pairs.push((stack[k].1, i));
                stack.truncate(k);
            }
        }
    }
    pairs.sort_unstable();
    pairs
}
