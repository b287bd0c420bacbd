use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Dense handle for an interned symbol name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub(crate) u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// Whether an occurrence names its pattern or carries content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolRole {
    Identification,
    Contents,
}

impl SymbolRole {
    pub fn is_id(self) -> bool {
        matches!(self, SymbolRole::Identification)
    }
}

/// Interning table. Ids are assigned in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    names: Vec<String>,
    ids: HashMap<String, Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> Result<Symbol> {
        check_token(name)?;
        if let Some(&sym) = self.ids.get(name) {
            return Ok(sym);
        }
        let sym = Symbol(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), sym);
        Ok(sym)
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.ids.get(name).copied()
    }

    /// Name of an interned symbol. Panics on a handle from another table.
    pub fn name(&self, sym: Symbol) -> &str {
        &self.names[sym.index()]
    }

    pub fn get_name(&self, sym: Symbol) -> Option<&str> {
        self.names.get(sym.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (Symbol(i as u32), n.as_str()))
    }
}

pub(crate) fn check_token(name: &str) -> Result<()> {
    if name.is_empty() {
        return Err(Error::InvalidToken {
            token: name.to_owned(),
            reason: "empty",
        });
    }
    if name.chars().any(char::is_whitespace) {
        return Err(Error::InvalidToken {
            token: name.to_owned(),
            reason: "contains whitespace",
        });
    }
    Ok(())
}

/// Name of the closing twin of `name` (`x` -> `#x`).
pub fn closing_twin(name: &str) -> String {
    format!("#{name}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_idempotent() {
        let mut t = SymbolTable::new();
        let a = t.intern("Jack").unwrap();
        let b = t.intern("Jack").unwrap();
        assert_eq!(a, b);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn twins_are_distinct() {
        let mut t = SymbolTable::new();
        let g = t.intern("gender").unwrap();
        let cg = t.intern("#gender").unwrap();
        assert_ne!(g, cg);
        assert_eq!(t.name(cg), "#gender");
    }

    #[test]
    fn matching_is_case_sensitive() {
        let mut t = SymbolTable::new();
        assert_ne!(t.intern("jack").unwrap(), t.intern("Jack").unwrap());
    }

    #[test]
    fn rejects_bad_tokens() {
        let mut t = SymbolTable::new();
        assert!(matches!(t.intern(""), Err(Error::InvalidToken { .. })));
        assert!(matches!(t.intern("a b"), Err(Error::InvalidToken { .. })));
        assert!(matches!(t.intern("a\tb"), Err(Error::InvalidToken { .. })));
        assert!(t.is_empty());
    }
}
