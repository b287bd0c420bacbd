use std::collections::HashSet;

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::pattern::{check_boundaries, resolve_roles, Pattern, PatternId, RawToken};
use crate::symbol::{check_token, Symbol, SymbolTable};

/// The Old repository: patterns plus the symbol table they were interned in.
///
/// Patterns are added while the store is open. Sealing freezes it, builds the
/// per-symbol pattern index used by the search, and yields the cost model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeStore {
    table: SymbolTable,
    patterns: Vec<Pattern>,
    labels: HashSet<String>,
    total_mass: u64,
    sealed: bool,
    // symbol index -> patterns containing it, ascending, no duplicates
    postings: Vec<Vec<PatternId>>,
}

impl KnowledgeStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates and stores one pattern. Nothing is interned when validation fails.
    pub fn add_pattern(
        &mut self,
        tokens: &[RawToken],
        frequency: u64,
        label: Option<&str>,
    ) -> Result<PatternId> {
        if self.sealed {
            return Err(Error::Sealed);
        }
        if tokens.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if frequency == 0 {
            return Err(Error::ZeroFrequency);
        }
        for t in tokens {
            check_token(&t.name)?;
        }
        let names: Vec<&str> = tokens.iter().map(|t| t.name.as_str()).collect();
        check_boundaries(&names)?;
        if let Some(l) = label {
            if self.labels.contains(l) {
                return Err(Error::DuplicateLabel(l.to_owned()));
            }
        }

        let roles = resolve_roles(tokens);
        let symbols = tokens
            .iter()
            .map(|t| self.table.intern(&t.name))
            .collect::<Result<Vec<_>>>()?;
        let id = PatternId(self.patterns.len() as u32);
        if let Some(l) = label {
            self.labels.insert(l.to_owned());
        }
        self.total_mass += frequency * symbols.len() as u64;
        self.patterns.push(Pattern {
            id,
            symbols,
            roles,
            frequency,
            label: label.map(str::to_owned),
        });
        Ok(id)
    }

    /// Convenience wrapper: whitespace-separated symbols with optional `%` markers.
    pub fn add_str(
        &mut self,
        text: &str,
        frequency: u64,
        label: Option<&str>,
    ) -> Result<PatternId> {
        self.add_pattern(&RawToken::parse_line(text), frequency, label)
    }

    pub fn seal_and_build_costs(&mut self) -> Result<CostModel> {
        if self.patterns.is_empty() {
            return Err(Error::EmptyStore);
        }
        if !self.sealed {
            let mut postings = vec![Vec::new(); self.table.len()];
            for p in &self.patterns {
                for &s in &p.symbols {
                    let list: &mut Vec<PatternId> = &mut postings[s.index()];
                    if list.last() != Some(&p.id) {
                        list.push(p.id);
                    }
                }
            }
            self.postings = postings;
            self.sealed = true;
        }
        Ok(CostModel::from_store(self))
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.table
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn pattern(&self, id: PatternId) -> &Pattern {
        &self.patterns[id.index()]
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Σ frequency × length over all patterns, in symbol occurrences.
    pub fn total_frequency_mass(&self) -> u64 {
        self.total_mass
    }

    pub fn find_label(&self, label: &str) -> Option<PatternId> {
        self.patterns
            .iter()
            .find(|p| p.label.as_deref() == Some(label))
            .map(|p| p.id)
    }

    /// Patterns containing `sym`. Empty until sealed.
    pub fn patterns_with(&self, sym: Symbol) -> &[PatternId] {
        self.postings.get(sym.index()).map_or(&[], Vec::as_slice)
    }

    /// Display name for a pattern: its label, or its handle.
    pub fn display_name(&self, id: PatternId) -> String {
        match self.pattern(id).label() {
            Some(l) => l.to_owned(),
            None => id.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::SymbolRole;

    #[test]
    fn slot_value_pattern() {
        let mut s = KnowledgeStore::new();
        let id = s.add_str("hcolour fair-hair #hcolour", 1, None).unwrap();
        let p = s.pattern(id);
        assert_eq!(p.len(), 3);
        let ids: Vec<&str> = p
            .id_positions()
            .map(|i| s.symbols().name(p.symbols()[i]))
            .collect();
        assert_eq!(ids, ["hcolour", "#hcolour"]);
        assert_eq!(s.total_frequency_mass(), 3);
    }

    #[test]
    fn single_symbol_pattern() {
        let mut s = KnowledgeStore::new();
        let id = s.add_str("a", 1, None).unwrap();
        assert_eq!(s.pattern(id).roles(), &[SymbolRole::Identification]);
    }

    #[test]
    fn crossing_pattern_leaves_store_untouched() {
        let mut s = KnowledgeStore::new();
        let err = s.add_str("x #y y #x", 1, None).unwrap_err();
        assert!(matches!(err, Error::Validation { index: 1, .. }));
        assert!(s.is_empty());
        assert!(s.symbols().is_empty());
    }

    #[test]
    fn preconditions() {
        let mut s = KnowledgeStore::new();
        assert_eq!(s.add_str("a", 0, None), Err(Error::ZeroFrequency));
        assert_eq!(s.add_str("", 1, None), Err(Error::EmptyPattern));
        assert_eq!(s.seal_and_build_costs().unwrap_err(), Error::EmptyStore);
        s.add_str("a b", 1, Some("ab")).unwrap();
        assert_eq!(
            s.add_str("c", 1, Some("ab")),
            Err(Error::DuplicateLabel("ab".into()))
        );
        s.seal_and_build_costs().unwrap();
        assert_eq!(s.add_str("c", 1, None), Err(Error::Sealed));
    }

    #[test]
    fn postings_index() {
        let mut s = KnowledgeStore::new();
        let p0 = s.add_str("a b a", 1, None).unwrap();
        let p1 = s.add_str("b c", 1, None).unwrap();
        s.seal_and_build_costs().unwrap();
        let b = s.symbols().lookup("b").unwrap();
        let a = s.symbols().lookup("a").unwrap();
        assert_eq!(s.patterns_with(b), &[p0, p1]);
        assert_eq!(s.patterns_with(a), &[p0]);
    }
}
