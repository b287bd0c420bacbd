use crate::store::KnowledgeStore;
use crate::symbol::Symbol;

/// Bit costs per symbol: `-log2(f(s) / F)`, where `f(s)` counts occurrences
/// weighted by pattern frequency and `F` is the store's total frequency mass.
/// Symbols unknown to the store cost `log2(F + 1)` and never match.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    costs: Vec<f64>,
    counts: Vec<u64>,
    novel_cost: f64,
    total_mass: u64,
}

impl CostModel {
    pub(crate) fn from_store(store: &KnowledgeStore) -> Self {
        let mut counts = vec![0u64; store.symbols().len()];
        for p in store.patterns() {
            for &s in p.symbols() {
                counts[s.index()] += p.frequency();
            }
        }
        let total = store.total_frequency_mass();
        let costs = counts
            .iter()
            .map(|&f| -(f as f64 / total as f64).log2())
            .collect();
        CostModel {
            costs,
            counts,
            novel_cost: (total as f64 + 1.0).log2(),
            total_mass: total,
        }
    }

    /// Cost in bits; falls back to the novel cost for handles outside the store.
    pub fn cost(&self, sym: Symbol) -> f64 {
        self.costs
            .get(sym.index())
            .copied()
            .unwrap_or(self.novel_cost)
    }

    pub fn is_known(&self, sym: Symbol) -> bool {
        sym.index() < self.costs.len()
    }

    /// Frequency-weighted occurrence count `f(s)`.
    pub fn weighted_count(&self, sym: Symbol) -> u64 {
        self.counts.get(sym.index()).copied().unwrap_or(0)
    }

    pub fn novel_cost(&self) -> f64 {
        self.novel_cost
    }

    pub fn total_mass(&self) -> u64 {
        self.total_mass
    }

    /// Per-symbol cost table indexed by symbol id.
    pub fn table(&self) -> &[f64] {
        &self.costs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(patterns: &[(&str, u64)]) -> (KnowledgeStore, CostModel) {
        let mut s = KnowledgeStore::new();
        for (p, f) in patterns {
            s.add_str(p, *f, None).unwrap();
        }
        let c = s.seal_and_build_costs().unwrap();
        (s, c)
    }

    #[test]
    fn uniform_counts_cost_two_bits() {
        let (s, c) = build(&[("a b", 1), ("c d", 1)]);
        for (sym, _) in s.symbols().iter() {
            assert_eq!(c.cost(sym), 2.0);
        }
        assert_eq!(c.novel_cost(), 5f64.log2());
    }

    #[test]
    fn doubling_frequencies_keeps_symbol_costs() {
        let (_, c1) = build(&[("a b", 1), ("c d", 1)]);
        let (_, c2) = build(&[("a b", 2), ("c d", 2)]);
        assert_eq!(c1.table(), c2.table());
    }

    #[test]
    fn weighted_counts_follow_frequency() {
        let (s, c) = build(&[("x a #x", 3), ("y a #y", 1)]);
        let a = s.symbols().lookup("a").unwrap();
        let x = s.symbols().lookup("x").unwrap();
        assert_eq!(c.weighted_count(a), 4);
        assert_eq!(c.total_mass(), 12);
        assert_eq!(c.cost(a), -(4.0f64 / 12.0).log2());
        assert!(c.cost(x) > c.cost(a));
    }

    #[test]
    fn sole_symbol_costs_zero() {
        // f(s) = F is the only way to reach zero bits
        let (s, c) = build(&[("a", 5)]);
        assert_eq!(c.cost(s.symbols().lookup("a").unwrap()), 0.0);
    }
}
