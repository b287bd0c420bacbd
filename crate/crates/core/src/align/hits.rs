//! Pairwise matching of a candidate pattern against a partial alignment.
//!
//! The alignment is viewed as a partial order of *slots*: each column is one
//! slot, and so is every occurrence that is not yet in a column. A hit pairs a
//! candidate position with a slot carrying the same symbol. A hit sequence is
//! admissible when its candidate positions increase and no later hit's slot
//! precedes an earlier hit's slot, which is exactly the condition for the new
//! row to be placed without crossing any existing row.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::align::alignment::{Entry, MultiAlignment};
use crate::align::SearchParams;
use crate::cost::CostModel;
use crate::pattern::{Pattern, PatternId};
use crate::symbol::Symbol;

/// Where a hit lands in the base alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseSlot {
    /// An existing column that contains New; the candidate joins it.
    Column(usize),
    /// An occurrence not yet in any column; the hit opens a new column.
    Free(Entry),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hit {
    pub slot: BaseSlot,
    pub candidate_pos: usize,
}

/// Hits ordered by candidate position, scored by the summed cost of the
/// matched candidate symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct HitSequence {
    pub hits: Vec<Hit>,
    pub score: f64,
}

// Exploration budget per (base, candidate) pair; keeps worst cases polynomial.
const STEP_BUDGET: usize = 200_000;

#[derive(Debug)]
struct Node {
    symbol: Symbol,
    slot: BaseSlot,
    patterns: Vec<PatternId>,
}

/// Precomputed slot graph of one base alignment, reusable across candidates.
#[derive(Debug)]
pub struct BaseGraph {
    nodes: Vec<Node>,
    // reach[u] contains v when u strictly precedes v
    reach: Vec<FixedBitSet>,
    by_symbol: HashMap<Symbol, Vec<usize>>,
}

impl BaseGraph {
    pub fn new(base: &MultiAlignment) -> Self {
        let mut nodes = Vec::new();
        let map = base.column_map();
        for (ci, c) in base.columns().iter().enumerate() {
            let mut patterns: Vec<PatternId> = c
                .entries()
                .iter()
                .filter_map(|e| base.rows()[e.row].pattern())
                .collect();
            patterns.sort_unstable();
            nodes.push(Node {
                symbol: c.symbol(),
                slot: BaseSlot::Column(ci),
                patterns,
            });
        }
        let mut occ_node: Vec<Vec<usize>> = Vec::with_capacity(base.row_count());
        for (ri, row) in base.rows().iter().enumerate() {
            let mut ids = Vec::with_capacity(row.len());
            for (pos, col) in map[ri].iter().enumerate() {
                match col {
                    Some(ci) => ids.push(*ci),
                    None => {
                        ids.push(nodes.len());
                        nodes.push(Node {
                            symbol: row.symbols()[pos],
                            slot: BaseSlot::Free(Entry { row: ri, pos }),
                            patterns: row.pattern().into_iter().collect(),
                        });
                    }
                }
            }
            occ_node.push(ids);
        }

        let n = nodes.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for ids in &occ_node {
            for w in ids.windows(2) {
                succ[w[0]].push(w[1]);
                indeg[w[1]] += 1;
            }
        }
        let mut topo: Vec<usize> = (0..n).filter(|&u| indeg[u] == 0).collect();
        let mut head = 0;
        while head < topo.len() {
            let u = topo[head];
            head += 1;
            for &v in &succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    topo.push(v);
                }
            }
        }
        debug_assert_eq!(topo.len(), n, "alignment slots must form a DAG");
        let mut reach = vec![FixedBitSet::with_capacity(n); n];
        for &u in topo.iter().rev() {
            let mut r = FixedBitSet::with_capacity(n);
            for &v in &succ[u] {
                r.insert(v);
                r.union_with(&reach[v]);
            }
            reach[u] = r;
        }

        let mut by_symbol: HashMap<Symbol, Vec<usize>> = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            let matchable = match node.slot {
                BaseSlot::Column(ci) => base.columns()[ci].contains_new(),
                BaseSlot::Free(_) => true,
            };
            if matchable {
                by_symbol.entry(node.symbol).or_default().push(i);
            }
        }
        BaseGraph {
            nodes,
            reach,
            by_symbol,
        }
    }

    /// Symbols that some candidate could still match.
    pub fn open_symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.by_symbol.keys().copied()
    }

    pub fn has_open_symbol(&self, sym: Symbol) -> bool {
        self.by_symbol.contains_key(&sym)
    }

    fn precedes(&self, u: usize, v: usize) -> bool {
        self.reach[u].contains(v)
    }

    /// Up to `limit` maximal admissible hit sequences, best first.
    pub fn hits(
        &self,
        candidate: PatternId,
        symbols: &[Symbol],
        costs: &CostModel,
        limit: usize,
    ) -> Vec<HitSequence> {
        let m = symbols.len();
        let pairs: Vec<Vec<usize>> = symbols
            .iter()
            .map(|s| {
                self.by_symbol.get(s).map_or_else(Vec::new, |ns| {
                    ns.iter()
                        .copied()
                        .filter(|&n| self.nodes[n].patterns.binary_search(&candidate).is_err())
                        .collect()
                })
            })
            .collect();
        if limit == 0 || pairs.iter().all(Vec::is_empty) {
            return Vec::new();
        }
        let weight: Vec<f64> = symbols.iter().map(|&s| costs.cost(s)).collect();
        let mut ub = vec![0.0; m + 1];
        for j in (0..m).rev() {
            ub[j] = ub[j + 1] + if pairs[j].is_empty() { 0.0 } else { weight[j] };
        }
        // a skipped pair (j, n) can only be blocked later by a hit on n itself
        // or on a slot preceding n
        let blockable: Vec<Vec<bool>> = (0..m)
            .map(|j| {
                pairs[j]
                    .iter()
                    .map(|&n| {
                        pairs[j + 1..]
                            .iter()
                            .flatten()
                            .any(|&later| later == n || self.precedes(later, n))
                    })
                    .collect()
            })
            .collect();

        let mut search = Enumerator {
            graph: self,
            pairs: &pairs,
            weight: &weight,
            ub: &ub,
            blockable: &blockable,
            limit,
            steps: 0,
            found: Vec::new(),
        };
        let mut cur = Vec::new();
        search.descend(0, &mut cur, 0.0);
        search
            .found
            .into_iter()
            .map(|(score, seq)| HitSequence {
                score,
                hits: seq
                    .into_iter()
                    .map(|(j, n)| Hit {
                        slot: self.nodes[n].slot,
                        candidate_pos: j,
                    })
                    .collect(),
            })
            .collect()
    }
}

struct Enumerator<'a> {
    graph: &'a BaseGraph,
    pairs: &'a [Vec<usize>],
    weight: &'a [f64],
    ub: &'a [f64],
    blockable: &'a [Vec<bool>],
    limit: usize,
    steps: usize,
    found: Vec<(f64, Vec<(usize, usize)>)>,
}

impl Enumerator<'_> {
    fn fits_after(&self, cur: &[(usize, usize)], n: usize) -> bool {
        cur.iter()
            .all(|&(_, prev)| prev != n && !self.graph.precedes(n, prev))
    }

    fn insertable(&self, cur: &[(usize, usize)], j: usize, n: usize) -> bool {
        cur.iter().all(|&(jj, other)| {
            other != n
                && if jj < j {
                    !self.graph.precedes(n, other)
                } else {
                    !self.graph.precedes(other, n)
                }
        })
    }

    fn is_maximal(&self, cur: &[(usize, usize)]) -> bool {
        (0..self.pairs.len())
            .filter(|j| !cur.iter().any(|&(jj, _)| jj == *j))
            .all(|j| self.pairs[j].iter().all(|&n| !self.insertable(cur, j, n)))
    }

    fn threshold(&self) -> Option<f64> {
        (self.found.len() >= self.limit).then(|| self.found[self.found.len() - 1].0)
    }

    fn record(&mut self, score: f64, seq: Vec<(usize, usize)>) {
        let at = self
            .found
            .iter()
            .position(|(s, q)| score > *s || (score == *s && seq < *q))
            .unwrap_or(self.found.len());
        self.found.insert(at, (score, seq));
        self.found.truncate(self.limit);
    }

    fn descend(&mut self, j: usize, cur: &mut Vec<(usize, usize)>, score: f64) {
        self.steps += 1;
        if self.steps > STEP_BUDGET {
            return;
        }
        if let Some(t) = self.threshold() {
            if score + self.ub[j] < t {
                return;
            }
        }
        if j == self.pairs.len() {
            if !cur.is_empty() && self.is_maximal(cur) {
                self.record(score, cur.clone());
            }
            return;
        }
        let mut any_fit = false;
        let mut skip_ok = true;
        for (k, &n) in self.pairs[j].iter().enumerate() {
            if self.fits_after(cur, n) {
                any_fit = true;
                if !self.blockable[j][k] {
                    skip_ok = false;
                }
                cur.push((j, n));
                self.descend(j + 1, cur, score + self.weight[j]);
                cur.pop();
            }
        }
        if !any_fit || skip_ok {
            self.descend(j + 1, cur, score);
        }
    }
}

/// Matches `candidate` against the free and joinable slots of `base`.
pub fn pairwise_align(
    base: &MultiAlignment,
    candidate: &Pattern,
    costs: &CostModel,
    params: &SearchParams,
) -> Vec<HitSequence> {
    BaseGraph::new(base).hits(
        candidate.id(),
        candidate.symbols(),
        costs,
        params.beam_width,
    )
}
