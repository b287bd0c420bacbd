//! Exhaustive search over small instances, used to check the beam search.

use std::collections::HashSet;
use std::sync::Arc;

use crate::align::alignment::{Column, Entry, MultiAlignment, Row, RowSource};
use crate::align::score::{score_alignment, Score};
use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::pattern::PatternId;
use crate::query::Query;
use crate::store::KnowledgeStore;
use crate::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Total rows, New included. At most 4.
    pub max_rows: usize,
    /// Longest pattern (and New) the oracle accepts. At most 8.
    pub max_pattern_len: usize,
    pub max_patterns: usize,
    pub max_pattern_reuse: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_rows: 4,
            max_pattern_len: 8,
            max_patterns: 12,
            max_pattern_reuse: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Score of the best valid alignment; `None` when no alignment exists.
    pub best: Option<Score>,
    /// Every distinct alignment whose cd equals the best cd.
    pub alignments: Vec<MultiAlignment>,
    /// Number of valid alignments enumerated.
    pub examined: usize,
}

pub fn brute_force_best(
    store: &KnowledgeStore,
    costs: &CostModel,
    query: &Query,
    limits: &OracleLimits,
) -> Result<OracleResult> {
    if !store.is_sealed() {
        return Err(Error::NotSealed);
    }
    if limits.max_rows > 4 || limits.max_pattern_len > 8 {
        return Err(Error::OracleLimit(
            "at most 4 rows and 8 symbols per pattern".into(),
        ));
    }
    if store.len() > limits.max_patterns {
        return Err(Error::OracleLimit(format!(
            "{} patterns (limit {})",
            store.len(),
            limits.max_patterns
        )));
    }
    if let Some(p) = store
        .patterns()
        .iter()
        .find(|p| p.len() > limits.max_pattern_len)
    {
        return Err(Error::OracleLimit(format!(
            "pattern {} has {} symbols (limit {})",
            p.id(),
            p.len(),
            limits.max_pattern_len
        )));
    }
    if query.len() > limits.max_pattern_len {
        return Err(Error::OracleLimit(format!(
            "New has {} symbols (limit {})",
            query.len(),
            limits.max_pattern_len
        )));
    }

    let new_src = Arc::new(RowSource::from_query(query));
    let sources: Vec<Arc<RowSource>> = store
        .patterns()
        .iter()
        .map(|p| Arc::new(RowSource::from_pattern(store, p)))
        .collect();

    let mut state = Search {
        costs,
        best: None,
        alignments: Vec::new(),
        keys: HashSet::new(),
        examined: 0,
    };
    let mut multiset = Vec::new();
    for_each_multiset(
        store.len(),
        limits.max_rows - 1,
        limits.max_pattern_reuse,
        0,
        &mut multiset,
        &mut |pids| {
            let mut rows = vec![Row::new_row(new_src.clone())];
            for &p in pids {
                let uses = rows.iter().filter(|r| r.pattern() == Some(p)).count() as u32;
                rows.push(Row::old_row(sources[p.index()].clone(), uses + 1));
            }
            state.enumerate_columns(rows);
        },
    );

    state.alignments.sort_by_key(MultiAlignment::key);
    Ok(OracleResult {
        best: state.best,
        alignments: state.alignments,
        examined: state.examined,
    })
}

/// Visits every non-empty multiset of pattern ids (sorted, size ≤ `max`).
fn for_each_multiset(
    n: usize,
    max: usize,
    reuse: usize,
    start: usize,
    cur: &mut Vec<PatternId>,
    visit: &mut dyn FnMut(&[PatternId]),
) {
    if !cur.is_empty() {
        visit(cur);
    }
    if cur.len() == max {
        return;
    }
    for p in start..n {
        let pid = PatternId(p as u32);
        if cur.iter().filter(|&&q| q == pid).count() >= reuse {
            continue;
        }
        cur.push(pid);
        for_each_multiset(n, max, reuse, p, cur, visit);
        cur.pop();
    }
}

struct Search<'a> {
    costs: &'a CostModel,
    best: Option<Score>,
    alignments: Vec<MultiAlignment>,
    keys: HashSet<crate::align::alignment::AlignmentKey>,
    examined: usize,
}

struct Occ {
    entry: Entry,
    symbol: Symbol,
    pattern: Option<PatternId>,
    id: bool,
    cost: f64,
}

/// Pruning margin, so rounding in the bound never cuts off a tie.
const BOUND_SLACK: f64 = 1e-9;

struct Walk<'a> {
    rows: &'a [Row],
    occs: &'a [Occ],
    new_left: &'a [f64],
    open: Vec<Open>,
}

/// Whether putting `e` into column `c` would order some other column both
/// before and after `c`. Occurrences arrive in row-major order, so any column
/// already holding an entry in `e.row` sits to the left of `c` there. Such a
/// conflict survives every later addition, which makes the cut sound.
fn crosses(open: &[Open], c: usize, e: Entry) -> bool {
    open.iter().enumerate().any(|(d, other)| {
        d != c
            && other.entries.iter().any(|x| x.row == e.row)
            && other.entries.iter().any(|x| {
                open[c]
                    .entries
                    .iter()
                    .any(|y| y.row == x.row && y.pos < x.pos)
            })
    })
}

struct Open {
    symbol: Symbol,
    entries: Vec<Entry>,
    patterns: Vec<PatternId>,
    has_new: bool,
}

impl Search<'_> {
    fn enumerate_columns(&mut self, rows: Vec<Row>) {
        let mut occs = Vec::new();
        for (ri, row) in rows.iter().enumerate() {
            for (pos, &symbol) in row.symbols().iter().enumerate() {
                if !self.costs.is_known(symbol) {
                    continue;
                }
                occs.push(Occ {
                    entry: Entry { row: ri, pos },
                    symbol,
                    pattern: row.pattern(),
                    id: !row.is_new() && row.roles()[pos].is_id(),
                    cost: self.costs.cost(symbol),
                });
            }
        }
        // New costs still undecided from each index on
        let mut new_left = vec![0.0; occs.len() + 1];
        for i in (0..occs.len()).rev() {
            let o = &occs[i];
            new_left[i] = new_left[i + 1] + if o.pattern.is_none() { o.cost } else { 0.0 };
        }
        let mut walk = Walk {
            rows: &rows,
            occs: &occs,
            new_left: &new_left,
            open: Vec::new(),
        };
        self.assign(&mut walk, 0, 0.0, 0.0);
    }

    /// `gained` is New cost already placed in columns, `lost` the cost of
    /// identification occurrences already left out of every column. No
    /// completion can score above `gained + new_left[i] - lost`.
    fn assign(&mut self, w: &mut Walk<'_>, i: usize, gained: f64, lost: f64) {
        if let Some(b) = self.best {
            if gained + w.new_left[i] - lost < b.cd - BOUND_SLACK {
                return;
            }
        }
        // a row whose occurrences are all decided can no longer connect
        let row_done = i > 0
            && w.occs
                .get(i)
                .is_none_or(|o| o.entry.row != w.occs[i - 1].entry.row);
        if row_done {
            let row = w.occs[i - 1].entry.row;
            if !w
                .open
                .iter()
                .any(|c| c.entries.iter().any(|e| e.row == row))
            {
                return;
            }
        }
        if i == w.occs.len() {
            self.finish(w.rows, &w.open);
            return;
        }
        let o = &w.occs[i];
        let is_new = o.pattern.is_none();
        let gain = if is_new { gained + o.cost } else { gained };

        // join an open column
        for c in 0..w.open.len() {
            let col = &w.open[c];
            let ok = col.symbol == o.symbol
                && col.entries.iter().all(|e| e.row != o.entry.row)
                && o.pattern.is_none_or(|p| !col.patterns.contains(&p))
                && (col.has_new || col.entries.len() < 2)
                && !crosses(&w.open, c, o.entry);
            if ok {
                w.open[c].entries.push(o.entry);
                if let Some(p) = o.pattern {
                    w.open[c].patterns.push(p);
                }
                self.assign(w, i + 1, gain, lost);
                w.open[c].entries.pop();
                if o.pattern.is_some() {
                    w.open[c].patterns.pop();
                }
            }
        }

        // open a column when a later occurrence could join it
        let partner_exists = w.occs[i + 1..].iter().any(|later| {
            later.symbol == o.symbol
                && later.entry.row != o.entry.row
                && (later.pattern.is_none() || later.pattern != o.pattern)
        });
        if partner_exists {
            w.open.push(Open {
                symbol: o.symbol,
                entries: vec![o.entry],
                patterns: o.pattern.into_iter().collect(),
                has_new: is_new,
            });
            self.assign(w, i + 1, gain, lost);
            w.open.pop();
        }

        // leave unmatched
        let lost = if o.id { lost + o.cost } else { lost };
        self.assign(w, i + 1, gained, lost);
    }

    fn finish(&mut self, rows: &[Row], open: &[Open]) {
        if open.iter().any(|c| c.entries.len() < 2) {
            return;
        }
        let columns = open
            .iter()
            .map(|c| Column::new(c.symbol, c.entries.clone()))
            .collect();
        let Some(a) = MultiAlignment::from_parts(rows.to_vec(), columns) else {
            return;
        };
        if a.validate().is_err() {
            return;
        }
        self.examined += 1;
        let score = score_alignment(&a, self.costs);
        match self.best {
            Some(b) if score.cd < b.cd => {}
            Some(b) if score.cd == b.cd => {
                if self.keys.insert(a.key()) {
                    self.alignments.push(a);
                }
            }
            _ => {
                self.best = Some(score);
                self.keys.clear();
                self.keys.insert(a.key());
                self.alignments = vec![a];
            }
        }
    }
}
