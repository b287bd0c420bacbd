use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::pattern::{Pattern, PatternId};
use crate::query::Query;
use crate::store::KnowledgeStore;
use crate::symbol::{Symbol, SymbolRole};

/// Immutable symbol data behind a row; shared between alignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSource {
    pattern: Option<PatternId>,
    label: String,
    symbols: Vec<Symbol>,
    roles: Vec<SymbolRole>,
    names: Vec<String>,
}

impl RowSource {
    pub fn from_query(query: &Query) -> Self {
        RowSource {
            pattern: None,
            label: "New".to_owned(),
            symbols: query.symbols().to_vec(),
            roles: vec![SymbolRole::Contents; query.len()],
            names: query.names().to_vec(),
        }
    }

    pub fn from_pattern(store: &KnowledgeStore, pattern: &Pattern) -> Self {
        RowSource {
            pattern: Some(pattern.id()),
            label: store.display_name(pattern.id()),
            symbols: pattern.symbols().to_vec(),
            roles: pattern.roles().to_vec(),
            names: pattern
                .symbols()
                .iter()
                .map(|&s| store.symbols().name(s).to_owned())
                .collect(),
        }
    }

    pub fn pattern(&self) -> Option<PatternId> {
        self.pattern
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn roles(&self) -> &[SymbolRole] {
        &self.roles
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowKind {
    New,
    /// `occurrence` counts from 1 and separates repeated uses of one pattern.
    Old {
        pattern: PatternId,
        occurrence: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    kind: RowKind,
    source: Arc<RowSource>,
}

impl Row {
    pub fn new_row(source: Arc<RowSource>) -> Self {
        Row {
            kind: RowKind::New,
            source,
        }
    }

    pub fn old_row(source: Arc<RowSource>, occurrence: u32) -> Self {
        let pattern = source.pattern.expect("old rows come from stored patterns");
        Row {
            kind: RowKind::Old {
                pattern,
                occurrence,
            },
            source,
        }
    }

    pub fn kind(&self) -> RowKind {
        self.kind
    }

    pub fn pattern(&self) -> Option<PatternId> {
        match self.kind {
            RowKind::New => None,
            RowKind::Old { pattern, .. } => Some(pattern),
        }
    }

    pub fn is_new(&self) -> bool {
        self.kind == RowKind::New
    }

    pub fn source(&self) -> &Arc<RowSource> {
        &self.source
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.source.symbols
    }

    pub fn roles(&self) -> &[SymbolRole] {
        &self.source.roles
    }

    pub fn names(&self) -> &[String] {
        &self.source.names
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    /// Label with an occurrence suffix for repeated patterns, e.g. `male~2`.
    pub fn display_label(&self) -> String {
        match self.kind {
            RowKind::Old { occurrence, .. } if occurrence > 1 => {
                format!("{}~{}", self.source.label, occurrence)
            }
            _ => self.source.label.clone(),
        }
    }
}

/// A (row, position) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entry {
    pub row: usize,
    pub pos: usize,
}

/// Matched occurrences unified into one column. Entries are sorted by row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Column {
    symbol: Symbol,
    entries: Vec<Entry>,
}

impl Column {
    pub fn new(symbol: Symbol, mut entries: Vec<Entry>) -> Self {
        entries.sort();
        Column { symbol, entries }
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn contains_new(&self) -> bool {
        // row 0 is always New and entries are sorted
        self.entries.first().is_some_and(|e| e.row == 0)
    }
}

/// Structural identity used to deduplicate alignments reached along different paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlignmentKey {
    rows: Vec<Option<PatternId>>,
    columns: Vec<Vec<(u32, u32)>>,
}

/// One New row plus Old rows, with matched occurrences arranged in ordered columns.
///
/// Values are kept in canonical form: row 0 is New, Old rows are sorted by
/// pattern and match signature, and `columns` is a deterministic topological
/// order of the column constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiAlignment {
    rows: Vec<Row>,
    columns: Vec<Column>,
}

/// A broken alignment invariant, as reported by [`MultiAlignment::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NewRow(String),
    Column { column: usize, reason: String },
    SharedOccurrence(Entry),
    Order { row: usize },
    Participation { row: usize },
    Disconnected { row: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NewRow(m) => write!(f, "new row: {m}"),
            Violation::Column { column, reason } => write!(f, "column {column}: {reason}"),
            Violation::SharedOccurrence(e) => {
                write!(f, "occurrence ({}, {}) is in two columns", e.row, e.pos)
            }
            Violation::Order { row } => write!(f, "row {row} crosses column order"),
            Violation::Participation { row } => write!(f, "row {row} is in no column"),
            Violation::Disconnected { row } => write!(f, "row {row} is not connected to New"),
        }
    }
}

impl MultiAlignment {
    /// The New row on its own. Not a valid alignment; used as the search seed.
    pub fn seed(new: Arc<RowSource>) -> Self {
        MultiAlignment {
            rows: vec![Row::new_row(new)],
            columns: Vec::new(),
        }
    }

    /// Builds the canonical alignment for the given rows and (unordered) columns.
    /// `rows[0]` must be the New row. Returns `None` when the columns cannot be
    /// ordered without crossing some row.
    pub fn from_parts(rows: Vec<Row>, columns: Vec<Column>) -> Option<Self> {
        canonicalize(rows, columns)
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Columns in left-to-right order.
    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn new_row(&self) -> &Row {
        &self.rows[0]
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    /// Column index for every occurrence, row by row.
    pub fn column_map(&self) -> Vec<Vec<Option<usize>>> {
        let mut map: Vec<Vec<Option<usize>>> =
            self.rows.iter().map(|r| vec![None; r.len()]).collect();
        for (ci, c) in self.columns.iter().enumerate() {
            for e in &c.entries {
                if let Some(slot) = map.get_mut(e.row).and_then(|r| r.get_mut(e.pos)) {
                    *slot = Some(ci);
                }
            }
        }
        map
    }

    /// Sorted positions of New occurrences that sit in some column.
    pub fn matched_new_positions(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .columns
            .iter()
            .flat_map(|c| c.entries.iter())
            .filter(|e| e.row == 0)
            .map(|e| e.pos)
            .collect();
        v.sort_unstable();
        v
    }

    /// Pattern ids of the Old rows, ascending (repeats included).
    pub fn sorted_pattern_ids(&self) -> Vec<PatternId> {
        let mut v: Vec<PatternId> = self.rows.iter().filter_map(Row::pattern).collect();
        v.sort_unstable();
        v
    }

    pub fn uses_of(&self, pattern: PatternId) -> usize {
        self.rows
            .iter()
            .filter(|r| r.pattern() == Some(pattern))
            .count()
    }

    pub fn key(&self) -> AlignmentKey {
        AlignmentKey {
            rows: self.rows.iter().map(Row::pattern).collect(),
            columns: self
                .columns
                .iter()
                .map(|c| {
                    c.entries
                        .iter()
                        .map(|e| (e.row as u32, e.pos as u32))
                        .collect()
                })
                .collect(),
        }
    }

    /// The alignment with Old row `row` taken out. Its entries leave their
    /// columns, and columns left with fewer than two entries (or Old-only
    /// columns that lost a partner) disappear. `None` if the result cannot be
    /// ordered.
    pub fn without_row(&self, row: usize) -> Option<Self> {
        assert!(
            row > 0 && row < self.rows.len(),
            "only Old rows can be removed"
        );
        let mut rows = self.rows.clone();
        rows.remove(row);
        let shift = |r: usize| if r > row { r - 1 } else { r };
        let columns = self
            .columns
            .iter()
            .filter_map(|c| {
                let entries: Vec<Entry> = c
                    .entries
                    .iter()
                    .filter(|e| e.row != row)
                    .map(|e| Entry {
                        row: shift(e.row),
                        pos: e.pos,
                    })
                    .collect();
                let keep =
                    entries.len() >= 2 && (entries.len() == c.entries.len() || c.contains_new());
                keep.then(|| Column::new(c.symbol, entries))
            })
            .collect();
        canonicalize(rows, columns)
    }

    /// Checks every structural invariant against the stored column order.
    pub fn validate(&self) -> Result<(), Violation> {
        validate(self)
    }
}

fn validate(a: &MultiAlignment) -> Result<(), Violation> {
    let rows = &a.rows;
    match rows.first() {
        Some(r) if r.is_new() => {}
        _ => return Err(Violation::NewRow("row 0 must be New".into())),
    }
    if rows.iter().skip(1).any(Row::is_new) {
        return Err(Violation::NewRow("more than one New row".into()));
    }

    let mut owner: Vec<Vec<Option<usize>>> = rows.iter().map(|r| vec![None; r.len()]).collect();
    for (ci, col) in a.columns.iter().enumerate() {
        let bad = |reason: String| Violation::Column { column: ci, reason };
        if col.entries.len() < 2 {
            return Err(bad("fewer than two entries".into()));
        }
        let mut seen_rows = BTreeSet::new();
        let mut seen_patterns = BTreeSet::new();
        let mut has_new = false;
        for e in &col.entries {
            let row = rows
                .get(e.row)
                .ok_or_else(|| bad(format!("row {} out of range", e.row)))?;
            let sym = *row
                .symbols()
                .get(e.pos)
                .ok_or_else(|| bad(format!("position {} out of range in row {}", e.pos, e.row)))?;
            if sym != col.symbol {
                return Err(bad(format!("row {} holds a different symbol", e.row)));
            }
            if !seen_rows.insert(e.row) {
                return Err(bad(format!("row {} appears twice", e.row)));
            }
            match row.pattern() {
                None => has_new = true,
                Some(p) => {
                    if !seen_patterns.insert(p) {
                        return Err(bad(format!("pattern {p} matched against itself")));
                    }
                }
            }
            let slot = &mut owner[e.row][e.pos];
            if slot.is_some() {
                return Err(Violation::SharedOccurrence(*e));
            }
            *slot = Some(ci);
        }
        if !has_new && col.entries.len() != 2 {
            return Err(bad("a column without New must pair exactly two rows".into()));
        }
    }

    for (ri, row_owner) in owner.iter().enumerate() {
        let cols: Vec<usize> = row_owner.iter().flatten().copied().collect();
        if cols.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Violation::Order { row: ri });
        }
        if ri > 0 && cols.is_empty() {
            return Err(Violation::Participation { row: ri });
        }
    }

    // union-find over rows, with columns as hyperedges
    let mut parent: Vec<usize> = (0..rows.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for col in &a.columns {
        let first = col.entries[0].row;
        for e in &col.entries[1..] {
            let (x, y) = (find(&mut parent, first), find(&mut parent, e.row));
            parent[x] = y;
        }
    }
    let root = find(&mut parent, 0);
    for ri in 1..rows.len() {
        if find(&mut parent, ri) != root {
            return Err(Violation::Disconnected { row: ri });
        }
    }
    Ok(())
}

type Signature = Vec<(usize, Vec<(u32, usize)>)>;

fn row_signature(rows: &[Row], columns: &[Column], ri: usize) -> Signature {
    let pkey = |r: usize| rows[r].pattern().map_or(0, |p| p.0 + 1);
    let mut sig: Signature = columns
        .iter()
        .filter_map(|c| {
            let mine = c.entries.iter().find(|e| e.row == ri)?;
            let mut partners: Vec<(u32, usize)> = c
                .entries
                .iter()
                .filter(|e| e.row != ri)
                .map(|e| (pkey(e.row), e.pos))
                .collect();
            partners.sort_unstable();
            Some((mine.pos, partners))
        })
        .collect();
    sig.sort();
    sig
}

fn canonicalize(rows: Vec<Row>, columns: Vec<Column>) -> Option<MultiAlignment> {
    debug_assert!(rows.first().is_some_and(Row::is_new));

    // canonical row order: New, then by (pattern, signature)
    let mut order: Vec<(PatternId, Signature, usize)> = (1..rows.len())
        .map(|ri| {
            (
                rows[ri].pattern().expect("old row"),
                row_signature(&rows, &columns, ri),
                ri,
            )
        })
        .collect();
    order.sort();
    let mut remap = vec![0usize; rows.len()];
    let mut new_rows = Vec::with_capacity(rows.len());
    new_rows.push(rows[0].clone());
    let mut uses: HashMap<PatternId, u32> = HashMap::new();
    for (new_index, (pattern, _, old_index)) in order.iter().enumerate() {
        remap[*old_index] = new_index + 1;
        let n = uses.entry(*pattern).or_insert(0);
        *n += 1;
        new_rows.push(Row::old_row(rows[*old_index].source.clone(), *n));
    }

    let columns: Vec<Column> = columns
        .into_iter()
        .map(|c| {
            let entries = c
                .entries
                .iter()
                .map(|e| Entry {
                    row: remap[e.row],
                    pos: e.pos,
                })
                .collect();
            Column::new(c.symbol, entries)
        })
        .collect();

    let ordered = order_columns(&new_rows, columns)?;
    Some(MultiAlignment {
        rows: new_rows,
        columns: ordered,
    })
}

/// Kahn's algorithm over "earlier in the same row" constraints; among ready
/// columns the one with the smallest first entry goes first.
fn order_columns(rows: &[Row], columns: Vec<Column>) -> Option<Vec<Column>> {
    let n = columns.len();
    let mut per_row: Vec<Vec<(usize, usize)>> = vec![Vec::new(); rows.len()];
    for (ci, c) in columns.iter().enumerate() {
        for e in &c.entries {
            per_row[e.row].push((e.pos, ci));
        }
    }
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for list in &mut per_row {
        list.sort_unstable();
        for w in list.windows(2) {
            if w[0].0 == w[1].0 {
                return None;
            }
            succ[w[0].1].push(w[1].1);
            indeg[w[1].1] += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<(Entry, usize)>> = (0..n)
        .filter(|&c| indeg[c] == 0)
        .map(|c| Reverse((columns[c].entries[0], c)))
        .collect();
    let mut out_order = Vec::with_capacity(n);
    while let Some(Reverse((_, c))) = ready.pop() {
        out_order.push(c);
        for &s in &succ[c] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(Reverse((columns[s].entries[0], s)));
            }
        }
    }
    if out_order.len() != n {
        return None;
    }
    let mut slots: Vec<Option<Column>> = columns.into_iter().map(Some).collect();
    Some(
        out_order
            .into_iter()
            .map(|c| slots[c].take().expect("each column emitted once"))
            .collect(),
    )
}
