use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use log::debug;
use rayon::prelude::*;

use crate::align::alignment::{
    AlignmentKey, Column, Entry, MultiAlignment, Row, RowSource, Violation,
};
use crate::align::hits::{BaseGraph, BaseSlot, HitSequence};
use crate::align::score::{score_alignment, Score};
use crate::align::SearchParams;
use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::pattern::PatternId;
use crate::query::Query;
use crate::store::KnowledgeStore;

/// Why a candidate extension was dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    NoHits,
    RowLimit,
    ReuseLimit,
    Crossing,
    Invalid(Violation),
}

/// Adds `candidate` as a new row, turning each hit into a column entry.
pub fn extend_alignment(
    current: &MultiAlignment,
    hits: &HitSequence,
    candidate: Arc<RowSource>,
    params: &SearchParams,
) -> std::result::Result<MultiAlignment, Rejection> {
    if hits.hits.is_empty() {
        return Err(Rejection::NoHits);
    }
    if current.row_count() >= params.max_rows {
        return Err(Rejection::RowLimit);
    }
    let pattern = candidate.pattern().expect("candidates are stored patterns");
    let uses = current.uses_of(pattern);
    if uses >= params.max_pattern_reuse {
        return Err(Rejection::ReuseLimit);
    }
    let new_row = current.row_count();
    let mut rows: Vec<Row> = current.rows().to_vec();
    rows.push(Row::old_row(candidate.clone(), uses as u32 + 1));
    let mut columns: Vec<Column> = current.columns().to_vec();
    for hit in &hits.hits {
        let here = Entry {
            row: new_row,
            pos: hit.candidate_pos,
        };
        match hit.slot {
            BaseSlot::Column(ci) => {
                let c = &columns[ci];
                let mut entries = c.entries().to_vec();
                entries.push(here);
                columns[ci] = Column::new(c.symbol(), entries);
            }
            BaseSlot::Free(e) => {
                let sym = candidate.symbols()[hit.candidate_pos];
                columns.push(Column::new(sym, vec![e, here]));
            }
        }
    }
    let a = MultiAlignment::from_parts(rows, columns).ok_or(Rejection::Crossing)?;
    a.validate().map_err(Rejection::Invalid)?;
    Ok(a)
}

#[derive(Debug, Clone)]
pub struct RankedAlignment {
    pub alignment: MultiAlignment,
    pub score: Score,
}

#[derive(Debug, Clone)]
struct Scored {
    alignment: MultiAlignment,
    score: Score,
    key: AlignmentKey,
    patterns: Vec<PatternId>,
}

impl Scored {
    fn new(alignment: MultiAlignment, costs: &CostModel) -> Self {
        Scored {
            score: score_alignment(&alignment, costs),
            key: alignment.key(),
            patterns: alignment.sorted_pattern_ids(),
            alignment,
        }
    }
}

/// Higher cd first; then more columns, fewer rows, smaller pattern list, and
/// finally the structural key so the order is total.
fn compare(a: &Scored, b: &Scored) -> Ordering {
    b.score
        .cd
        .total_cmp(&a.score.cd)
        .then_with(|| b.alignment.column_count().cmp(&a.alignment.column_count()))
        .then_with(|| a.alignment.row_count().cmp(&b.alignment.row_count()))
        .then_with(|| a.patterns.cmp(&b.patterns))
        .then_with(|| a.key.cmp(&b.key))
}

/// The ranking used for beams and reports, exposed for callers that merge lists.
pub fn rank_order(a: &RankedAlignment, b: &RankedAlignment) -> Ordering {
    let wrap = |r: &RankedAlignment| Scored {
        alignment: r.alignment.clone(),
        score: r.score,
        key: r.alignment.key(),
        patterns: r.alignment.sorted_pattern_ids(),
    };
    compare(&wrap(a), &wrap(b))
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Best alignments with cd > 0, best first, at most `top_k_reported`.
    pub ranked: Vec<RankedAlignment>,
    pub iterations: usize,
    /// Distinct valid alignments scored during the search.
    pub explored: usize,
}

/// Beam search over alignments for one sealed store.
pub struct Aligner<'a> {
    store: &'a KnowledgeStore,
    costs: &'a CostModel,
    params: SearchParams,
    sources: Vec<Arc<RowSource>>,
}

impl<'a> Aligner<'a> {
    pub fn new(
        store: &'a KnowledgeStore,
        costs: &'a CostModel,
        params: SearchParams,
    ) -> Result<Self> {
        if !store.is_sealed() {
            return Err(Error::NotSealed);
        }
        params.validate()?;
        let sources = store
            .patterns()
            .iter()
            .map(|p| Arc::new(RowSource::from_pattern(store, p)))
            .collect();
        Ok(Aligner {
            store,
            costs,
            params,
            sources,
        })
    }

    pub fn params(&self) -> &SearchParams {
        &self.params
    }

    fn expand(&self, base: &MultiAlignment) -> Vec<MultiAlignment> {
        if base.row_count() >= self.params.max_rows {
            return Vec::new();
        }
        let graph = BaseGraph::new(base);
        let mut candidates: Vec<PatternId> = graph
            .open_symbols()
            .flat_map(|s| self.store.patterns_with(s).iter().copied())
            .collect();
        candidates.sort_unstable();
        candidates.dedup();

        let mut out = Vec::new();
        for pid in candidates {
            if base.uses_of(pid) >= self.params.max_pattern_reuse {
                continue;
            }
            let pattern = self.store.pattern(pid);
            for hits in graph.hits(pid, pattern.symbols(), self.costs, self.params.beam_width) {
                match extend_alignment(base, &hits, self.sources[pid.index()].clone(), &self.params)
                {
                    Ok(a) => out.push(a),
                    Err(why) => debug!("dropped extension with {pid}: {why:?}"),
                }
            }
        }
        out
    }

    pub fn run(&self, query: &Query) -> SearchOutcome {
        let seed = MultiAlignment::seed(Arc::new(RowSource::from_query(query)));
        let mut beam = vec![seed];
        let mut seen: HashSet<AlignmentKey> = HashSet::new();
        let mut pool: Vec<Scored> = Vec::new();
        let mut iterations = 0;

        while iterations < self.params.max_iterations {
            let batches: Vec<Vec<MultiAlignment>> = if self.params.parallel {
                beam.par_iter().map(|b| self.expand(b)).collect()
            } else {
                beam.iter().map(|b| self.expand(b)).collect()
            };
            iterations += 1;

            let mut fresh: Vec<Scored> = Vec::new();
            for a in batches.into_iter().flatten() {
                let key = a.key();
                if seen.insert(key) {
                    fresh.push(Scored::new(a, self.costs));
                }
            }
            if fresh.is_empty() {
                break;
            }
            fresh.sort_by(compare);
            beam = fresh
                .iter()
                .take(self.params.beam_width)
                .map(|s| s.alignment.clone())
                .collect();
            pool.extend(fresh);
        }

        let explored = pool.len();
        pool.retain(|s| s.score.cd > 0.0);
        pool.sort_by(compare);
        // earlier entries of the same coverage, as (cd, sorted pattern ids)
        let mut seen_by_coverage: HashMap<Vec<usize>, Vec<(f64, Vec<PatternId>)>> = HashMap::new();
        let mut ranked = Vec::new();
        for s in pool {
            if ranked.len() == self.params.top_k_reported {
                break;
            }
            let earlier = seen_by_coverage
                .entry(s.alignment.matched_new_positions())
                .or_default();
            let covered_by_fewer_rows = earlier
                .iter()
                .any(|(cd, pats)| *cd > s.score.cd && is_sub_multiset(pats, &s.patterns));
            earlier.push((s.score.cd, s.patterns.clone()));
            if covered_by_fewer_rows || is_dominated(&s.alignment, s.score, self.costs) {
                debug!("dropped dominated alignment {:?}", s.key);
                continue;
            }
            ranked.push(s);
        }
        SearchOutcome {
            ranked: ranked
                .into_iter()
                .map(|s| RankedAlignment {
                    alignment: s.alignment,
                    score: s.score,
                })
                .collect(),
            iterations,
            explored,
        }
    }
}

/// Both slices sorted; true when `small` is a strict sub-multiset of `big`.
fn is_sub_multiset(small: &[PatternId], big: &[PatternId]) -> bool {
    if small.len() >= big.len() {
        return false;
    }
    let mut it = big.iter();
    small.iter().all(|p| it.by_ref().any(|q| q == p))
}

/// True when dropping a single Old row leaves a valid alignment that covers
/// the same New occurrences with strictly higher cd. Such a row encodes
/// nothing of New and only costs bits, so the alignment is never reported.
pub fn is_dominated(a: &MultiAlignment, score: Score, costs: &CostModel) -> bool {
    let covered = a.matched_new_positions();
    (1..a.row_count()).any(|r| {
        a.without_row(r).is_some_and(|b| {
            b.validate().is_ok()
                && b.matched_new_positions() == covered
                && score_alignment(&b, costs).cd > score.cd
        })
    })
}

/// Ranked alignments with cd > 0, best first. Empty when nothing compresses.
pub fn build_alignments(
    store: &KnowledgeStore,
    costs: &CostModel,
    query: &Query,
    params: &SearchParams,
) -> Result<Vec<RankedAlignment>> {
    Ok(Aligner::new(store, costs, params.clone())?
        .run(query)
        .ranked)
}
