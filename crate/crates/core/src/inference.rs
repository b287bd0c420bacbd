//! Inferences, coverage groups and probabilities drawn from ranked alignments.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::align::{MultiAlignment, RankedAlignment, Score};
use crate::pattern::{boundary_pairs, PatternId};

/// The boundary pair around an inferred run, e.g. `voice ... #voice`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Context {
    pub open: String,
    pub close: String,
    /// Both ends of the pair sit in columns.
    pub matched: bool,
}

/// A run of Old contents occurrences that New does not account for.
///
/// Boundary markers and identification symbols delimit runs and are never
/// part of one. An occurrence in a column without New is still inferred: it
/// was matched only between Old rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inference {
    pub row: usize,
    pub pattern: PatternId,
    pub label: String,
    pub positions: Vec<usize>,
    pub names: Vec<String>,
    pub context: Option<Context>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Cell {
    Free,
    OldOnly,
    WithNew,
}

pub fn extract_inferences(a: &MultiAlignment) -> Vec<Inference> {
    let map = a.column_map();
    let with_new: Vec<bool> = a.columns().iter().map(|c| c.contains_new()).collect();
    let mut out = Vec::new();
    for (ri, row) in a.rows().iter().enumerate().skip(1) {
        let Some(pattern) = row.pattern() else {
            continue;
        };
        let names = row.names();
        let pairs = boundary_pairs(names);
        let mut is_boundary = vec![false; names.len()];
        for &(o, c) in &pairs {
            is_boundary[o] = true;
            is_boundary[c] = true;
        }
        let cells: Vec<Cell> = map[ri]
            .iter()
            .map(|c| match c {
                None => Cell::Free,
                Some(ci) if with_new[*ci] => Cell::WithNew,
                Some(_) => Cell::OldOnly,
            })
            .collect();
        let inferable = |pos: usize| {
            !row.roles()[pos].is_id() && !is_boundary[pos] && cells[pos] != Cell::WithNew
        };

        let mut pos = 0;
        while pos < names.len() {
            if !inferable(pos) {
                pos += 1;
                continue;
            }
            let start = pos;
            pos += 1;
            // an Old-Old match is its own run
            if cells[start] == Cell::Free {
                while pos < names.len() && inferable(pos) && cells[pos] == Cell::Free {
                    pos += 1;
                }
            }
            let end = pos - 1;
            let context = pairs
                .iter()
                .filter(|&&(o, c)| o < start && c > end)
                .max_by_key(|&&(o, _)| o)
                .map(|&(o, c)| Context {
                    open: names[o].clone(),
                    close: names[c].clone(),
                    matched: map[ri][o].is_some() && map[ri][c].is_some(),
                });
            out.push(Inference {
                row: ri,
                pattern,
                label: row.display_label(),
                positions: (start..=end).collect(),
                names: names[start..=end].to_vec(),
                context,
            });
        }
    }
    out
}

/// Distinct inferred symbol names of one alignment.
pub fn inferred_symbols(a: &MultiAlignment) -> BTreeSet<String> {
    extract_inferences(a)
        .into_iter()
        .flat_map(|i| i.names)
        .collect()
}

/// Alignments that match exactly the same New positions.
#[derive(Debug, Clone)]
pub struct CoverageGroup {
    pub covered: Vec<usize>,
    /// In rank order, best first.
    pub members: Vec<RankedAlignment>,
}

impl CoverageGroup {
    pub fn best_score(&self) -> Score {
        self.members[0].score
    }
}

/// Partitions ranked alignments by coverage. Groups keep the order in which
/// their best member appears in `ranked`, which must already be ranked.
pub fn group_by_coverage(ranked: &[RankedAlignment]) -> Vec<CoverageGroup> {
    let mut groups: Vec<CoverageGroup> = Vec::new();
    for r in ranked {
        let covered = r.alignment.matched_new_positions();
        match groups.iter_mut().find(|g| g.covered == covered) {
            Some(g) => g.members.push(r.clone()),
            None => groups.push(CoverageGroup {
                covered,
                members: vec![r.clone()],
            }),
        }
    }
    groups
}

/// `2^-b_e` normalised over the group, in member order.
///
/// Weights are taken relative to the smallest `b_e` so that large costs do
/// not underflow.
pub fn relative_probabilities(g: &CoverageGroup) -> Vec<f64> {
    let min = g
        .members
        .iter()
        .map(|m| m.score.b_e)
        .fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = g
        .members
        .iter()
        .map(|m| (min - m.score.b_e).exp2())
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total).collect()
}

/// For each inferred symbol, the summed `p_rel` of the members that infer it.
pub fn inference_probability(g: &CoverageGroup, p_rel: &[f64]) -> BTreeMap<String, f64> {
    let mut p_inf: BTreeMap<String, f64> = BTreeMap::new();
    for (m, &p) in g.members.iter().zip(p_rel) {
        for name in inferred_symbols(&m.alignment) {
            *p_inf.entry(name).or_insert(0.0) += p;
        }
    }
    for v in p_inf.values_mut() {
        *v = v.min(1.0);
    }
    p_inf
}

/// Probabilities for one coverage group.
#[derive(Debug, Clone)]
pub struct ProbabilityReport {
    pub group: CoverageGroup,
    pub p_rel: Vec<f64>,
    pub p_inf: BTreeMap<String, f64>,
    /// Inferences of each member, in member order.
    pub inferences: Vec<Vec<Inference>>,
}

/// Groups `ranked` by coverage and computes every group's probabilities.
pub fn analyze(ranked: &[RankedAlignment]) -> Vec<ProbabilityReport> {
    group_by_coverage(ranked)
        .into_iter()
        .map(|group| {
            let p_rel = relative_probabilities(&group);
            let p_inf = inference_probability(&group, &p_rel);
            let inferences = group
                .members
                .iter()
                .map(|m| extract_inferences(&m.alignment))
                .collect();
            ProbabilityReport {
                group,
                p_rel,
                p_inf,
                inferences,
            }
        })
        .collect()
}

/// One Old row of a recognition readout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub row: usize,
    pub pattern: PatternId,
    pub label: String,
    pub matched: usize,
    pub length: usize,
}

/// Every Old row with its matched-occurrence count, in row order.
pub fn recognize(a: &MultiAlignment) -> Vec<Membership> {
    let map = a.column_map();
    a.rows()
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(ri, row)| {
            Some(Membership {
                row: ri,
                pattern: row.pattern()?,
                label: row.display_label(),
                matched: map[ri].iter().filter(|c| c.is_some()).count(),
                length: row.len(),
            })
        })
        .collect()
}
