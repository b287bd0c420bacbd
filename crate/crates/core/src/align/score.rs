use serde::Serialize;

use crate::align::alignment::MultiAlignment;
use crate::cost::CostModel;

/// Compression score of an alignment, in bits.
///
/// `b_n` is the cost of the New occurrences that sit in a column, `b_e` the
/// cost of the Old rows' identification occurrences that sit in none, and
/// `cd = b_n - b_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Score {
    pub b_n: f64,
    pub b_e: f64,
    pub cd: f64,
}

/// Sums are taken in a fixed order (New positions ascending; unmatched
/// identifiers by symbol id) so alignments with the same coverage and the
/// same unmatched identifiers score bit-identically.
pub fn score_alignment(a: &MultiAlignment, costs: &CostModel) -> Score {
    let map = a.column_map();
    let new = a.new_row();
    let b_n: f64 = map[0]
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_some())
        .map(|(pos, _)| costs.cost(new.symbols()[pos]))
        .sum();

    let mut unmatched_ids: Vec<_> = a
        .rows()
        .iter()
        .zip(&map)
        .skip(1)
        .flat_map(|(row, cols)| {
            row.symbols()
                .iter()
                .zip(row.roles())
                .zip(cols)
                .filter(|((_, role), col)| role.is_id() && col.is_none())
                .map(|((&s, _), _)| s)
        })
        .collect();
    unmatched_ids.sort_unstable();
    let b_e: f64 = unmatched_ids.iter().map(|&s| costs.cost(s)).sum();

    Score {
        b_n,
        b_e,
        cd: b_n - b_e,
    }
}
