//! Multiple alignment of a New pattern against the Old store.

mod alignment;
mod hits;
mod oracle;
mod render;
mod score;
mod search;

pub use alignment::{
    AlignmentKey, Column, Entry, MultiAlignment, Row, RowKind, RowSource, Violation,
};
pub use hits::{pairwise_align, BaseGraph, BaseSlot, Hit, HitSequence};
pub use oracle::{brute_force_best, OracleLimits, OracleResult};
pub use render::render_alignment;
pub use score::{score_alignment, Score};
pub use search::{
    build_alignments, extend_alignment, is_dominated, rank_order, Aligner, RankedAlignment,
    Rejection, SearchOutcome,
};

use serde::Serialize;

use crate::error::{Error, Result};

/// Search knobs. Every field must be positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchParams {
    pub beam_width: usize,
    /// Total rows, New included.
    pub max_rows: usize,
    pub max_pattern_reuse: usize,
    pub top_k_reported: usize,
    pub max_iterations: usize,
    /// Expand beam members on the rayon pool. Output is identical either way.
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            beam_width: 200,
            max_rows: 20,
            max_pattern_reuse: 3,
            top_k_reported: 10,
            max_iterations: 12,
            parallel: true,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("beam_width", self.beam_width),
            ("max_rows", self.max_rows),
            ("max_pattern_reuse", self.max_pattern_reuse),
            ("top_k_reported", self.top_k_reported),
            ("max_iterations", self.max_iterations),
        ];
        for (name, v) in fields {
            if v == 0 {
                return Err(Error::InvalidParameter(name));
            }
        }
        Ok(())
    }
}
