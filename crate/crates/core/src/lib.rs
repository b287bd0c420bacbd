//! A pattern-based knowledge engine.
//!
//! Knowledge is a store of flat symbol patterns with frequencies. A query (the
//! New pattern) is answered by building multiple alignments against the store
//! that minimise encoding cost. The best alignments give recognition, inherited
//! attributes and probabilistic inferences.
//!
//! ```
//! use patternkb::{build_alignments, parse_kb_str, parse_new, SearchParams};
//!
//! let mut kb = parse_kb_str("doctor: %D doctor stethoscope black-bag ;\n", "kb.sp").unwrap();
//! let costs = kb.seal_and_build_costs().unwrap();
//! let q = parse_new("doctor stethoscope", &kb).unwrap();
//! let ranked = build_alignments(&kb, &costs, &q, &SearchParams::default()).unwrap();
//! assert!(ranked[0].score.cd > 0.0);
//! ```

pub mod align;
pub mod cost;
pub mod error;
pub mod format;
pub mod inference;
pub mod pattern;
pub mod query;
pub mod store;
pub mod symbol;

pub use align::{
    brute_force_best, build_alignments, render_alignment, score_alignment, Aligner, MultiAlignment,
    OracleLimits, OracleResult, RankedAlignment, Score, SearchOutcome, SearchParams,
};
pub use cost::CostModel;
pub use error::{Error, Result};
pub use format::{
    emit_report, load_kb, parse_kb_str, parse_new, serialize_store, OutputFormat, Report,
    ReportKind,
};
pub use inference::{
    analyze, extract_inferences, group_by_coverage, inference_probability, inferred_symbols,
    recognize, relative_probabilities, CoverageGroup, Inference, Membership, ProbabilityReport,
};
pub use pattern::{Pattern, PatternId, RawToken};
pub use query::Query;
pub use store::KnowledgeStore;
pub use symbol::{Symbol, SymbolRole, SymbolTable};
