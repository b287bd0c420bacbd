//! Pattern files, New parsing and report documents.

mod pattern_file;
mod report;

pub use pattern_file::{load_kb, parse_kb_str, parse_new, serialize_store};
pub use report::{
    emit_report, fixed, fixed_number, report_json, OutputFormat, Report, ReportKind, NO_ALIGNMENT,
};
