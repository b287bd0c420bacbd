//! Knowledge-base fixtures shared by the benchmarks.

/// The Jack Jones store in pattern-file form.
pub const JACK_KB: &str = include_str!("../../core/tests/data/jack.sp");

/// The New pattern that goes with [`JACK_KB`].
pub const JACK_NEW: &str = "Jack stethoscope black-bag fair-hair blue-eyes Dorking";

/// `n` disjoint copies of the Jack Jones store; copy `i` suffixes every
/// symbol and label with `_i`.
pub fn family_kb(n: usize) -> String {
    let mut out = String::new();
    for i in 0..n {
        for line in JACK_KB
            .lines()
            .filter(|l| !l.starts_with("//") && !l.trim().is_empty())
        {
            let body = line.trim_end_matches(';').trim();
            let (label, symbols) = body.split_once(':').expect("fixture records are labelled");
            out.push_str(&format!("{}_{i}:", label.trim()));
            for s in symbols.split_whitespace() {
                out.push_str(&format!(" {s}_{i}"));
            }
            out.push_str(" ;\n");
        }
    }
    out
}

/// The New pattern aimed at copy `i` of [`family_kb`].
pub fn family_new(i: usize) -> String {
    JACK_NEW
        .split_whitespace()
        .map(|s| format!("{s}_{i}"))
        .collect::<Vec<_>>()
        .join(" ")
}
