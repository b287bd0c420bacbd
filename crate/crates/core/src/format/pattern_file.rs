//! The line-oriented pattern file format.
//!
//! ```text
//! // comment
//! [label:] [freq x] sym sym ... ;
//! ```
//!
//! A leading `%` marks a token as an identification symbol. Without any `%`
//! in a record the first token is the identifier, and so is the last one
//! when it is the first one's closing twin.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pattern::RawToken;
use crate::query::Query;
use crate::store::KnowledgeStore;

struct Record<'a> {
    label: Option<&'a str>,
    frequency: u64,
    tokens: Vec<&'a str>,
}

fn syntax(file: &str, line: usize, token: &str, message: impl Into<String>) -> Error {
    Error::Syntax {
        file: file.to_owned(),
        line,
        token: token.to_owned(),
        message: message.into(),
    }
}

fn is_count(t: &str) -> bool {
    !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
}

fn parse_record<'a>(body: &'a str, file: &str, line: usize) -> Result<Record<'a>> {
    let Some(body) = body.strip_suffix(';') else {
        let last = body.split_whitespace().last().unwrap_or("");
        return Err(syntax(file, line, last, "record must end with `;`"));
    };
    let mut tokens: Vec<&str> = body.split_whitespace().collect();

    let mut label = None;
    if tokens.len() >= 2 && tokens[1] == ":" {
        label = Some(tokens[0]);
        tokens.drain(..2);
    } else if let Some(first) = tokens.first() {
        if let Some(l) = first.strip_suffix(':') {
            label = Some(l);
            tokens.remove(0);
        }
    }
    if let Some(l) = label {
        if l.is_empty() || l.contains(':') {
            return Err(syntax(file, line, l, "malformed label"));
        }
    }

    let mut frequency = 1;
    if tokens.len() >= 2 && is_count(tokens[0]) && tokens[1] == "x" {
        frequency = tokens[0]
            .parse::<u64>()
            .map_err(|_| syntax(file, line, tokens[0], "frequency out of range"))?;
        if frequency == 0 {
            return Err(syntax(
                file,
                line,
                tokens[0],
                "frequency must be at least 1",
            ));
        }
        tokens.drain(..2);
    }

    if tokens.is_empty() {
        return Err(syntax(file, line, ";", "record has no symbols"));
    }
    for (i, t) in tokens.iter().enumerate() {
        if t.contains(';') || t.contains(':') {
            return Err(syntax(file, line, t, "`;` and `:` are reserved"));
        }
        if *t == "%" {
            return Err(syntax(file, line, t, "`%` marker without a symbol"));
        }
        if is_count(t) && tokens.get(i + 1) == Some(&"x") {
            return Err(syntax(
                file,
                line,
                t,
                "frequency prefix must precede the symbols",
            ));
        }
    }
    Ok(Record {
        label,
        frequency,
        tokens,
    })
}

/// Parses pattern-file text into a sealed store.
///
/// Every malformed line contributes one diagnostic; when there are several
/// they come back together as [`Error::Diagnostics`]. `file` only labels
/// diagnostics.
pub fn parse_kb_str(text: &str, file: &str) -> Result<KnowledgeStore> {
    let mut store = KnowledgeStore::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with("//") {
            continue;
        }
        let rec = match parse_record(body, file, line) {
            Ok(r) => r,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        let tokens: Vec<RawToken> = rec
            .tokens
            .iter()
            .map(|t| RawToken::from_marked(t))
            .collect();
        if let Err(e) = store.add_pattern(&tokens, rec.frequency, rec.label) {
            let token = match &e {
                Error::Validation { index, .. } => rec.tokens.get(*index).copied().unwrap_or(""),
                Error::DuplicateLabel(l) => l.as_str(),
                Error::InvalidToken { token, .. } => token.as_str(),
                _ => "",
            };
            errors.push(syntax(file, line, token, e.to_string()));
        }
    }
    match errors.len() {
        0 => {}
        1 => return Err(errors.pop().unwrap()),
        _ => return Err(Error::Diagnostics(errors)),
    }
    if store.is_empty() {
        return Err(Error::EmptyStore);
    }
    store.seal_and_build_costs()?;
    Ok(store)
}

/// Reads and parses a pattern file; the store comes back sealed.
pub fn load_kb(path: impl AsRef<Path>) -> Result<KnowledgeStore> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_kb_str(&text, &path.display().to_string())
}

/// Writes the store in pattern-file form with explicit labels, frequencies
/// and `%` markers, so that [`parse_kb_str`] rebuilds an equal store.
///
/// Fails on symbol names the format cannot carry (a leading `%`, or `;`/`:`
/// inside a name, or a `<digits> x` pair).
pub fn serialize_store(store: &KnowledgeStore) -> Result<String> {
    let mut out = String::new();
    for p in store.patterns() {
        let names: Vec<&str> = p
            .symbols()
            .iter()
            .map(|&s| store.symbols().name(s))
            .collect();
        for (i, n) in names.iter().enumerate() {
            let bad = n.starts_with('%')
                || n.contains(';')
                || n.contains(':')
                || (is_count(n) && names.get(i + 1) == Some(&"x"));
            if bad {
                return Err(Error::InvalidToken {
                    token: (*n).to_owned(),
                    reason: "not representable in the pattern file format",
                });
            }
        }
        if let Some(l) = p.label() {
            write!(out, "{l}: ").unwrap();
        }
        write!(out, "{} x", p.frequency()).unwrap();
        for (n, role) in names.iter().zip(p.roles()) {
            out.push(' ');
            if role.is_id() {
                out.push('%');
            }
            out.push_str(n);
        }
        out.push_str(" ;\n");
    }
    Ok(out)
}

/// Parses New text: whitespace-separated tokens, `//` comment lines ignored,
/// an optional trailing `;` dropped. Unknown tokens become novel symbols.
pub fn parse_new(text: &str, store: &KnowledgeStore) -> Result<Query> {
    let mut tokens: Vec<&str> = text
        .lines()
        .filter(|l| !l.trim_start().starts_with("//"))
        .flat_map(str::split_whitespace)
        .collect();
    if tokens.last() == Some(&";") {
        tokens.pop();
    } else if let Some(last) = tokens.last_mut() {
        if let Some(stripped) = last.strip_suffix(';') {
            *last = stripped;
        }
    }
    Query::from_tokens(&tokens, store)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::SymbolRole;

    #[test]
    fn labels_frequencies_and_markers() {
        let s = parse_kb_str(
            "// demo\nbird: 90 x %kind bird canfly %#kind ;\nplain : a b #a ;\nc d;\n",
            "t.sp",
        )
        .unwrap();
        assert_eq!(s.len(), 3);
        let bird = &s.patterns()[0];
        assert_eq!(bird.label(), Some("bird"));
        assert_eq!(bird.frequency(), 90);
        assert_eq!(
            bird.roles(),
            [
                SymbolRole::Identification,
                SymbolRole::Contents,
                SymbolRole::Contents,
                SymbolRole::Identification
            ]
        );
        assert_eq!(s.patterns()[1].label(), Some("plain"));
        assert!(s.patterns()[1].roles()[2].is_id());
        assert_eq!(s.patterns()[2].frequency(), 1);
        assert!(s.is_sealed());
    }

    #[test]
    fn zero_frequency_is_rejected() {
        let e = parse_kb_str("a: 0 x a ;\n", "t.sp").unwrap_err();
        assert!(matches!(e, Error::Syntax { line: 1, ref token, .. } if token == "0"));
        let e = parse_kb_str("x 0 x a ;\n", "t.sp").unwrap_err();
        assert!(matches!(e, Error::Syntax { line: 1, .. }));
    }

    #[test]
    fn one_diagnostic_per_bad_line() {
        let text = "a b ;\nmissing semicolon\nok: c ;\nok: d ;\nx #y y #x ;\n";
        match parse_kb_str(text, "t.sp").unwrap_err() {
            Error::Diagnostics(errs) => {
                let lines: Vec<usize> = errs
                    .iter()
                    .map(|e| match e {
                        Error::Syntax { line, .. } => *line,
                        other => panic!("{other}"),
                    })
                    .collect();
                assert_eq!(lines, [2, 4, 5]);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn comments_only_is_empty() {
        assert_eq!(
            parse_kb_str("// nothing\n\n", "t.sp"),
            Err(Error::EmptyStore)
        );
    }

    #[test]
    fn round_trip() {
        let text = "jack1: jack1 person name Jack #name #person #jack1 ;\n3 x %k v %#k w ;\n";
        let s = parse_kb_str(text, "t.sp").unwrap();
        let again = parse_kb_str(&serialize_store(&s).unwrap(), "u.sp").unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn new_marks_unknown_tokens() {
        let s = parse_kb_str("a b ;\n", "t.sp").unwrap();
        let q = parse_new("a zzz ;", &s).unwrap();
        assert_eq!(q.len(), 2);
        assert!(!q.is_novel(0));
        assert!(q.is_novel(1));
        assert_eq!(
            parse_new("  // only a comment\n", &s),
            Err(Error::EmptyQuery)
        );
    }
}
