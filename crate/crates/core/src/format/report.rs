//! Query result documents in text and JSON form.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Number, Value};

use crate::align::{render_alignment, AlignmentKey, RankedAlignment, SearchParams};
use crate::inference::{
    analyze, extract_inferences, recognize, Inference, Membership, ProbabilityReport,
};
use crate::query::Query;

/// Marker written in place of results when nothing compresses.
pub const NO_ALIGNMENT: &str = "no alignment (cd>0) found";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Which sections a report carries besides the ranked alignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Align,
    Infer,
    Recognize,
}

/// Everything a report shows, computed once so both formats agree.
#[derive(Debug, Clone)]
pub struct Report {
    pub kind: ReportKind,
    pub query: Query,
    pub params: SearchParams,
    pub ranked: Vec<RankedAlignment>,
    pub groups: Vec<ProbabilityReport>,
}

impl Report {
    pub fn new(
        kind: ReportKind,
        query: &Query,
        params: &SearchParams,
        ranked: Vec<RankedAlignment>,
    ) -> Self {
        let groups = if kind == ReportKind::Infer {
            analyze(&ranked)
        } else {
            Vec::new()
        };
        Report {
            kind,
            query: query.clone(),
            params: params.clone(),
            ranked,
            groups,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    fn ranks(&self) -> HashMap<AlignmentKey, usize> {
        self.ranked
            .iter()
            .enumerate()
            .map(|(i, r)| (r.alignment.key(), i + 1))
            .collect()
    }
}

/// Six fractional digits, ties to even, no negative zero.
pub fn fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_owned()
    } else {
        s
    }
}

/// [`fixed`] as a JSON number.
pub fn fixed_number(x: f64) -> Value {
    Value::Number(
        fixed(x)
            .parse::<Number>()
            .expect("fixed() yields a JSON number"),
    )
}

pub fn emit_report(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => emit_text(report),
        OutputFormat::Json => {
            let mut s =
                serde_json::to_string_pretty(&report_json(report)).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

fn inference_json(i: &Inference) -> Value {
    json!({
        "row": i.row,
        "label": i.label,
        "symbols": i.names,
        "context": i.context.as_ref().map(|c| json!({
            "open": c.open,
            "close": c.close,
            "matched": c.matched,
        })),
    })
}

fn membership_json(m: &Membership) -> Value {
    json!({
        "row": m.row,
        "label": m.label,
        "matched": m.matched,
        "length": m.length,
    })
}

/// The JSON document. Object keys come out sorted.
pub fn report_json(report: &Report) -> Value {
    let mut doc = Map::new();
    doc.insert(
        "status".into(),
        json!(if report.is_empty() {
            NO_ALIGNMENT
        } else {
            "ok"
        }),
    );
    let tokens: Vec<Value> = report
        .query
        .names()
        .iter()
        .enumerate()
        .map(|(i, n)| json!({ "name": n, "novel": report.query.is_novel(i) }))
        .collect();
    doc.insert(
        "query".into(),
        json!({ "text": report.query.text(), "tokens": tokens }),
    );
    doc.insert(
        "params".into(),
        serde_json::to_value(&report.params).expect("params serialize"),
    );

    let alignments: Vec<Value> = report
        .ranked
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let a = &r.alignment;
            let rows: Vec<Value> = a
                .rows()
                .iter()
                .enumerate()
                .map(|(ri, row)| {
                    json!({
                        "row": ri,
                        "label": row.display_label(),
                        "pattern": row.pattern().map(|p| p.index()),
                        "symbols": row.names(),
                    })
                })
                .collect();
            let columns: Vec<Value> = a
                .columns()
                .iter()
                .map(|c| {
                    let e = c.entries()[0];
                    let entries: Vec<Value> =
                        c.entries().iter().map(|e| json!([e.row, e.pos])).collect();
                    json!({ "symbol": a.rows()[e.row].names()[e.pos], "entries": entries })
                })
                .collect();
            let mut block = Map::new();
            block.insert("rank".into(), json!(i + 1));
            block.insert("b_n".into(), fixed_number(r.score.b_n));
            block.insert("b_e".into(), fixed_number(r.score.b_e));
            block.insert("cd".into(), fixed_number(r.score.cd));
            block.insert("rows".into(), Value::Array(rows));
            block.insert("columns".into(), Value::Array(columns));
            match report.kind {
                ReportKind::Align => {}
                ReportKind::Infer => {
                    let inf: Vec<Value> =
                        extract_inferences(a).iter().map(inference_json).collect();
                    block.insert("inferences".into(), Value::Array(inf));
                }
                ReportKind::Recognize => {
                    let rec: Vec<Value> = recognize(a).iter().map(membership_json).collect();
                    block.insert("recognition".into(), Value::Array(rec));
                }
            }
            Value::Object(block)
        })
        .collect();
    doc.insert("alignments".into(), Value::Array(alignments));

    if report.kind == ReportKind::Infer {
        let ranks = report.ranks();
        let groups: Vec<Value> = report
            .groups
            .iter()
            .map(|g| {
                let members: Vec<Value> = g
                    .group
                    .members
                    .iter()
                    .zip(&g.p_rel)
                    .map(|(m, &p)| json!({ "rank": ranks[&m.alignment.key()], "p_rel": fixed_number(p) }))
                    .collect();
                let p_inf: Map<String, Value> =
                    g.p_inf.iter().map(|(k, &v)| (k.clone(), fixed_number(v))).collect();
                let covered: Vec<&str> = g
                    .group
                    .covered
                    .iter()
                    .map(|&p| report.query.names()[p].as_str())
                    .collect();
                json!({
                    "covered": g.group.covered,
                    "covered_symbols": covered,
                    "members": members,
                    "p_inf": p_inf,
                })
            })
            .collect();
        doc.insert("groups".into(), Value::Array(groups));
    }
    Value::Object(doc)
}

fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    let q = &report.query;
    writeln!(out, "query: {}", q.text()).unwrap();
    let novel: Vec<&str> = (0..q.len())
        .filter(|&i| q.is_novel(i))
        .map(|i| q.names()[i].as_str())
        .collect();
    if !novel.is_empty() {
        writeln!(out, "novel: {}", novel.join(" ")).unwrap();
    }
    let p = &report.params;
    writeln!(
        out,
        "params: beam={} max-rows={} reuse={} top={} iterations={}",
        p.beam_width, p.max_rows, p.max_pattern_reuse, p.top_k_reported, p.max_iterations
    )
    .unwrap();
    if report.is_empty() {
        writeln!(out, "\n{NO_ALIGNMENT}").unwrap();
        return out;
    }

    for (i, r) in report.ranked.iter().enumerate() {
        let s = r.score;
        writeln!(
            out,
            "\nalignment {}  cd={}  b_n={}  b_e={}",
            i + 1,
            fixed(s.cd),
            fixed(s.b_n),
            fixed(s.b_e)
        )
        .unwrap();
        out.push_str(&render_alignment(&r.alignment));
        match report.kind {
            ReportKind::Align => {}
            ReportKind::Infer => {
                let inf = extract_inferences(&r.alignment);
                if !inf.is_empty() {
                    out.push_str("inferences:\n");
                }
                for i in inf {
                    write!(out, "  {}: {}", i.label, i.names.join(" ")).unwrap();
                    if let Some(c) = &i.context {
                        write!(out, "  [{} ... {}]", c.open, c.close).unwrap();
                    }
                    out.push('\n');
                }
            }
            ReportKind::Recognize => {
                out.push_str("recognition:\n");
                for m in recognize(&r.alignment) {
                    writeln!(out, "  {}  matched {}/{}", m.label, m.matched, m.length).unwrap();
                }
            }
        }
    }

    if report.kind == ReportKind::Infer {
        let ranks = report.ranks();
        for (gi, g) in report.groups.iter().enumerate() {
            let covered: Vec<&str> = g
                .group
                .covered
                .iter()
                .map(|&p| q.names()[p].as_str())
                .collect();
            writeln!(out, "\ngroup {}  covered: {}", gi + 1, covered.join(" ")).unwrap();
            for (m, &pr) in g.group.members.iter().zip(&g.p_rel) {
                writeln!(
                    out,
                    "  alignment {}  p_rel={}",
                    ranks[&m.alignment.key()],
                    fixed(pr)
                )
                .unwrap();
            }
            out.push_str("  p_inf:\n");
            for (name, &pi) in &g.p_inf {
                writeln!(out, "    {name}  {}", fixed(pi)).unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_rounds_ties_to_even() {
        assert_eq!(fixed(0.0078125), "0.007812");
        assert_eq!(fixed(0.0234375), "0.023438");
        assert_eq!(fixed(-1e-9), "0.000000");
        assert_eq!(fixed(2.0), "2.000000");
    }

    #[test]
    fn json_numbers_keep_six_digits() {
        let v = json!({ "b": fixed_number(1.0), "a": fixed_number(1.0 / 3.0) });
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"a":0.333333,"b":1.000000}"#
        );
    }
}
