use std::collections::BTreeSet;

use patternkb::{
    analyze, build_alignments, extract_inferences, parse_kb_str, parse_new, render_alignment,
    score_alignment, serialize_store, CostModel, KnowledgeStore, MultiAlignment, RankedAlignment,
    SearchParams,
};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Shape {
    freq: u64,
    body: Vec<u8>,
    wrapped: bool,
}

fn shape() -> impl Strategy<Value = Shape> {
    (1u64..4, prop::collection::vec(0u8..8, 1..5), any::<bool>()).prop_map(
        |(freq, body, wrapped)| Shape {
            freq,
            body,
            wrapped,
        },
    )
}

fn kb_text(shapes: &[Shape], scale: u64) -> String {
    let mut out = String::new();
    for (i, s) in shapes.iter().enumerate() {
        let mut toks: Vec<String> = s.body.iter().map(|b| format!("s{b}")).collect();
        if s.wrapped {
            toks.insert(0, format!("%P{i}"));
            toks.push(format!("%#P{i}"));
        }
        out.push_str(&format!(
            "p{i}: {} x {} ;\n",
            s.freq * scale,
            toks.join(" ")
        ));
    }
    out
}

fn new_text(new: &[u8]) -> String {
    // 8 and 9 never occur in the store
    new.iter()
        .map(|b| format!("s{b}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn instance() -> impl Strategy<Value = (Vec<Shape>, Vec<u8>)> {
    (
        prop::collection::vec(shape(), 1..5),
        prop::collection::vec(0u8..10, 1..5),
    )
}

fn load(text: &str) -> (KnowledgeStore, CostModel) {
    let mut s = parse_kb_str(text, "p.sp").unwrap();
    let c = s.seal_and_build_costs().unwrap();
    (s, c)
}

fn search(
    shapes: &[Shape],
    new: &[u8],
    parallel: bool,
) -> (KnowledgeStore, CostModel, Vec<RankedAlignment>) {
    let (s, c) = load(&kb_text(shapes, 1));
    let q = parse_new(&new_text(new), &s).unwrap();
    let params = SearchParams {
        parallel,
        ..SearchParams::default()
    };
    let ranked = build_alignments(&s, &c, &q, &params).unwrap();
    (s, c, ranked)
}

fn bits(r: &[RankedAlignment]) -> Vec<(String, [u64; 3])> {
    r.iter()
        .map(|r| {
            let s = r.score;
            (
                format!("{:?}", r.alignment.key()),
                [s.b_n.to_bits(), s.b_e.to_bits(), s.cd.to_bits()],
            )
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialize_then_parse_is_identity(shapes in prop::collection::vec(shape(), 1..6)) {
        let s = parse_kb_str(&kb_text(&shapes, 1), "p.sp").unwrap();
        let again = parse_kb_str(&serialize_store(&s).unwrap(), "q.sp").unwrap();
        prop_assert_eq!(s, again);
    }

    #[test]
    fn scaling_frequencies_changes_nothing((shapes, new) in instance(), k in 2u64..6) {
        let (s1, c1) = load(&kb_text(&shapes, 1));
        let (s2, c2) = load(&kb_text(&shapes, k));
        let t1: Vec<u64> = c1.table().iter().map(|x| x.to_bits()).collect();
        let t2: Vec<u64> = c2.table().iter().map(|x| x.to_bits()).collect();
        prop_assert_eq!(t1, t2);
        let p = SearchParams::default();
        let r1 = build_alignments(&s1, &c1, &parse_new(&new_text(&new), &s1).unwrap(), &p).unwrap();
        let r2 = build_alignments(&s2, &c2, &parse_new(&new_text(&new), &s2).unwrap(), &p).unwrap();
        // novel symbols are priced off the total mass, which does scale
        if new.iter().all(|&b| b < 8) {
            prop_assert_eq!(bits(&r1), bits(&r2));
        }
    }

    #[test]
    fn reported_alignments_are_valid_and_compress((shapes, new) in instance()) {
        let (_, c, ranked) = search(&shapes, &new, true);
        for r in &ranked {
            prop_assert!(r.alignment.validate().is_ok());
            let again = score_alignment(&r.alignment, &c);
            prop_assert_eq!(again, r.score);
            prop_assert!(r.score.cd > 0.0);
            prop_assert!(r.score.b_n >= 0.0 && r.score.b_e >= 0.0);
            prop_assert_eq!(r.score.cd, r.score.b_n - r.score.b_e);
        }
        for w in ranked.windows(2) {
            prop_assert!(w[0].score.cd >= w[1].score.cd);
        }
    }

    #[test]
    fn probabilities_are_distributions((shapes, new) in instance()) {
        let (_, _, ranked) = search(&shapes, &new, true);
        for g in analyze(&ranked) {
            let total: f64 = g.p_rel.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            prop_assert!(g.p_rel.iter().all(|p| (0.0..=1.0).contains(p)));
            prop_assert!(g.p_inf.values().all(|p| *p > 0.0 && *p <= 1.0));
        }
    }

    #[test]
    fn inferences_stay_outside_new_columns((shapes, new) in instance()) {
        let (_, _, ranked) = search(&shapes, &new, true);
        for r in &ranked {
            let a = &r.alignment;
            let in_new: BTreeSet<(usize, usize)> = a
                .columns()
                .iter()
                .filter(|c| c.contains_new())
                .flat_map(|c| c.entries().iter().map(|e| (e.row, e.pos)))
                .collect();
            for i in extract_inferences(a) {
                prop_assert!(i.row > 0);
                for &p in &i.positions {
                    prop_assert!(!in_new.contains(&(i.row, p)));
                    prop_assert!(!a.rows()[i.row].roles()[p].is_id());
                }
            }
        }
    }

    #[test]
    fn dropping_a_column_never_helps((shapes, new) in instance()) {
        let (_, c, ranked) = search(&shapes, &new, true);
        for r in &ranked {
            let a = &r.alignment;
            for skip in 0..a.column_count() {
                let cols = a.columns().iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, c)| c.clone()).collect();
                let Some(smaller) = MultiAlignment::from_parts(a.rows().to_vec(), cols) else { continue };
                if smaller.validate().is_ok() {
                    prop_assert!(score_alignment(&smaller, &c).cd <= r.score.cd);
                }
            }
        }
    }

    #[test]
    fn serial_and_parallel_agree((shapes, new) in instance()) {
        let (_, _, a) = search(&shapes, &new, false);
        let (_, _, b) = search(&shapes, &new, true);
        prop_assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn render_has_one_line_per_row((shapes, new) in instance()) {
        let (_, _, ranked) = search(&shapes, &new, true);
        for r in &ranked {
            let text = render_alignment(&r.alignment);
            prop_assert_eq!(text.lines().count(), r.alignment.row_count());
            prop_assert_eq!(&text, &render_alignment(&r.alignment));
        }
    }

    #[test]
    fn verbatim_pattern_wins(shapes in prop::collection::vec(shape(), 0..4), n in 2usize..5) {
        let target: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
        let text = format!("{}target: {} ;\n", kb_text(&shapes, 1), target.join(" "));
        let (s, c) = load(&text);
        let q = parse_new(&target.join(" "), &s).unwrap();
        let ranked = build_alignments(&s, &c, &q, &SearchParams::default()).unwrap();
        let top = &ranked[0];
        prop_assert_eq!(top.alignment.sorted_pattern_ids(), vec![s.find_label("target").unwrap()]);
        prop_assert_eq!(top.score.b_e, 0.0);
    }
}
