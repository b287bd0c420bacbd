use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const JACK: &str = "Jack stethoscope black-bag fair-hair blue-eyes Dorking";

fn jack_kb() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/jack.sp")
}

fn patternkb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_patternkb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_kb(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".sp").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn jack_align_succeeds() {
    let kb = jack_kb();
    let o = patternkb(&["align", "--kb", kb.to_str().unwrap(), "--new", JACK]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let first: String = text.split("\nalignment 2 ").next().unwrap().to_owned();
    for label in [
        "jack1", "person", "doctor", "fair", "hair", "blue", "head", "male", "jackmale",
    ] {
        assert!(
            first
                .lines()
                .any(|l| l.split_whitespace().next() == Some(label)),
            "{label} missing from\n{first}"
        );
    }
}

#[test]
fn novel_only_query_finds_nothing() {
    let kb = jack_kb();
    let o = patternkb(&["align", "--kb", kb.to_str().unwrap(), "--new", "zzz"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("no alignment (cd>0) found"));
    let o = patternkb(&[
        "align",
        "--kb",
        kb.to_str().unwrap(),
        "--new",
        "zzz",
        "--json",
    ]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "no alignment (cd>0) found");
}

#[test]
fn exit_code_matrix() {
    let good = jack_kb();
    let good = good.to_str().unwrap();
    let bad = temp_kb("ok: a b ;\nbroken: x #y y #x ;\n");
    let bad = bad.path().to_str().unwrap();
    let new_file = temp_kb("Jack Dorking\n");
    let new_file = new_file.path().to_str().unwrap();

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["align", "--kb", good, "--new", "Jack Dorking"], 0),
        (vec!["align", "--kb", good, "--new-file", new_file], 0),
        (vec!["infer", "--kb", good, "--new", "Jack Dorking"], 0),
        (vec!["recognize", "--kb", good, "--new", "Jack Dorking"], 0),
        (vec!["align", "--kb", good, "--new", "nothing here"], 1),
        (vec!["align", "--kb", bad, "--new", "a b"], 2),
        (vec!["align", "--kb", "/nonexistent.sp", "--new", "a"], 2),
        (vec!["align", "--kb", good, "--new-file", "/nonexistent"], 2),
        (vec!["validate", "--kb", good], 0),
        (vec!["validate", "--kb", bad], 2),
        (vec!["stats", "--kb", good], 0),
        (vec!["align", "--kb", good], 3),
        (
            vec!["align", "--kb", good, "--new", "a", "--new-file", new_file],
            3,
        ),
        (vec!["align", "--kb", good, "--new", "a", "--beam", "0"], 3),
        (vec!["align", "--kb", good, "--new", "a", "--bogus"], 3),
        (vec!["align", "--kb", good, "--new", "   "], 3),
        (vec!["frobnicate"], 3),
        (vec![], 3),
        (vec!["--help"], 0),
    ];
    for (args, want) in cases {
        let o = patternkb(&args);
        assert_eq!(
            code(&o),
            want,
            "patternkb {args:?}\nstderr: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn syntax_errors_name_the_line() {
    let bad = temp_kb("// header\nok: a b ;\nz: 0 x c ;\n");
    let o = patternkb(&["validate", "--kb", bad.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":3:"), "{err}");
}

/// Pulls `cd=`, `b_n=`, `b_e=` values from the text report, in order.
fn text_scores(text: &str) -> Vec<[String; 3]> {
    text.lines()
        .filter(|l| l.starts_with("alignment "))
        .map(|l| {
            let get = |key: &str| {
                l.split_whitespace()
                    .find_map(|t| t.strip_prefix(key))
                    .unwrap()
                    .to_owned()
            };
            [get("cd="), get("b_n="), get("b_e=")]
        })
        .collect()
}

#[test]
fn json_and_text_agree() {
    let kb = jack_kb();
    let kb = kb.to_str().unwrap();
    let text = stdout(&patternkb(&["infer", "--kb", kb, "--new", JACK]));
    let json = patternkb(&["infer", "--kb", kb, "--new", JACK, "--json"]);
    let v: Value = serde_json::from_slice(&json.stdout).unwrap();
    let from_json: Vec<[String; 3]> = v["alignments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| {
            [
                a["cd"].to_string(),
                a["b_n"].to_string(),
                a["b_e"].to_string(),
            ]
        })
        .collect();
    assert!(!from_json.is_empty());
    assert_eq!(text_scores(&text), from_json);

    for g in v["groups"].as_array().unwrap() {
        for m in g["members"].as_array().unwrap() {
            let needle = format!("alignment {}  p_rel={}", m["rank"], m["p_rel"]);
            assert!(text.contains(&needle), "{needle}");
        }
    }
}

#[test]
fn json_is_byte_stable_and_sorted() {
    let kb = jack_kb();
    let kb = kb.to_str().unwrap();
    let a = patternkb(&["infer", "--kb", kb, "--new", JACK, "--json"]).stdout;
    let b = patternkb(&["infer", "--kb", kb, "--new", JACK, "--json"]).stdout;
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(v["alignments"][0]["cd"].to_string(), "17.262389");
}

#[test]
fn infer_reports_inherited_attributes() {
    let kb = jack_kb();
    let o = patternkb(&[
        "infer",
        "--kb",
        kb.to_str().unwrap(),
        "--new",
        JACK,
        "--json",
    ]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let p_inf = &v["groups"][0]["p_inf"];
    for s in ["Jones", "doctor", "male", "beard", "deep"] {
        assert!(p_inf.get(s).is_some(), "{s} missing from {p_inf}");
    }
    assert_eq!(p_inf["Jones"].to_string(), "1.000000");
}

#[test]
fn oracle_agrees_with_align() {
    let toy = temp_kb("p: P a b c d #P ;\nq: Q c #Q ;\n");
    let toy = toy.path().to_str().unwrap();
    let o = patternkb(&["oracle", "--kb", toy, "--new", "a b c d", "--json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let oracle: Value = serde_json::from_slice(&o.stdout).unwrap();
    let a = patternkb(&[
        "align",
        "--kb",
        toy,
        "--new",
        "a b c d",
        "--max-rows",
        "4",
        "--json",
    ]);
    let align: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(oracle["best"]["cd"], align["alignments"][0]["cd"]);
}

#[test]
fn oracle_rejects_large_instances() {
    let kb = jack_kb();
    let o = patternkb(&["oracle", "--kb", kb.to_str().unwrap(), "--new", JACK]);
    assert_eq!(code(&o), 2);
}

#[test]
fn recognize_lists_memberships() {
    let kb = jack_kb();
    let o = patternkb(&[
        "recognize",
        "--kb",
        kb.to_str().unwrap(),
        "--new",
        JACK,
        "--json",
    ]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let labels: Vec<&str> = v["alignments"][0]["recognition"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["label"].as_str().unwrap())
        .collect();
    assert_eq!(labels.len(), 9);
    assert!(labels.contains(&"jack1") && labels.contains(&"doctor"));
}

#[test]
fn stats_prints_cost_table() {
    let kb = jack_kb();
    let o = patternkb(&["stats", "--kb", kb.to_str().unwrap(), "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total_frequency_mass"], 68);
    // Jones occurs once in 68 symbol occurrences
    assert_eq!(
        v["symbols"]["Jones"]["cost"].to_string(),
        format!("{:.6}", (68f64).log2())
    );
}
