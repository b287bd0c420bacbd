use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use patternkb::format::{fixed, fixed_number, NO_ALIGNMENT};
use patternkb::{
    brute_force_best, build_alignments, emit_report, load_kb, parse_new, render_alignment,
    CostModel, Error, KnowledgeStore, OracleLimits, OutputFormat, Query, Report, ReportKind,
    SearchParams,
};
use serde_json::{json, Value};

const EXIT_NO_ALIGNMENT: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_USAGE: u8 = 3;

/// Pattern knowledge base: alignment, recognition and probabilistic inference.
#[derive(Debug, Parser)]
#[command(name = "patternkb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank alignments of New against the store.
    Align(QueryArgs),
    /// Alignments plus coverage groups and inference probabilities.
    Infer(QueryArgs),
    /// Alignments plus the pattern membership of each.
    Recognize(QueryArgs),
    /// Parse and check a store; print pattern and symbol statistics.
    Validate(KbArgs),
    /// Exhaustive best alignment for a small instance.
    Oracle(OracleArgs),
    /// Print the cost model.
    Stats(KbArgs),
}

#[derive(Debug, Args)]
struct KbArgs {
    /// Pattern file.
    #[arg(long)]
    kb: PathBuf,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
#[group(id = "new_source", required = true, multiple = false, args = ["new", "new_file"])]
struct NewArgs {
    /// New pattern as whitespace-separated symbols.
    #[arg(long)]
    new: Option<String>,
    /// File holding the New pattern.
    #[arg(long)]
    new_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[command(flatten)]
    kb: KbArgs,
    #[command(flatten)]
    new: NewArgs,
    /// Alignments kept per search iteration.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
    beam: u32,
    /// Row limit, New included.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(2..))]
    max_rows: u32,
    /// Copies of one pattern allowed in an alignment.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    reuse: u32,
    /// Alignments reported.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    top: u32,
    /// Upper bound on search iterations.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    iterations: u32,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    kb: KbArgs,
    #[command(flatten)]
    new: NewArgs,
    /// Row limit, New included (at most 4).
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(2..=4))]
    max_rows: u32,
    /// Copies of one pattern allowed in an alignment.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    reuse: u32,
}

impl QueryArgs {
    fn params(&self) -> SearchParams {
        SearchParams {
            beam_width: self.beam as usize,
            max_rows: self.max_rows as usize,
            max_pattern_reuse: self.reuse as usize,
            top_k_reported: self.top as usize,
            max_iterations: self.iterations as usize,
            parallel: true,
        }
    }
}

/// A failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(e: impl ToString) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn format_of(json: bool) -> OutputFormat {
    if json {
        OutputFormat::Json
    } else {
        OutputFormat::Text
    }
}

fn open_kb(path: &Path) -> Result<(KnowledgeStore, CostModel), Failure> {
    let mut kb = load_kb(path).map_err(Failure::input)?;
    let costs = kb.seal_and_build_costs().map_err(Failure::input)?;
    Ok((kb, costs))
}

fn read_new(args: &NewArgs, kb: &KnowledgeStore) -> Result<Query, Failure> {
    let text = match (&args.new, &args.new_file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => std::fs::read_to_string(p)
            .map_err(|e| Failure::input(format!("{}: {e}", p.display())))?,
        (None, None) => unreachable!("clap requires one New source"),
    };
    parse_new(&text, kb).map_err(|e| match e {
        Error::EmptyQuery => Failure {
            code: EXIT_USAGE,
            message: "New pattern is empty".into(),
        },
        other => Failure::input(other),
    })
}

fn print_json(v: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("value serializes")
    );
}

fn query(args: &QueryArgs, kind: ReportKind) -> Result<u8, Failure> {
    let (kb, costs) = open_kb(&args.kb.kb)?;
    let q = read_new(&args.new, &kb)?;
    let params = args.params();
    let ranked = build_alignments(&kb, &costs, &q, &params).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    })?;
    let report = Report::new(kind, &q, &params, ranked);
    print!("{}", emit_report(&report, format_of(args.kb.json)));
    Ok(if report.is_empty() {
        EXIT_NO_ALIGNMENT
    } else {
        0
    })
}

fn validate(args: &KbArgs) -> Result<u8, Failure> {
    let (kb, _) = open_kb(&args.kb)?;
    let id_count: usize = kb.patterns().iter().map(|p| p.id_positions().count()).sum();
    if args.json {
        let patterns: Vec<Value> = kb
            .patterns()
            .iter()
            .map(|p| {
                json!({
                    "id": p.id().index(),
                    "label": kb.display_name(p.id()),
                    "length": p.len(),
                    "frequency": p.frequency(),
                })
            })
            .collect();
        print_json(&json!({
            "status": "ok",
            "patterns": kb.len(),
            "symbols": kb.symbols().len(),
            "identification_occurrences": id_count,
            "total_frequency_mass": kb.total_frequency_mass(),
            "pattern_list": patterns,
        }));
    } else {
        println!("ok: {}", args.kb.display());
        println!("patterns: {}", kb.len());
        println!("symbols: {}", kb.symbols().len());
        println!("identification occurrences: {id_count}");
        println!("total frequency mass: {}", kb.total_frequency_mass());
        for p in kb.patterns() {
            println!(
                "  {}  length {}  frequency {}",
                kb.display_name(p.id()),
                p.len(),
                p.frequency()
            );
        }
    }
    Ok(0)
}

fn stats(args: &KbArgs) -> Result<u8, Failure> {
    let (kb, costs) = open_kb(&args.kb)?;
    let mut rows: Vec<(&str, u64, f64)> = kb
        .symbols()
        .iter()
        .map(|(s, name)| (name, costs.weighted_count(s), costs.cost(s)))
        .collect();
    rows.sort_by(|a, b| a.0.cmp(b.0));
    if args.json {
        let table: serde_json::Map<String, Value> = rows
            .iter()
            .map(|&(n, c, bits)| {
                (
                    n.to_owned(),
                    json!({ "count": c, "cost": fixed_number(bits) }),
                )
            })
            .collect();
        print_json(&json!({
            "total_frequency_mass": costs.total_mass(),
            "novel_cost": fixed_number(costs.novel_cost()),
            "symbols": table,
        }));
    } else {
        println!("total frequency mass: {}", costs.total_mass());
        println!("novel cost: {}", fixed(costs.novel_cost()));
        let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
        for (n, c, bits) in rows {
            println!("{n:<width$}  {c:>6}  {}", fixed(bits));
        }
    }
    Ok(0)
}

fn oracle(args: &OracleArgs) -> Result<u8, Failure> {
    let (kb, costs) = open_kb(&args.kb.kb)?;
    let q = read_new(&args.new, &kb)?;
    let limits = OracleLimits {
        max_rows: args.max_rows as usize,
        max_pattern_reuse: args.reuse as usize,
        ..OracleLimits::default()
    };
    let result = brute_force_best(&kb, &costs, &q, &limits).map_err(Failure::input)?;
    let best = result.best.filter(|s| s.cd > 0.0);
    if args.kb.json {
        let alignments: Vec<Value> = if best.is_some() {
            result
                .alignments
                .iter()
                .map(|a| Value::String(render_alignment(a)))
                .collect()
        } else {
            Vec::new()
        };
        print_json(&json!({
            "status": if best.is_some() { "ok" } else { NO_ALIGNMENT },
            "query": q.text(),
            "examined": result.examined,
            "best": best.map(|s| json!({
                "b_n": fixed_number(s.b_n),
                "b_e": fixed_number(s.b_e),
                "cd": fixed_number(s.cd),
            })),
            "alignments": alignments,
        }));
    } else {
        println!("query: {}", q.text());
        println!("examined: {}", result.examined);
        match best {
            Some(s) => {
                println!(
                    "best cd={}  b_n={}  b_e={}  ({} alignment(s))",
                    fixed(s.cd),
                    fixed(s.b_n),
                    fixed(s.b_e),
                    result.alignments.len()
                );
                for a in &result.alignments {
                    println!();
                    print!("{}", render_alignment(a));
                }
            }
            None => println!("\n{NO_ALIGNMENT}"),
        }
    }
    Ok(if best.is_some() { 0 } else { EXIT_NO_ALIGNMENT })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Align(a) => query(a, ReportKind::Align),
        Command::Infer(a) => query(a, ReportKind::Infer),
        Command::Recognize(a) => query(a, ReportKind::Recognize),
        Command::Validate(a) => validate(a),
        Command::Oracle(a) => oracle(a),
        Command::Stats(a) => stats(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("patternkb: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
