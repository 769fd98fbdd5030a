//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints its own PASS/FAIL line; exits non-zero if any fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use preempt::cli::run;
use preempt::dsa::{build_framework, DsaFramework};
use preempt::explain::{build_explanation, DisputeTree, Party, TreeKind};
use preempt::hierarchy::{verdict, Limits, VerdictKind};
use preempt::normfile::{load_normfile, parse_case};
use preempt::selfcheck::{check_case, run_selfcheck};

const TABLE_BUDGET: Duration = Duration::from_secs(1);
const SELFCHECK_SEED: u64 = 1;
const SELFCHECK_COUNT: usize = 200;
const SELFCHECK_BUDGET: Duration = Duration::from_secs(300);

/// Derivation states of the overtaking case, row by row, `*` marking arguments.
const TABLE: [[&str; 8]; 4] = [
    ["-*", "n", "-", "n", "-", "n", "-", "n"],
    ["-*", "-", "-", "-", "-", "n", "-", "n"],
    ["⊥", "+*", "-", "n", "⊥", "+", "-", "n"],
    ["⊥", "⊥", "-*", "-", "⊥", "+", "-", "n"],
];
const TABLE_ROWS: [&str; 4] = ["{}", "{p}", "{q}", "{p,q}"];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", name].iter().collect();
    path.to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("preempt").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8_lossy(&out).into_owned())
}

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    let (code, out) = cli(&["statespace", &fixture("overtaking.norm")]);
    let elapsed = start.elapsed();
    ensure(code == 0, || format!("exit code {code}"))?;
    let lines: Vec<&str> = out.lines().collect();
    ensure(lines.len() == 5, || format!("{} lines", lines.len()))?;
    let header: Vec<&str> = lines[0].split_whitespace().skip(3).collect();
    let columns: Vec<String> = (0..8).map(|k| format!("δ{k}")).collect();
    ensure(header == columns, || format!("header {header:?}"))?;
    let mut cells = 0;
    for (r, line) in lines[1..].iter().enumerate() {
        let row: Vec<&str> = line.split_whitespace().collect();
        ensure(row[0] == TABLE_ROWS[r], || format!("row label {}", row[0]))?;
        ensure(row[1..] == TABLE[r], || format!("row {} is {:?}", row[0], &row[1..]))?;
        cells += row.len() - 1;
    }
    ensure(elapsed < TABLE_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{cells} cells exact in {elapsed:?}"))
}

fn labels(fw: &DsaFramework) -> BTreeSet<String> {
    fw.arguments.iter().map(|a| a.label(false)).collect()
}

fn argument_set() -> Outcome {
    let fw = build_framework(&load_normfile(fixture("overtaking.norm")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let expected: BTreeSet<String> = ["⟨δ0,{},-⟩", "⟨δ0,{p},-⟩", "⟨δ1,{q},+⟩", "⟨δ2,{p, q},-⟩"]
        .into_iter()
        .map(String::from)
        .collect();
    let got = labels(&fw);
    ensure(got == expected, || format!("got {got:?}"))?;
    Ok(format!("{} arguments", got.len()))
}

fn verdicts() -> Outcome {
    let mut seen = Vec::new();
    for (name, expected) in [
        ("overtaking.norm", VerdictKind::Forbidden),
        ("overtaking_obstructed.norm", VerdictKind::Obligatory),
        ("conflict.norm", VerdictKind::Neither),
    ] {
        let case = load_normfile(fixture(name)).map_err(|e| e.to_string())?;
        let kind = verdict(&case).kind;
        ensure(kind == expected, || format!("{name}: {kind}, expected {expected}"))?;
        seen.push(kind.to_string());
    }
    Ok(seen.join(", "))
}

/// The tree as a list of `party:label`, failing unless it is a single path.
fn chain(tree: &DisputeTree, fw: &DsaFramework) -> Result<Vec<String>, String> {
    let walk = tree.root.walk();
    ensure(walk.iter().all(|(_, n)| n.children.len() <= 1), || "tree branches".into())?;
    Ok(walk
        .iter()
        .map(|(_, n)| format!("{}:{}", n.party.letter(), fw.arguments[n.argument].label(false)))
        .collect())
}

fn explanation_structure() -> Outcome {
    let case = load_normfile(fixture("overtaking.norm")).map_err(|e| e.to_string())?;
    let fw = build_framework(&case).map_err(|e| e.to_string())?;
    let expl = build_explanation(&case).map_err(|e| e.to_string())?;
    ensure(expl.trees.len() == 1, || format!("{} trees for Π={{p,q}}", expl.trees.len()))?;
    let tree = &expl.trees[0].tree;
    ensure(tree.kind == TreeKind::Admissible, || "forbidden tree is not admissible".into())?;
    let got = chain(tree, &fw)?;
    ensure(got == ["P:⟨δ0,{},-⟩", "O:⟨δ1,{q},+⟩", "P:⟨δ2,{p, q},-⟩"], || {
        format!("forbidden chain {got:?}")
    })?;

    let case = load_normfile(fixture("overtaking_obstructed.norm")).map_err(|e| e.to_string())?;
    let fw = build_framework(&case).map_err(|e| e.to_string())?;
    let expl = build_explanation(&case).map_err(|e| e.to_string())?;
    ensure(expl.trees.len() == 1, || format!("{} trees for Π={{q}}", expl.trees.len()))?;
    let tree = &expl.trees[0].tree;
    ensure(tree.kind == TreeKind::Maximal, || "obligatory tree is not maximal".into())?;
    let got = chain(tree, &fw)?;
    ensure(got == ["P:⟨δ0,{},-⟩", "O:⟨δ1,{q},+⟩"], || format!("obligatory chain {got:?}"))?;
    let (party, leaf) = *tree.chain().last().expect("non-empty");
    ensure(party == Party::Opponent, || "leaf is not an opponent".into())?;
    ensure(fw.attackers_of(leaf).next().is_none(), || "opponent leaf is attacked".into())?;
    Ok("admissible P/O/P chain; maximal P/O chain with unattacked leaf".into())
}

fn conflict_diagnostic() -> Outcome {
    let file = fixture("conflict.norm");
    let (code, _) = cli(&["explain", &file]);
    ensure(code == 5, || format!("plain explain exited {code}, expected refusal"))?;
    let (code, out) = cli(&["explain", &file, "--diagnostic", "--format", "json"]);
    ensure(code == 0, || format!("diagnostic explain exited {code}"))?;
    let doc: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(doc["verdict"] == "NEITHER", || format!("verdict {}", doc["verdict"]))?;
    let count = |stance: &str| doc[stance]["trees"].as_array().map_or(0, Vec::len);
    let (ob, fb) = (count("obligatory"), count("forbidden"));
    ensure(ob > 0 && fb > 0, || format!("families have {ob} and {fb} trees"))?;
    ensure(doc["obligatory"]["stance"] == "OBLIGATORY", || "obligatory stance".into())?;
    ensure(doc["forbidden"]["stance"] == "FORBIDDEN", || "forbidden stance".into())?;
    Ok(format!("verdict NEITHER; obligatory family {ob} tree(s), forbidden family {fb} tree(s)"))
}

fn property_suite() -> Outcome {
    let start = Instant::now();
    let report = run_selfcheck(SELFCHECK_SEED, SELFCHECK_COUNT).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(report.checked >= SELFCHECK_COUNT, || format!("{} cases", report.checked))?;
    ensure(report.all_passed(), || {
        format!("{} counterexamples:\n{}", report.counterexamples.len(), report.render())
    })?;
    ensure(elapsed <= SELFCHECK_BUDGET, || format!("took {elapsed:?}"))?;
    let applied: usize = report.tallies.values().map(|t| t.passed).sum();
    Ok(format!(
        "seed {SELFCHECK_SEED}, {} cases, {applied} applicable checks passed in {elapsed:?}",
        report.checked
    ))
}

/// Informational: the pinned case on which the neutral-attack property fails.
fn neutral_attack_note() -> String {
    let src = "level 1 { p, p -> r, !q -> r }\nsituation { !p, !q }\nconsequence r\n";
    let failed: Vec<&str> = parse_case(src, Limits::default())
        .ok()
        .and_then(|case| check_case(&case).ok())
        .map(|r| r.failures().map(|c| c.name).collect())
        .unwrap_or_default();
    format!(
        "note: the sample above holds no counterexample, but `neutral-attacks-nothing` fails on \
         rare cases outside it (pinned case fails: {failed:?}); see README"
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_preempt");
    let commands: [&[&str]; 14] = [
        &["verdict"],
        &["verdict", "--format", "json"],
        &["statespace"],
        &["statespace", "--ascii"],
        &["statespace", "--format", "json"],
        &["framework"],
        &["framework", "--format", "json"],
        &["framework", "--format", "text"],
        &["explain", "--diagnostic"],
        &["explain", "--diagnostic", "--format", "dot"],
        &["explain", "--diagnostic", "--format", "json"],
        &["check"],
        &["check", "--format", "json"],
        &["selfcheck"],
    ];
    let mut compared = 0;
    for name in ["overtaking.norm", "overtaking_obstructed.norm", "conflict.norm"] {
        let file = fixture(name);
        for args in commands.iter().copied().chain([&["explain"][..]]) {
            let invoke = || {
                Command::new(bin)
                    .arg(args[0])
                    .arg(&file)
                    .args(&args[1..])
                    .output()
                    .map_err(|e| e.to_string())
            };
            let (a, b) = (invoke()?, invoke()?);
            ensure(a.stdout == b.stdout && a.stderr == b.stderr && a.status == b.status, || {
                format!("{name} {args:?} differs between runs")
            })?;
            compared += 1;
        }
    }
    Ok(format!("{compared} invocations byte-identical across two processes"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("state-space table reproduction", table_reproduction),
        ("DS-argument set", argument_set),
        ("verdicts", verdicts),
        ("explanation tree shapes", explanation_structure),
        ("conflict diagnostic families", conflict_diagnostic),
        ("randomized property suite", property_suite),
        ("byte-stable output", determinism),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
        if i == 5 {
            println!("  {}", neutral_attack_note());
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
