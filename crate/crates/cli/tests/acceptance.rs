//! Acceptance suite: every criterion runs and reports one PASS/FAIL line.

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use qrt_core::analysis::index::{all_paths, same_block};
use qrt_core::analysis::{analyze, build_pdg, entry_points, EdgeKind};
use qrt_core::refactor::rules::{Builtin1, GateOp, RuleKind};
use qrt_core::refactor::{
    apply, candidates, catalog, follow_entry, matrix_rule_check, GateRuleTable, Refactoring,
    RefactoringRequest, Rule, TABLE_ROWS,
};
use qrt_core::sim::{
    check_equivalence, check_equivalence_as, run_distribution, Limits, Verdict, DIST_TOL,
};
use qrt_core::{ast_equal, parse, print, Code, FileId, Program};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/corpus")
}

fn corpus() -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "qs"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn parsed(src: &str) -> Program {
    parse(src, FileId(0)).unwrap_or_else(|d| panic!("{d:?}"))
}

fn fixture(name: &str) -> Program {
    parsed(&std::fs::read_to_string(corpus_dir().join(name)).unwrap())
}

fn entry(p: &Program) -> String {
    let syms = analyze(p).unwrap();
    let e = entry_points(p, &syms);
    assert_eq!(e.len(), 1, "expected one entry point");
    format!(
        "{}.{}",
        p.namespaces[e[0].0].name.name,
        p.callable(e[0]).name.name
    )
}

fn golden_split() -> String {
    let start = Instant::now();
    let before = fixture("figure2_before.qs");
    let after = fixture("figure2_after.qs");
    let req = RefactoringRequest::new(
        Refactoring::SplitOperation,
        "MyNamespace.PerformQuantumSimulation",
    )
    .arg(
        "split",
        "0..3:PerformQuantumOperations,4..6:MeasureAndDisplayResult[i=iteration]",
    );
    let r = apply(&before, &req);
    assert!(r.is_ok(), "{:?}", r.diagnostics);
    assert!(ast_equal(&r.program, &after), "{}", print(&r.program));
    let v = check_equivalence(&before, &r.program, "MyNamespace.Main", &Limits::default()).unwrap();
    assert_eq!(v, Verdict::Equivalent);
    let took = start.elapsed();
    assert!(took < Duration::from_secs(1), "took {took:?}");
    format!("ast_equal to the after fixture, equivalent, {took:.2?}")
}

fn catalog_coverage() -> String {
    let entries = catalog();
    let rows: BTreeSet<&str> = entries
        .iter()
        .flat_map(|e| e.rows.iter().copied())
        .collect();
    let table: BTreeSet<&str> = TABLE_ROWS.iter().copied().collect();
    assert_eq!(table.len(), 25);
    assert_eq!(rows, table);
    let out = Command::new(env!("CARGO_BIN_EXE_qrt"))
        .arg("list")
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let summary = format!(
        "{} refactorings covering 25 of 25 catalog rows",
        entries.len()
    );
    assert!(text.contains(&summary), "{text}");
    format!(
        "{} engine entries, {} of 25 rows",
        entries.len(),
        rows.len()
    )
}

fn master_preservation() -> String {
    assert_eq!(DIST_TOL, 1e-9);
    let start = Instant::now();
    let files = corpus();
    assert!(files.len() >= 20, "corpus has {} programs", files.len());
    for need in ["figure1.qs", "figure2_before.qs", "figure2_after.qs"] {
        assert!(files.iter().any(|(f, _)| f == need), "{need} missing");
    }
    let eight = Limits {
        max_qubits: 8,
        ..Limits::default()
    };
    let (mut applied, mut refused) = (0, 0);
    let mut kinds = BTreeSet::new();
    for (file, src) in &files {
        let p = parsed(src);
        let e = entry(&p);
        run_distribution(&p, &e, &eight).unwrap_or_else(|d| panic!("{file}: {d:?}"));
        for req in candidates(&p) {
            let r = apply(&p, &req);
            if !r.is_ok() {
                assert!(
                    ast_equal(&r.program, &p),
                    "{file}: {req} failed but changed the program"
                );
                refused += 1;
                continue;
            }
            let after = follow_entry(&p, &r.program, &e)
                .unwrap_or_else(|| panic!("{file}: {req}: entry lost"));
            let v = check_equivalence_as(&p, &e, &r.program, &after, &Limits::default());
            assert!(matches!(v, Ok(Verdict::Equivalent)), "{file}: {req}: {v:?}");
            applied += 1;
            kinds.insert(req.refactoring);
        }
    }
    assert_eq!(
        kinds.len(),
        Refactoring::ALL.len(),
        "some refactoring never applied"
    );
    let took = start.elapsed();
    assert!(took < Duration::from_secs(300), "took {took:?}");
    format!(
        "{} programs, {applied} applications equivalent, {refused} refused untouched, {took:.1?}",
        files.len()
    )
}

fn gate_rules() -> String {
    let table = GateRuleTable::standard();
    for r in &table.rules {
        assert!(matrix_rule_check(r), "rule {} fails", r.name);
    }
    assert!(table.verify().is_empty());
    let corrupted = Rule {
        name: "h-x-cancel",
        kind: RuleKind::Reduction,
        wires: 1,
        lhs: vec![GateOp::One(Builtin1::H, 0), GateOp::One(Builtin1::X, 0)],
        rhs: vec![],
    };
    assert!(!matrix_rule_check(&corrupted), "corrupted rule accepted");
    format!("{} rules hold, corrupted rule rejected", table.rules.len())
}

fn mentions(text: &str, word: &str) -> bool {
    text.match_indices(word).any(|(i, _)| {
        let ok = |c: Option<char>| !c.is_some_and(|c| c.is_alphanumeric() || c == '_');
        ok(text[..i].chars().next_back()) && ok(text[i + word.len()..].chars().next())
    })
}

fn pdg_sampling() -> String {
    let (mut swapped, mut rejected, mut callables) = (0, 0, 0);
    for (file, src) in corpus() {
        let p = parsed(&src);
        let e = entry(&p);
        let syms = analyze(&p).unwrap();
        let mut file_rejected = 0;
        for (ni, ns) in p.namespaces.iter().enumerate() {
            for (ci, c) in ns.callables.iter().enumerate() {
                let paths: Vec<_> = all_paths(&c.body).into_iter().map(|(p, _)| p).collect();
                if paths.len() <= 8 {
                    callables += 1;
                }
                let pdg = build_pdg(&p, &syms, (ni, ci));
                for a in &paths {
                    for b in paths
                        .iter()
                        .filter(|b| same_block(&c.body, a, b) && a.last() < b.last())
                    {
                        let target = format!("{}.{}:{a}..{b}", ns.name.name, c.name.name);
                        let r = apply(
                            &p,
                            &RefactoringRequest::new(Refactoring::ReorderInstructions, &target),
                        );
                        match pdg.can_swap(a, b) {
                            Ok(()) => {
                                assert!(r.is_ok(), "{file} {target}: {:?}", r.diagnostics);
                                let v = check_equivalence(&p, &r.program, &e, &Limits::default());
                                assert!(
                                    matches!(v, Ok(Verdict::Equivalent)),
                                    "{file} {target}: {v:?}"
                                );
                                swapped += 1;
                            }
                            Err(blk) => {
                                let msg = &r.diagnostics[0].message;
                                let kind = match blk.kind {
                                    EdgeKind::Control => "ControlDep",
                                    EdgeKind::Data => "DataDep",
                                    EdgeKind::Qubit => "QubitOrder",
                                };
                                assert!(msg.contains(kind), "{file} {target}: {msg}");
                                let (x, y) = (&pdg.nodes[blk.from].text, &pdg.nodes[blk.to].text);
                                let ok = match blk.kind {
                                    EdgeKind::Control => blk.label == "return",
                                    EdgeKind::Data if blk.label == "trace" => {
                                        pdg.nodes[blk.from].trace && pdg.nodes[blk.to].trace
                                    }
                                    EdgeKind::Data => {
                                        let v = blk.label.split(' ').next().unwrap();
                                        mentions(x, v) && mentions(y, v)
                                    }
                                    EdgeKind::Qubit => {
                                        let (l, r) = blk.label.split_once(" / ").unwrap();
                                        let base =
                                            |s: &str| s.split('[').next().unwrap().to_owned();
                                        mentions(x, &base(l)) && mentions(y, &base(r))
                                    }
                                };
                                assert!(
                                    ok,
                                    "{file} {target}: {kind} `{}` between `{x}` and `{y}`",
                                    blk.label
                                );
                                file_rejected += 1;
                            }
                        }
                    }
                }
            }
        }
        assert!(file_rejected > 0, "{file}: no dependent pair rejected");
        rejected += file_rejected;
    }
    format!("{swapped} independent pairs swapped equivalently, {rejected} dependent pairs rejected, {callables} callables of at most 8 statements among all")
}

fn bell_correlation() -> String {
    // (|00> + |11>)/sqrt(2): amplitude 1/sqrt(2) on the agreeing outcomes
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let want = amp * amp;
    let d = run_distribution(
        &fixture("figure1.qs"),
        "MyNamespace.HelloWorld",
        &Limits::default(),
    )
    .unwrap();
    assert_eq!(d.entries.len(), 2, "{:?}", d.entries);
    for (trace, p) in &d.entries {
        assert!((p - want).abs() <= 1e-9, "{trace:?}: {p}");
        let last = |prefix: &str| {
            let l = trace.iter().find(|l| l.starts_with(prefix)).unwrap();
            l.rsplit(' ').next().unwrap().to_owned()
        };
        assert_eq!(
            last("Measured qubit"),
            last("Measured ancilla"),
            "{trace:?}"
        );
    }
    "two traces at 0.5, measurements agree".into()
}

fn round_trip_and_fuzz() -> String {
    let files = corpus();
    for (file, src) in &files {
        let p = parsed(src);
        let text = print(&p);
        let q = parse(&text, FileId(0)).unwrap_or_else(|d| panic!("{file}: {d:?}"));
        assert!(ast_equal(&p, &q), "{file}");
        assert_eq!(print(&q), text, "{file}: printing is not idempotent");
    }
    const TOKENS: [&str; 40] = [
        "namespace",
        "operation",
        "function",
        "using",
        "let",
        "mutable",
        "set",
        "if",
        "else",
        "for",
        "in",
        "return",
        "Qubit",
        "Int",
        "Unit",
        "(",
        ")",
        "{",
        "}",
        "[",
        "]",
        ";",
        ":",
        ",",
        "..",
        "=",
        "+",
        "*",
        "==",
        "$\"",
        "\"",
        "{x}",
        "H",
        "M",
        "q",
        "0",
        "1",
        "//",
        "\n",
        " ",
    ];
    let bytes = proptest::collection::vec(any::<u8>(), 0..=4096);
    let soup = proptest::collection::vec(prop::sample::select(&TOKENS[..]), 0..=600)
        .prop_map(|t| t.concat().into_bytes())
        .prop_filter("at most 4 KiB", |b| b.len() <= 4096);
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let runs = std::sync::atomic::AtomicUsize::new(0);
    runner
        .run(&prop_oneof![bytes, soup], |input| {
            assert!(input.len() <= 4096);
            let text = String::from_utf8_lossy(&input);
            if let Ok(p) = parse(&text, FileId(0)) {
                let q = parse(&print(&p), FileId(0)).expect("printed text re-parses");
                prop_assert!(ast_equal(&p, &q));
            }
            runs.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            Ok(())
        })
        .unwrap();
    let runs = runs.into_inner();
    assert!(runs >= 10_000);
    format!(
        "{} programs round-trip, {runs} random inputs parsed without a crash",
        files.len()
    )
}

fn atomicity() -> String {
    let dir = tempfile::tempdir().unwrap();
    let (mut checked, mut files) = (0, 0);
    for (file, src) in corpus() {
        let p = parsed(&src);
        let failing: Vec<RefactoringRequest> = candidates(&p)
            .into_iter()
            .filter(|req| {
                apply(&p, req)
                    .diagnostics
                    .first()
                    .is_some_and(|d| d.code == Code::Precondition)
            })
            .take(8)
            .collect();
        if failing.is_empty() {
            continue;
        }
        files += 1;
        for req in failing {
            let path = dir.path().join(&file);
            std::fs::write(&path, &src).unwrap();
            let batch = dir.path().join("request.json");
            std::fs::write(&batch, serde_json::to_string(&req).unwrap()).unwrap();
            let out = Command::new(env!("CARGO_BIN_EXE_qrt"))
                .args(["--write", "apply"])
                .arg(&path)
                .arg("--batch")
                .arg(&batch)
                .output()
                .unwrap();
            assert_eq!(
                out.status.code(),
                Some(2),
                "{file}: {req}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            assert!(out.stdout.is_empty());
            assert_eq!(
                std::fs::read_to_string(&path).unwrap(),
                src,
                "{file}: {req} modified the file"
            );
            checked += 1;
        }
    }
    let stray = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            !e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .ends_with(".qs")
        })
        .count();
    assert_eq!(stray, 1, "temporary files left behind");
    assert!(
        checked >= 100,
        "only {checked} precondition failures exercised"
    );
    format!("{checked}/{checked} precondition failures over {files} files left the input byte-identical")
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> String);
    let criteria: [Criterion; 8] = [
        ("golden split", golden_split),
        ("catalog coverage", catalog_coverage),
        ("master preservation", master_preservation),
        ("gate rule table", gate_rules),
        ("PDG soundness sampling", pdg_sampling),
        ("Bell correlation", bell_correlation),
        ("round-trip and fuzz", round_trip_and_fuzz),
        ("atomicity", atomicity),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr().lock();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let line = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(detail) => format!("criterion {}: {name}: PASS ({detail})", i + 1),
            Err(e) => {
                let why = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                failed.push(*name);
                format!(
                    "criterion {}: {name}: FAIL ({})",
                    i + 1,
                    why.lines().next().unwrap_or("")
                )
            }
        };
        writeln!(err, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
