//! Refactoring properties over generated circuits.

mod common;

use common::{Circuit, Op};
use proptest::prelude::*;
use qrt_core::analysis::analyze;
use qrt_core::refactor::rules::{Builtin1, GateOp};
use qrt_core::refactor::{
    apply, candidates, follow_entry, GateRuleTable, Refactoring, RefactoringRequest,
};
use qrt_core::sim::{check_equivalence, check_equivalence_as, Limits, Verdict};
use qrt_core::{ast_equal, print, Program};

const ENTRY: &str = "Gen.Main";

fn equivalent(a: &Program, b: &Program) -> bool {
    matches!(
        check_equivalence(a, b, ENTRY, &Limits::default()),
        Ok(Verdict::Equivalent)
    )
}

/// Statements the circuit body holds before op `k`.
fn stmts_before(ops: &[Op], k: usize) -> usize {
    ops[..k]
        .iter()
        .map(|o| 1 + o.is_measurement() as usize)
        .sum()
}

fn gate_count(p: &Program) -> usize {
    print(p)
        .lines()
        .map(str::trim)
        .filter(|l| {
            [
                "H(",
                "X(",
                "Y(",
                "Z(",
                "S(",
                "T(",
                "CNOT(",
                "CCNOT(",
                "Controlled ",
            ]
            .iter()
            .any(|g| l.starts_with(g))
        })
        .count()
}

fn to_op(g: GateOp, wires: &[usize]) -> Op {
    let name = |b: Builtin1| match b {
        Builtin1::H => "H",
        Builtin1::X => "X",
        Builtin1::Y => "Y",
        Builtin1::Z => "Z",
        Builtin1::S => "S",
        Builtin1::T => "T",
    };
    match g {
        GateOp::One(b, w) => Op::Gate(name(b), wires[w]),
        GateOp::Cnot(c, t) => Op::Cnot(wires[c], wires[t]),
        GateOp::ControlledX(c, t) => Op::ControlledX(wires[c], wires[t]),
    }
}

/// A circuit with the left side of a substitution rule planted at `at`.
fn planted() -> impl Strategy<Value = (Circuit, String, usize, usize)> {
    let names: Vec<&'static str> = GateRuleTable::standard()
        .rules
        .iter()
        .filter(|r| r.kind == qrt_core::refactor::rules::RuleKind::Substitution)
        .map(|r| r.name)
        .collect();
    (
        common::circuit(3, 6, 2),
        prop::sample::select(names),
        any::<prop::sample::Index>(),
        0..3usize,
        0..2usize,
    )
        .prop_filter_map("needs two qubits", |(mut c, rule, at, w0, dw)| {
            let table = GateRuleTable::standard();
            let r = table.get(rule).unwrap();
            if r.wires > c.n {
                return None;
            }
            let w0 = w0 % c.n;
            let w1 = if c.n > 1 {
                (w0 + 1 + dw % (c.n - 1)) % c.n
            } else {
                w0
            };
            let wires = [w0, w1];
            let k = at.index(c.ops.len() + 1);
            let lhs: Vec<Op> = r.lhs.iter().map(|&g| to_op(g, &wires)).collect();
            let n = lhs.len();
            c.ops.splice(k..k, lhs);
            Some((c, rule.to_owned(), k, n))
        })
}

proptest! {
    #![proptest_config(common::config(128))]

    #[test]
    fn merge_gates_is_idempotent_and_shrinking(c in common::circuit(2, 12, 2)) {
        let p = common::parsed(&c.source());
        let req = RefactoringRequest::new(Refactoring::MergeGates, ENTRY);
        let once = apply(&p, &req);
        prop_assert!(gate_count(&once.program) <= gate_count(&p));
        if once.is_ok() {
            prop_assert!(equivalent(&p, &once.program), "{}", print(&once.program));
        } else {
            prop_assert!(ast_equal(&once.program, &p));
        }
        let twice = apply(&once.program, &req);
        prop_assert!(ast_equal(&twice.program, &once.program), "{}", print(&twice.program));
    }

    #[test]
    fn rename_round_trips(c in common::circuit(3, 6, 2)) {
        let p = common::parsed(&c.source());
        let there = apply(&p, &RefactoringRequest::new(Refactoring::Rename, "Gen.Main::qs@0").arg("name", "register"));
        prop_assert!(there.is_ok(), "{:?}", there.diagnostics);
        prop_assert!(!print(&there.program).contains("qs["));
        prop_assert!(equivalent(&p, &there.program));
        let back = apply(&there.program, &RefactoringRequest::new(Refactoring::Rename, "Gen.Main::register@0").arg("name", "qs"));
        prop_assert!(back.is_ok(), "{:?}", back.diagnostics);
        prop_assert!(ast_equal(&back.program, &p));
    }

    #[test]
    fn replace_gate_touches_only_its_window((c, rule, k, len) in planted()) {
        let p = common::parsed(&c.source());
        let s = stmts_before(&c.ops, k);
        let target = format!("{ENTRY}:0.{s}..0.{}", s + len - 1);
        let r = apply(&p, &RefactoringRequest::new(Refactoring::ReplaceGate, &target).arg("rule", &rule));
        prop_assert!(r.is_ok(), "{rule} at {target}: {:?}\n{}", r.diagnostics, c.source());
        prop_assert!(equivalent(&p, &r.program));
        let (before, after) = (print(&p), print(&r.program));
        let (b, a): (Vec<&str>, Vec<&str>) = (before.lines().collect(), after.lines().collect());
        let first = b.iter().position(|l| l.contains("using (qs")).unwrap() + 1 + s;
        let prefix = b.iter().zip(&a).take_while(|(x, y)| x == y).count();
        let suffix = b.iter().rev().zip(a.iter().rev()).take_while(|(x, y)| x == y).count();
        prop_assert!(prefix >= first, "changed before the window:\n{after}");
        prop_assert!(b.len() - suffix.min(b.len() - prefix) <= first + len, "changed after the window:\n{after}");
    }

    #[test]
    fn unroll_then_roll_restores_the_loop(
        c in common::circuit(4, 4, 1),
        lo in 0..3i64,
        span in 1..3i64,
        gate in prop::sample::select(&common::GATES[..]),
        cnot in any::<bool>(),
    ) {
        let n = c.n as i64;
        let hi = lo + span;
        prop_assume!(hi < n);
        let body = if cnot && hi + 1 < n {
            format!("CNOT(qs[i], qs[{}]);", n - 1)
        } else {
            format!("{gate}(qs[i]);")
        };
        let src = c.source().replacen(
            "            Reset(qs[0]);",
            &format!("            for (i in {lo}..{hi}) {{\n                {body}\n            }}\n            let fin = MultiM(qs);\n            Message($\"fin {{fin}}\");\n            Reset(qs[0]);"),
            1,
        );
        let p = common::parsed(&src);
        let s = stmts_before(&c.ops, c.ops.len());
        let unrolled = apply(&p, &RefactoringRequest::new(Refactoring::UnrollLoop, format!("{ENTRY}:0.{s}")));
        prop_assert!(unrolled.is_ok(), "{:?}", unrolled.diagnostics);
        prop_assert!(equivalent(&p, &unrolled.program));
        let k = (hi - lo) as usize + 1;
        let rolled = apply(
            &unrolled.program,
            &RefactoringRequest::new(Refactoring::RollLoop, format!("{ENTRY}:0.{s}..0.{}", s + k - 1)),
        );
        prop_assert!(rolled.is_ok(), "{:?}\n{}", rolled.diagnostics, print(&unrolled.program));
        prop_assert!(equivalent(&p, &rolled.program));
        prop_assert!(ast_equal(&rolled.program, &p), "{}", print(&rolled.program));
    }
}

proptest! {
    #![proptest_config(common::config(24))]

    /// Every candidate either preserves behavior or fails without touching
    /// the program.
    #[test]
    fn candidates_preserve_or_leave_untouched(c in common::circuit(3, 6, 2)) {
        let p = common::parsed(&c.source());
        for req in candidates(&p) {
            let r = apply(&p, &req);
            if !r.is_ok() {
                prop_assert!(ast_equal(&r.program, &p), "{req}");
                continue;
            }
            prop_assert!(analyze(&r.program).is_ok(), "{req}");
            let after = follow_entry(&p, &r.program, ENTRY);
            prop_assert!(after.is_some(), "{req}: entry lost");
            let v = check_equivalence_as(&p, ENTRY, &r.program, &after.unwrap(), &Limits::default());
            prop_assert!(matches!(v, Ok(Verdict::Equivalent)), "{req}: {v:?}\n{}", print(&r.program));
        }
    }
}
