#![allow(dead_code)]

use std::path::PathBuf;

use qrt_core::analysis::{analyze, entry_points};
use qrt_core::{parse, FileId, Program};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// Every corpus program, sorted by file name.
pub fn corpus() -> Vec<(String, String)> {
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

pub fn parsed(src: &str) -> Program {
    parse(src, FileId(0)).unwrap_or_else(|d| panic!("{d:?}"))
}

/// Qualified name of the single entry point.
pub fn entry(p: &Program) -> String {
    let syms = analyze(p).unwrap();
    let e = entry_points(p, &syms);
    assert_eq!(e.len(), 1, "expected one entry point");
    let l = e[0];
    format!(
        "{}.{}",
        p.namespaces[l.0].name.name,
        p.callable(l).name.name
    )
}

/// One step of a generated straight-line circuit over `qs`.
#[derive(Clone, Debug)]
pub enum Op {
    Gate(&'static str, usize),
    Cnot(usize, usize),
    Ccnot(usize, usize, usize),
    ControlledX(usize, usize),
    M(usize),
    MultiM,
}

impl Op {
    pub fn is_measurement(&self) -> bool {
        matches!(self, Op::M(_) | Op::MultiM)
    }
}

pub const GATES: [&str; 6] = ["H", "X", "Y", "Z", "S", "T"];

#[derive(Clone, Debug)]
pub struct Circuit {
    pub n: usize,
    pub ops: Vec<Op>,
}

impl Circuit {
    /// Q# text: the ops inside one `using` block, each measurement
    /// followed by a message, then a `Reset` of every qubit.
    pub fn source(&self) -> String {
        let mut body = String::new();
        for (k, op) in self.ops.iter().enumerate() {
            let line = match op {
                Op::Gate(g, a) => format!("{g}(qs[{a}]);"),
                Op::Cnot(a, b) => format!("CNOT(qs[{a}], qs[{b}]);"),
                Op::Ccnot(a, b, c) => format!("CCNOT(qs[{a}], qs[{b}], qs[{c}]);"),
                Op::ControlledX(a, b) => format!("Controlled X([qs[{a}]], qs[{b}]);"),
                Op::M(a) => {
                    format!("let r{k} = M(qs[{a}]);\n            Message($\"m{k} {{r{k}}}\");")
                }
                Op::MultiM => {
                    format!("let r{k} = MultiM(qs);\n            Message($\"m{k} {{r{k}}}\");")
                }
            };
            body += "            ";
            body += &line;
            body += "\n";
        }
        for q in 0..self.n {
            body += &format!("            Reset(qs[{q}]);\n");
        }
        format!(
            "namespace Gen {{\n    operation Main() : Unit {{\n        using (qs = Qubit[{}]) {{\n{body}        }}\n    }}\n}}\n",
            self.n
        )
    }
}

fn op(n: usize) -> impl proptest::strategy::Strategy<Value = Op> {
    use proptest::prelude::*;
    (0..7usize, 0..n, 0..n, 0..n, 0..GATES.len()).prop_map(move |(kind, a, b, c, g)| match kind {
        1 if a != b => Op::Cnot(a, b),
        2 if a != b && b != c && a != c => Op::Ccnot(a, b, c),
        3 if a != b => Op::ControlledX(a, b),
        4 => Op::M(a),
        5 => Op::MultiM,
        _ => Op::Gate(GATES[g], a),
    })
}

/// Circuits over 1 to `max_qubits` qubits with at most `max_meas`
/// measurement statements.
pub fn circuit(
    max_qubits: usize,
    max_ops: usize,
    max_meas: usize,
) -> impl proptest::strategy::Strategy<Value = Circuit> {
    use proptest::prelude::*;
    (1..=max_qubits)
        .prop_flat_map(move |n| (Just(n), proptest::collection::vec(op(n), 0..=max_ops)))
        .prop_map(move |(n, mut ops)| {
            let mut seen = 0;
            ops.retain(|o| {
                let keep = !o.is_measurement() || seen < max_meas;
                seen += o.is_measurement() as usize;
                keep
            });
            Circuit { n, ops }
        })
}

pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
