//! Exact branching statevector simulation: trace distributions, unitary
//! extraction and the behavioral equivalence check.

pub mod interp;
pub mod state;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{self, CallableLoc, SymbolTable};
use crate::diagnostic::{Code, Diagnostic};
use crate::syntax::ast::{ExprKind, Program, Type};
use crate::syntax::{parse, parse_expr, print, FileId};

pub use interp::{SimError, Value};
pub use state::{Matrix, StateVector};

use interp::{Machine, Mode};

/// Tolerance for end-to-end distribution comparison.
pub const DIST_TOL: f64 = 1e-9;
/// Tolerance for whole-program unitary comparison.
pub const UNITARY_TOL: f64 = 1e-9;
/// Tolerance for gate-rule identities.
pub const RULE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Limits {
    pub max_qubits: usize,
    pub max_branches: usize,
    pub max_steps: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_qubits: 12,
            max_branches: 4096,
            max_steps: 1_000_000,
        }
    }
}

/// Probability of each message trace, plus the mass of pruned branches.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceDistribution {
    pub entries: BTreeMap<Vec<String>, f64>,
    pub pruned: f64,
}

#[derive(Serialize)]
struct JsonEntry<'a> {
    trace: &'a [String],
    p: f64,
}

impl TraceDistribution {
    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn get(&self, trace: &[&str]) -> f64 {
        let key: Vec<String> = trace.iter().map(|s| s.to_string()).collect();
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    /// `[{trace, p}]` sorted by trace.
    pub fn to_json(&self) -> serde_json::Value {
        let v: Vec<JsonEntry> = self
            .entries
            .iter()
            .map(|(t, p)| JsonEntry { trace: t, p: *p })
            .collect();
        serde_json::to_value(v).expect("serializable")
    }
}

/// A program re-parsed from its canonical text and analyzed, so spans
/// and resolutions are consistent.
pub struct Prepared {
    pub program: Program,
    pub symbols: SymbolTable,
}

impl Prepared {
    pub fn new(program: &Program) -> Result<Prepared, Diagnostic> {
        let text = print(program);
        let program = parse(&text, FileId(0)).map_err(first)?;
        let symbols = analysis::analyze(&program).map_err(first)?;
        Ok(Prepared { program, symbols })
    }

    /// Parses an entry designator: `Name`, `Ns.Name` or `Name(1, 2)` with
    /// integer literal arguments.
    pub fn entry(&self, entry: &str) -> Result<(CallableLoc, Vec<Value>), Diagnostic> {
        let bad = || Diagnostic::error(Code::Request, None, format!("invalid entry `{entry}`"));
        let e = parse_expr(entry).map_err(|_| bad())?;
        let (name, args) = match &e.kind {
            ExprKind::Name(n) => (n.clone(), Vec::new()),
            ExprKind::Call(callee, args) => {
                let n = callee.as_name().ok_or_else(bad)?.to_owned();
                let vals = args
                    .iter()
                    .map(|a| match a.kind {
                        ExprKind::Int(v) => Ok(Value::Int(v)),
                        _ => Err(bad()),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                (n, vals)
            }
            _ => return Err(bad()),
        };
        let loc = self.program.find_callable(&name).ok_or_else(|| {
            Diagnostic::error(
                Code::Precondition,
                None,
                format!("entry callable `{name}` not found"),
            )
        })?;
        Ok((loc, args))
    }
}

fn first(mut d: Vec<Diagnostic>) -> Diagnostic {
    d.remove(0)
}

fn check_classical_entry(p: &Prepared, loc: CallableLoc, args: &[Value]) -> Result<(), Diagnostic> {
    let c = p.program.callable(loc);
    if c.params.len() != args.len() || c.params.iter().any(|p| p.ty != Type::Int) {
        return Err(Diagnostic::precondition(format!(
            "entry `{}` must take only Int parameters, supplied as literals",
            c.name.name
        )));
    }
    Ok(())
}

/// Enumerates every measurement path of `entry` and sums the probability
/// of each message trace.
pub fn run_distribution(
    program: &Program,
    entry: &str,
    limits: &Limits,
) -> Result<TraceDistribution, Diagnostic> {
    let p = Prepared::new(program)?;
    let (loc, args) = p.entry(entry)?;
    check_classical_entry(&p, loc, &args)?;
    distribution(&p, loc, &args, limits).map_err(|e| e.to_diagnostic())
}

fn distribution(
    p: &Prepared,
    loc: CallableLoc,
    args: &[Value],
    limits: &Limits,
) -> Result<TraceDistribution, SimError> {
    let mut dist = TraceDistribution::default();
    let mut work: Vec<Vec<bool>> = vec![Vec::new()];
    let mut leaves = 0;
    while let Some(prefix) = work.pop() {
        leaves += 1;
        if leaves > limits.max_branches {
            return Err(SimError::Limit(format!(
                "more than {} measurement branches",
                limits.max_branches
            )));
        }
        let mut m = Machine::new(&p.program, &p.symbols, limits, Mode::Explore, &prefix);
        m.call(loc, args.to_vec())?;
        *dist.entries.entry(m.trace).or_insert(0.0) += m.prob;
        dist.pruned += m.pruned;
        work.extend(m.pending.into_iter().rev());
    }
    Ok(dist)
}

/// Runs `entry` along the given measurement outcomes without
/// renormalization; returns the trace and the squared norm of the final
/// state (the path probability), or `None` if the path has zero weight.
pub fn run_forced(
    program: &Program,
    entry: &str,
    outcomes: &[bool],
    limits: &Limits,
) -> Result<(Vec<String>, f64, usize), Diagnostic> {
    let p = Prepared::new(program)?;
    let (loc, args) = p.entry(entry)?;
    check_classical_entry(&p, loc, &args)?;
    let mut m = Machine::new(&p.program, &p.symbols, limits, Mode::Forced, outcomes);
    m.call(loc, args).map_err(|e| e.to_diagnostic())?;
    Ok((m.trace, m.state.norm_sqr(), m.taken.len()))
}

/// Number of wires each parameter of `loc` receives for a register of
/// `n` wires: one per `Qubit`, the rest split evenly across `Qubit[]`.
fn wire_layout(p: &Prepared, loc: CallableLoc, n: usize) -> Result<Vec<usize>, Diagnostic> {
    let c = p.program.callable(loc);
    let scalars = c.params.iter().filter(|p| p.ty == Type::Qubit).count();
    let arrays = c
        .params
        .iter()
        .filter(|p| p.ty == Type::array(Type::Qubit))
        .count();
    if scalars + arrays != c.params.len() {
        return Err(Diagnostic::precondition(format!(
            "`{}` must take only qubit parameters",
            c.name.name
        )));
    }
    let rest = n.checked_sub(scalars).ok_or_else(|| {
        Diagnostic::precondition(format!("`{}` needs at least {scalars} wires", c.name.name))
    })?;
    if (arrays == 0 && rest != 0) || (arrays > 0 && rest % arrays != 0) {
        return Err(Diagnostic::precondition(format!(
            "{n} wires cannot be split across the parameters of `{}`",
            c.name.name
        )));
    }
    let per = rest.checked_div(arrays).unwrap_or(0);
    Ok(c.params
        .iter()
        .map(|p| if p.ty == Type::Qubit { 1 } else { per })
        .collect())
}

/// The `2^n x 2^n` unitary implemented by `entry` on `n` wires.
pub fn unitary_of(program: &Program, entry: &str, n: usize) -> Result<Matrix, Diagnostic> {
    let p = Prepared::new(program)?;
    let (loc, _) = p.entry(entry)?;
    unitary(&p, loc, n, &Limits::default())
}

fn unitary(
    p: &Prepared,
    loc: CallableLoc,
    n: usize,
    limits: &Limits,
) -> Result<Matrix, Diagnostic> {
    if n > 6 {
        return Err(Diagnostic::error(
            Code::Limit,
            None,
            format!("unitary extraction is limited to 6 wires, got {n}"),
        ));
    }
    let layout = wire_layout(p, loc, n)?;
    let mut cols = Vec::with_capacity(1 << n);
    for b in 0..1usize << n {
        let mut next = 0;
        let args: Vec<Value> = p
            .program
            .callable(loc)
            .params
            .iter()
            .zip(&layout)
            .map(|(prm, &k)| {
                let ws: Vec<usize> = (next..next + k).collect();
                next += k;
                if prm.ty == Type::Qubit {
                    Value::Qubit(ws[0])
                } else {
                    Value::Array(ws.into_iter().map(Value::Qubit).collect())
                }
            })
            .collect();
        let mut m = Machine::new(&p.program, &p.symbols, limits, Mode::Unitary, &[])
            .with_state(StateVector::basis(n, b));
        m.call(loc, args).map_err(|e| e.to_diagnostic())?;
        cols.push(m.state.amplitudes().to_vec());
    }
    Ok(Matrix::from_columns(&cols))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "camelCase")]
pub enum Verdict {
    Equivalent,
    Inequivalent {
        witness: Vec<String>,
        #[serde(rename = "probA")]
        p_a: f64,
        #[serde(rename = "probB")]
        p_b: f64,
    },
    Inconclusive {
        reason: String,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }
}

/// Wires given to each `Qubit[]` parameter when comparing callables that
/// take qubits.
pub const ARRAY_WIRES: usize = 2;

/// Compares the observable behavior of `entry` in two programs.
///
/// Entries with only classical parameters are compared by trace
/// distribution; entries taking qubits are compared by unitary up to
/// global phase.
pub fn check_equivalence(
    a: &Program,
    b: &Program,
    entry: &str,
    limits: &Limits,
) -> Result<Verdict, Diagnostic> {
    check_equivalence_as(a, entry, b, entry, limits)
}

/// Like [`check_equivalence`], for an entry that is named differently in
/// the second program.
pub fn check_equivalence_as(
    a: &Program,
    entry_a: &str,
    b: &Program,
    entry_b: &str,
    limits: &Limits,
) -> Result<Verdict, Diagnostic> {
    let pa = Prepared::new(a)?;
    let pb = Prepared::new(b)?;
    let (la, args_a) = pa.entry(entry_a)?;
    let (lb, args_b) = pb.entry(entry_b)?;
    let takes_qubits = |p: &Prepared, l: CallableLoc| {
        p.program
            .callable(l)
            .params
            .iter()
            .any(|p| p.ty.is_quantum())
    };
    if takes_qubits(&pa, la) || takes_qubits(&pb, lb) {
        return Ok(compare_unitaries(&pa, la, &pb, lb, limits));
    }
    check_classical_entry(&pa, la, &args_a)?;
    check_classical_entry(&pb, lb, &args_b)?;
    let ra = distribution(&pa, la, &args_a, limits);
    let rb = distribution(&pb, lb, &args_b, limits);
    Ok(match (ra, rb) {
        (Ok(da), Ok(db)) => compare(&da, &db),
        (Err(SimError::Limit(m)), _) | (_, Err(SimError::Limit(m))) => {
            Verdict::Inconclusive { reason: m }
        }
        (Err(ea), Err(eb)) => Verdict::Inconclusive {
            reason: format!(
                "both programs fail: {} / {}",
                ea.to_diagnostic().message,
                eb.to_diagnostic().message
            ),
        },
        (Err(e), Ok(_)) => Verdict::Inequivalent {
            witness: vec![error_trace(&e)],
            p_a: 1.0,
            p_b: 0.0,
        },
        (Ok(_), Err(e)) => Verdict::Inequivalent {
            witness: vec![error_trace(&e)],
            p_a: 0.0,
            p_b: 1.0,
        },
    })
}

fn error_trace(e: &SimError) -> String {
    let d = e.to_diagnostic();
    format!("<{}: {}>", d.code, d.message)
}

fn compare_unitaries(
    pa: &Prepared,
    la: CallableLoc,
    pb: &Prepared,
    lb: CallableLoc,
    limits: &Limits,
) -> Verdict {
    let wires = |p: &Prepared, l: CallableLoc| {
        p.program
            .callable(l)
            .params
            .iter()
            .map(|p| if p.ty == Type::Qubit { 1 } else { ARRAY_WIRES })
            .sum::<usize>()
    };
    let n = wires(pa, la);
    if n != wires(pb, lb) {
        return Verdict::Inequivalent {
            witness: vec!["<different qubit signatures>".into()],
            p_a: 1.0,
            p_b: 0.0,
        };
    }
    match (unitary(pa, la, n, limits), unitary(pb, lb, n, limits)) {
        (Ok(ua), Ok(ub)) => {
            if ua.equal_up_to_phase(&ub, UNITARY_TOL) {
                Verdict::Equivalent
            } else {
                Verdict::Inequivalent {
                    witness: vec!["<unitaries differ>".into()],
                    p_a: 1.0,
                    p_b: 0.0,
                }
            }
        }
        (Err(e), _) | (_, Err(e)) => Verdict::Inconclusive { reason: e.message },
    }
}

fn compare(a: &TraceDistribution, b: &TraceDistribution) -> Verdict {
    let mut worst: Option<(&Vec<String>, f64, f64)> = None;
    let keys: std::collections::BTreeSet<&Vec<String>> =
        a.entries.keys().chain(b.entries.keys()).collect();
    for k in keys {
        let (pa, pb) = (a.entries.get(k), b.entries.get(k));
        let differs = match (pa, pb) {
            (Some(x), Some(y)) => (x - y).abs() > DIST_TOL,
            _ => true,
        };
        if differs {
            let (x, y) = (pa.copied().unwrap_or(0.0), pb.copied().unwrap_or(0.0));
            if worst.is_none_or(|w| (x - y).abs() > (w.1 - w.2).abs()) {
                worst = Some((k, x, y));
            }
        }
    }
    match worst {
        None => Verdict::Equivalent,
        Some((k, x, y)) => Verdict::Inequivalent {
            witness: k.clone(),
            p_a: x,
            p_b: y,
        },
    }
}
