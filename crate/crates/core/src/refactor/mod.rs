//! The refactoring catalog as precondition-checked AST transformations.
//!
//! Every operation takes a parsed program and a [`RefactoringRequest`] and
//! returns an [`EditResult`]. A successful result has been printed,
//! re-parsed, resolved and safety-checked; a failed one carries the input
//! unchanged plus at least one diagnostic.

mod catalog;
mod enumerate;
mod extract;
mod gates;
mod inline;
mod loops;
mod measure;
mod namespace;
mod rename;
mod reorder;
pub mod rules;
mod signature;
mod similar;
mod target;
mod unused;
mod util;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::analysis::index::block_of;
use crate::analysis::{self, CallableLoc, Path, SymbolId, SymbolKind, SymbolTable};
use crate::diagnostic::{Code, Diagnostic};
use crate::syntax::ast::{Block, Callable, Ident, Program};
use crate::syntax::{parse, print, FileId};

pub use catalog::{catalog, CatalogEntry, TABLE_ROWS};
pub use enumerate::candidates;
pub use rules::{matrix_rule_check, GateRuleTable, Rule};
pub use target::Target;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Refactoring {
    Rename,
    ChangeSignature,
    ExtractOperation,
    ExtractFunction,
    ExtractNamespace,
    InlineCallable,
    SplitOperation,
    MergeOperations,
    ParameterizeOperation,
    SpecializeOperation,
    MergeGates,
    ReplaceGate,
    ReorderInstructions,
    OrderQubits,
    ConsolidateMeasurements,
    UnrollLoop,
    RollLoop,
    RemoveUnused,
    RemoveCodeDuplication,
}

impl Refactoring {
    pub const ALL: [Refactoring; 19] = [
        Refactoring::Rename,
        Refactoring::ChangeSignature,
        Refactoring::ExtractOperation,
        Refactoring::ExtractFunction,
        Refactoring::ExtractNamespace,
        Refactoring::InlineCallable,
        Refactoring::SplitOperation,
        Refactoring::MergeOperations,
        Refactoring::ParameterizeOperation,
        Refactoring::SpecializeOperation,
        Refactoring::MergeGates,
        Refactoring::ReplaceGate,
        Refactoring::ReorderInstructions,
        Refactoring::OrderQubits,
        Refactoring::ConsolidateMeasurements,
        Refactoring::UnrollLoop,
        Refactoring::RollLoop,
        Refactoring::RemoveUnused,
        Refactoring::RemoveCodeDuplication,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Refactoring::Rename => "rename",
            Refactoring::ChangeSignature => "change-signature",
            Refactoring::ExtractOperation => "extract-operation",
            Refactoring::ExtractFunction => "extract-function",
            Refactoring::ExtractNamespace => "extract-namespace",
            Refactoring::InlineCallable => "inline-callable",
            Refactoring::SplitOperation => "split-operation",
            Refactoring::MergeOperations => "merge-operations",
            Refactoring::ParameterizeOperation => "parameterize-operation",
            Refactoring::SpecializeOperation => "specialize-operation",
            Refactoring::MergeGates => "merge-gates",
            Refactoring::ReplaceGate => "replace-gate",
            Refactoring::ReorderInstructions => "reorder-instructions",
            Refactoring::OrderQubits => "order-qubits",
            Refactoring::ConsolidateMeasurements => "consolidate-measurements",
            Refactoring::UnrollLoop => "unroll-loop",
            Refactoring::RollLoop => "roll-loop",
            Refactoring::RemoveUnused => "remove-unused",
            Refactoring::RemoveCodeDuplication => "remove-code-duplication",
        }
    }

    /// Accepts `kebab-case` or `snake_case`.
    pub fn from_name(s: &str) -> Option<Refactoring> {
        let s = s.replace('_', "-");
        Self::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for Refactoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type Args = BTreeMap<String, String>;

/// A refactoring name, a target locator and named string arguments.
///
/// Targets: `Ns.Callable` (or a comma-separated list), `Ns.Callable::name`
/// with an optional `@path` for symbols, and `Ns.Callable:path[..path]`
/// for statement ranges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefactoringRequest {
    pub refactoring: Refactoring,
    pub target: String,
    #[serde(default, deserialize_with = "de_args")]
    pub args: Args,
}

fn de_args<'de, D: Deserializer<'de>>(d: D) -> Result<Args, D::Error> {
    let raw: BTreeMap<String, serde_json::Value> = BTreeMap::deserialize(d)?;
    Ok(raw
        .into_iter()
        .map(|(k, v)| {
            let v = match v {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            (k, v)
        })
        .collect())
}

impl RefactoringRequest {
    pub fn new(refactoring: Refactoring, target: impl Into<String>) -> Self {
        RefactoringRequest {
            refactoring,
            target: target.into(),
            args: Args::new(),
        }
    }

    pub fn arg(mut self, key: &str, value: impl Into<String>) -> Self {
        self.args.insert(key.to_owned(), value.into());
        self
    }
}

impl fmt::Display for RefactoringRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.refactoring, self.target)?;
        for (k, v) in &self.args {
            write!(f, " {k}={v:?}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct EditResult {
    pub program: Program,
    /// Human-readable description of each change.
    pub changes: Vec<String>,
    /// Empty on success.
    pub diagnostics: Vec<Diagnostic>,
}

impl EditResult {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// Applies one refactoring. On failure the returned program is the input.
pub fn apply(program: &Program, req: &RefactoringRequest) -> EditResult {
    match run(program, req) {
        Ok((program, changes)) => EditResult {
            program,
            changes,
            diagnostics: Vec::new(),
        },
        Err(d) => EditResult {
            program: program.clone(),
            changes: Vec::new(),
            diagnostics: vec![d],
        },
    }
}

fn run(program: &Program, req: &RefactoringRequest) -> Result<(Program, Vec<String>), Diagnostic> {
    let ctx = Ctx::new(program)?;
    let target = Target::parse(&req.target)?;
    let a = &req.args;
    let out = match req.refactoring {
        Refactoring::Rename => rename::rename(&ctx, &target, a)?,
        Refactoring::ChangeSignature => signature::change_signature(&ctx, &target, a)?,
        Refactoring::ExtractOperation => extract::extract(&ctx, &target, a, false)?,
        Refactoring::ExtractFunction => extract::extract(&ctx, &target, a, true)?,
        Refactoring::ExtractNamespace => namespace::extract_namespace(&ctx, &target, a)?,
        Refactoring::InlineCallable => inline::inline_callable(&ctx, &target, a)?,
        Refactoring::SplitOperation => extract::split(&ctx, &target, a)?,
        Refactoring::MergeOperations => similar::merge_operations(&ctx, &target, a)?,
        Refactoring::ParameterizeOperation => similar::parameterize(&ctx, &target, a)?,
        Refactoring::SpecializeOperation => similar::specialize(&ctx, &target, a)?,
        Refactoring::MergeGates => gates::merge_gates(&ctx, &target, a)?,
        Refactoring::ReplaceGate => gates::replace_gate(&ctx, &target, a)?,
        Refactoring::ReorderInstructions => reorder::reorder_instructions(&ctx, &target, a)?,
        Refactoring::OrderQubits => reorder::order_qubits(&ctx, &target, a)?,
        Refactoring::ConsolidateMeasurements => measure::consolidate(&ctx, &target, a)?,
        Refactoring::UnrollLoop => loops::unroll(&ctx, &target, a)?,
        Refactoring::RollLoop => loops::roll(&ctx, &target, a)?,
        Refactoring::RemoveUnused => unused::remove_unused(&ctx, &target, a)?,
        Refactoring::RemoveCodeDuplication => extract::remove_duplication(&ctx, &target, a)?,
    };
    let done = Ctx::new(&out.program).map_err(|d| {
        Diagnostic::precondition(format!(
            "the result would not be well-formed: {}: {}",
            d.code, d.message
        ))
    })?;
    Ok((done.program, out.changes))
}

/// Name of the entry callable `entry` of `before` in `after`: the same
/// name when it still exists, else the one new callable with the same
/// parameters and body (a rename or move). Call arguments are kept.
pub fn follow_entry(before: &Program, after: &Program, entry: &str) -> Option<String> {
    let (name, call_args) = match entry.find('(') {
        Some(i) => entry.split_at(i),
        None => (entry, ""),
    };
    let name = name.trim();
    if after.find_callable(name).is_some() {
        return Some(entry.to_owned());
    }
    let old = before.callable(before.find_callable(name)?);
    let shape = |c: &Callable| {
        let mut c = util::normalized(c);
        c.name = Ident::new("");
        c
    };
    let want = shape(old);
    let found: Vec<String> = after
        .namespaces
        .iter()
        .flat_map(|ns| ns.callables.iter().map(move |c| (ns, c)))
        .filter(|(ns, c)| {
            before
                .find_callable(&format!("{}.{}", ns.name.name, c.name.name))
                .is_none()
                && shape(c) == want
        })
        .map(|(ns, c)| format!("{}.{}{call_args}", ns.name.name, c.name.name))
        .collect();
    match found.as_slice() {
        [one] => Some(one.clone()),
        _ => None,
    }
}

/// A transformed program before it is re-checked.
pub(crate) struct Outcome {
    pub program: Program,
    pub changes: Vec<String>,
}

impl Outcome {
    pub fn new(program: Program, change: impl Into<String>) -> Self {
        Outcome {
            program,
            changes: vec![change.into()],
        }
    }
}

/// A contiguous run of sibling statements in one block.
#[derive(Clone, Debug)]
pub(crate) struct StmtRange {
    pub loc: CallableLoc,
    pub from: Path,
    pub to: Path,
    /// Indices within the block, inclusive.
    pub lo: usize,
    pub hi: usize,
}

impl StmtRange {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    /// Paths of the statements in the range.
    pub fn paths(&self) -> Vec<Path> {
        (0..self.len())
            .map(|k| self.from.with_last(self.from.last() + k))
            .collect()
    }
}

/// A program re-parsed from canonical text together with its symbols.
pub(crate) struct Ctx {
    pub program: Program,
    pub symbols: SymbolTable,
}

impl Ctx {
    pub fn new(program: &Program) -> Result<Ctx, Diagnostic> {
        let program = parse(&print(program), FileId(0)).map_err(|mut d| d.remove(0))?;
        let symbols = analysis::analyze(&program).map_err(|mut d| d.remove(0))?;
        Ok(Ctx { program, symbols })
    }

    pub fn callable(&self, name: &str) -> Result<CallableLoc, Diagnostic> {
        self.program
            .find_callable(name)
            .ok_or_else(|| request(format!("no callable `{name}`")))
    }

    pub fn qualified(&self, loc: CallableLoc) -> String {
        format!(
            "{}.{}",
            self.program.namespaces[loc.0].name.name,
            self.program.callable(loc).name.name
        )
    }

    pub fn body(&self, loc: CallableLoc) -> &Block {
        &self.program.callable(loc).body
    }

    pub fn single_callable(&self, t: &Target) -> Result<CallableLoc, Diagnostic> {
        match t {
            Target::Callables(v) if v.len() == 1 => self.callable(&v[0]),
            _ => Err(request(format!(
                "expected a single callable target, got `{t}`"
            ))),
        }
    }

    pub fn callables(&self, t: &Target) -> Result<Vec<CallableLoc>, Diagnostic> {
        match t {
            Target::Callables(v) => v.iter().map(|n| self.callable(n)).collect(),
            _ => Err(request(format!("expected callable targets, got `{t}`"))),
        }
    }

    pub fn range(&self, t: &Target) -> Result<StmtRange, Diagnostic> {
        let Target::Stmts { callable, from, to } = t else {
            return Err(request(format!(
                "expected a statement range target, got `{t}`"
            )));
        };
        let loc = self.callable(callable)?;
        self.range_in(loc, from, to)
    }

    pub fn range_in(
        &self,
        loc: CallableLoc,
        from: &Path,
        to: &Path,
    ) -> Result<StmtRange, Diagnostic> {
        let body = self.body(loc);
        let (_, lo) =
            block_of(body, from).ok_or_else(|| request(format!("no statement at {from}")))?;
        let (_, hi) = block_of(body, to).ok_or_else(|| request(format!("no statement at {to}")))?;
        if !analysis::index::same_block(body, from, to) {
            return Err(Diagnostic::precondition(format!(
                "{from} and {to} are not in the same block"
            )));
        }
        if hi < lo {
            return Err(Diagnostic::precondition("the statement range is empty"));
        }
        Ok(StmtRange {
            loc,
            from: from.clone(),
            to: to.clone(),
            lo,
            hi,
        })
    }

    pub fn stmt(&self, t: &Target) -> Result<(CallableLoc, Path), Diagnostic> {
        match t {
            Target::Stmts { callable, from, to } if from == to => {
                let loc = self.callable(callable)?;
                block_of(self.body(loc), from)
                    .ok_or_else(|| request(format!("no statement at {from}")))?;
                Ok((loc, from.clone()))
            }
            _ => Err(request(format!(
                "expected a single statement target, got `{t}`"
            ))),
        }
    }

    /// Symbol named by a `Ns.Callable::name[@path]` or `Ns.Callable` target.
    pub fn symbol(&self, t: &Target) -> Result<SymbolId, Diagnostic> {
        match t {
            Target::Callables(v) if v.len() == 1 => {
                let loc = self.callable(&v[0])?;
                Ok(self
                    .symbols
                    .callable_symbol(loc)
                    .expect("callables are resolved"))
            }
            Target::Symbol { callable, name, at } => {
                let loc = self.callable(callable)?;
                let mut found: Vec<&analysis::Symbol> = self
                    .symbols
                    .locals_of(loc)
                    .filter(|s| &s.name == name)
                    .collect();
                if let Some(p) = at {
                    let stmt = analysis::index::stmt_at(self.body(loc), p)
                        .ok_or_else(|| request(format!("no statement at {p}")))?;
                    found
                        .retain(|s| s.kind != SymbolKind::Parameter && stmt.span.contains(&s.decl));
                    // the innermost declaring statement wins
                    found.sort_by_key(|s| std::cmp::Reverse(s.decl.lo));
                    found.truncate(1);
                }
                match found.as_slice() {
                    [s] => Ok(s.id),
                    [] => Err(request(format!("no symbol `{name}` in `{callable}`"))),
                    _ => Err(request(format!(
                        "`{name}` is declared {} times in `{callable}`; add @<path>",
                        found.len()
                    ))),
                }
            }
            _ => Err(request(format!("expected a symbol target, got `{t}`"))),
        }
    }
}

pub(crate) fn request(msg: impl Into<String>) -> Diagnostic {
    Diagnostic::error(Code::Request, None, msg)
}

pub(crate) fn arg<'a>(args: &'a Args, key: &str) -> Option<&'a str> {
    args.get(key).map(String::as_str)
}

pub(crate) fn req_arg<'a>(args: &'a Args, key: &str) -> Result<&'a str, Diagnostic> {
    arg(args, key).ok_or_else(|| request(format!("missing argument `{key}`")))
}
