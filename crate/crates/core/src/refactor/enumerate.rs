//! Systematic request generation: a spread of requests over every
//! refactoring and every site in a program, for exhaustive testing.

use crate::analysis::dups::find_duplicates;
use crate::analysis::index::{all_paths, same_block};
use crate::analysis::qubits::const_int;
use crate::analysis::{analyze, find_unused, Path, SymbolKind};
use crate::syntax::ast::*;

use super::extract::primary_prefix;
use super::rules::{GateRuleTable, RuleKind};
use super::util::stmt_call;
use super::{Refactoring as R, RefactoringRequest};

const MAX_WINDOW: usize = 3;

/// Requests worth trying on `program`. Many will be rejected; every one
/// that succeeds must preserve behavior.
pub fn candidates(program: &Program) -> Vec<RefactoringRequest> {
    let Ok(symbols) = analyze(program) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let rules = GateRuleTable::standard();
    let names: Vec<(String, &Callable)> = program
        .namespaces
        .iter()
        .flat_map(|ns| {
            ns.callables
                .iter()
                .map(move |c| (format!("{}.{}", ns.name.name, c.name.name), c))
        })
        .collect();

    for (q, c) in &names {
        let body = &c.body;
        let paths = all_paths(body);
        let exists = |p: &Path| paths.iter().any(|(x, _)| x == p);
        let ranges = |len: usize| {
            paths.iter().filter_map(move |(p, _)| {
                let end = p.with_last(p.last() + len - 1);
                (exists(&end) && same_block(body, p, &end)).then(|| format!("{q}:{p}..{end}"))
            })
        };

        out.push(
            RefactoringRequest::new(R::Rename, q.as_str())
                .arg("name", format!("{}Renamed", c.name.name)),
        );
        if c.name.name != "Main" {
            out.push(
                RefactoringRequest::new(R::ChangeSignature, q.as_str())
                    .arg("add", "extra : Int = 0"),
            );
        }
        if c.params.len() >= 2 {
            let rev: Vec<String> = (0..c.params.len()).rev().map(|i| i.to_string()).collect();
            out.push(
                RefactoringRequest::new(R::ChangeSignature, q.as_str())
                    .arg("reorder", rev.join(",")),
            );
        }
        for p in &c.params {
            out.push(
                RefactoringRequest::new(R::ChangeSignature, q.as_str())
                    .arg("remove", p.name.name.as_str()),
            );
        }
        let ns = q.rsplit_once('.').map_or("", |x| x.0);
        out.push(
            RefactoringRequest::new(R::ExtractNamespace, q.as_str())
                .arg("namespace", format!("{ns}.Moved")),
        );
        out.push(RefactoringRequest::new(R::InlineCallable, q.as_str()));
        out.push(RefactoringRequest::new(
            R::ParameterizeOperation,
            q.as_str(),
        ));
        out.push(RefactoringRequest::new(R::MergeGates, q.as_str()));

        for len in 1..=MAX_WINDOW {
            for t in ranges(len) {
                out.push(
                    RefactoringRequest::new(R::ExtractOperation, t.as_str())
                        .arg("name", "Extracted"),
                );
                out.push(
                    RefactoringRequest::new(R::ExtractFunction, t.as_str())
                        .arg("name", "Extracted"),
                );
                if len >= 2 {
                    out.push(RefactoringRequest::new(
                        R::ConsolidateMeasurements,
                        t.as_str(),
                    ));
                    out.push(RefactoringRequest::new(R::RollLoop, t.as_str()));
                    out.push(RefactoringRequest::new(R::MergeGates, t.as_str()));
                }
                if len == 2 {
                    out.push(RefactoringRequest::new(R::ReorderInstructions, t.as_str()));
                }
            }
        }
        for rule in rules
            .rules
            .iter()
            .filter(|r| r.kind == RuleKind::Substitution)
        {
            for t in ranges(rule.lhs.len()) {
                out.push(RefactoringRequest::new(R::ReplaceGate, t).arg("rule", rule.name));
            }
        }

        for (p, s) in &paths {
            let t = format!("{q}:{p}");
            if stmt_call(s).is_some() {
                out.push(RefactoringRequest::new(R::InlineCallable, t.as_str()));
                out.push(RefactoringRequest::new(R::SpecializeOperation, t.as_str()));
            }
            match &s.kind {
                StmtKind::For { .. } => {
                    out.push(RefactoringRequest::new(R::UnrollLoop, t.as_str()))
                }
                StmtKind::Using {
                    alloc: QubitAlloc::Array(n),
                    ..
                } => {
                    if let Some(n @ 2..=4) = const_int(n) {
                        let rev: Vec<String> = (0..n).rev().map(|i| i.to_string()).collect();
                        let swap: Vec<String> = [1, 0]
                            .into_iter()
                            .chain(2..n)
                            .map(|i| i.to_string())
                            .collect();
                        out.push(
                            RefactoringRequest::new(R::OrderQubits, t.as_str())
                                .arg("permutation", rev.join(",")),
                        );
                        out.push(
                            RefactoringRequest::new(R::OrderQubits, t.as_str())
                                .arg("permutation", swap.join(",")),
                        );
                    }
                }
                _ => {}
            }
        }

        // the primary block split in two halves
        let prefix = Path(primary_prefix(body));
        let block: Vec<&Path> = paths
            .iter()
            .map(|(p, _)| p)
            .filter(|p| p.0.len() == prefix.0.len() + 1 && prefix.is_prefix_of(p))
            .collect();
        if block.len() >= 2 {
            let m = block.len() / 2;
            let spec = format!(
                "{}..{}:FirstPart,{}..{}:SecondPart",
                block[0],
                block[m - 1],
                block[m],
                block[block.len() - 1]
            );
            out.push(RefactoringRequest::new(R::SplitOperation, q.as_str()).arg("split", spec));
        }

        for d in find_duplicates(c, 1) {
            let end = d.a.with_last(d.a.last() + d.len - 1);
            out.push(
                RefactoringRequest::new(R::RemoveCodeDuplication, format!("{q}:{}..{end}", d.a))
                    .arg("other", d.b.to_string())
                    .arg("name", "Shared"),
            );
        }
    }

    // pairs of callables
    for (i, (a, _)) in names.iter().enumerate() {
        for (b, _) in &names[i + 1..] {
            out.push(RefactoringRequest::new(
                R::MergeOperations,
                format!("{a},{b}"),
            ));
            out.push(RefactoringRequest::new(
                R::ParameterizeOperation,
                format!("{a},{b}"),
            ));
        }
    }

    for id in find_unused(program, &symbols) {
        let s = symbols.symbol(id);
        let owner = program.callable(s.owner);
        let q = format!(
            "{}.{}",
            program.namespaces[s.owner.0].name.name, owner.name.name
        );
        let t = match s.kind {
            SymbolKind::Callable => q,
            SymbolKind::Parameter => format!("{q}::{}", s.name),
            _ => match all_paths(&owner.body)
                .into_iter()
                .rfind(|(_, st)| st.span.contains(&s.decl))
            {
                Some((p, _)) => format!("{q}::{}@{p}", s.name),
                None => continue,
            },
        };
        out.push(RefactoringRequest::new(R::RemoveUnused, t));
    }
    for s in symbols
        .symbols
        .iter()
        .filter(|s| s.kind != SymbolKind::Callable)
    {
        let owner = program.callable(s.owner);
        let q = format!(
            "{}.{}",
            program.namespaces[s.owner.0].name.name, owner.name.name
        );
        let at = all_paths(&owner.body)
            .into_iter()
            .rfind(|(_, st)| st.span.contains(&s.decl))
            .map(|(p, _)| format!("@{p}"));
        let t = format!(
            "{q}::{}{}",
            s.name,
            at.filter(|_| s.kind != SymbolKind::Parameter)
                .unwrap_or_default()
        );
        out.push(RefactoringRequest::new(R::Rename, t).arg("name", format!("{}Renamed", s.name)));
    }
    out
}
