//! Extract operation / function, split operation and remove code
//! duplication, all built on one range extraction.

use std::collections::HashMap;

use crate::analysis::calls::{builtin_callee, user_callee};
use crate::analysis::dups::canonical;
use crate::analysis::index::{block_of, block_of_mut, same_block};
use crate::analysis::{Path, SymbolId};
use crate::diagnostic::Diagnostic;
use crate::syntax::ast::*;

use super::util::{
    all_names, check_new_name, contains_return, each_expr, each_stmt, extent, free_symbols, fresh,
    live_out, rename_symbols,
};
use super::{arg, req_arg, request, Args, Ctx, Outcome, StmtRange, Target};

struct Extraction {
    callable: Callable,
    replacement: Stmt,
    /// Position of the returned variable among the range's declarations.
    out_ordinal: Option<usize>,
}

/// Names declared by `stmts` in pre-order.
fn declared(stmts: &[Stmt]) -> Vec<&str> {
    let mut out = Vec::new();
    each_stmt(stmts, &mut |s| match &s.kind {
        StmtKind::Let { name, .. } | StmtKind::Mutable { name, .. } => out.push(name.name.as_str()),
        StmtKind::Using { binding, .. } => out.push(binding.name.as_str()),
        StmtKind::For { var, .. } => out.push(var.name.as_str()),
        _ => {}
    });
    out
}

fn range_stmts<'a>(ctx: &'a Ctx, r: &StmtRange) -> &'a [Stmt] {
    let (block, _) = block_of(ctx.body(r.loc), &r.from).expect("checked range");
    &block.stmts[r.lo..=r.hi]
}

fn check_name_free(ctx: &Ctx, ns: usize, name: &str) -> Result<(), Diagnostic> {
    check_new_name(name)?;
    if ctx.program.namespaces[ns]
        .callables
        .iter()
        .any(|c| c.name.name == name)
    {
        return Err(Diagnostic::precondition(format!(
            "`{name}` already exists in `{}`",
            ctx.program.namespaces[ns].name.name
        )));
    }
    Ok(())
}

fn plan(
    ctx: &Ctx,
    r: &StmtRange,
    name: &str,
    renames: &[(String, String)],
    function: bool,
) -> Result<Extraction, Diagnostic> {
    let syms = &ctx.symbols;
    let stmts = range_stmts(ctx, r);
    if contains_return(stmts) {
        return Err(Diagnostic::precondition("the range contains a return"));
    }
    let (lo, hi) = extent(stmts);
    let mut outer_set = None;
    each_stmt(stmts, &mut |s| {
        if let StmtKind::Set { name, .. } = &s.kind {
            if let Some(id) = syms.symbol_at(&name.span) {
                let d = syms.symbol(id).decl;
                if d.lo < lo || d.hi > hi {
                    outer_set.get_or_insert(name.name.clone());
                }
            }
        }
    });
    if let Some(n) = outer_set {
        return Err(Diagnostic::precondition(format!(
            "the range assigns `{n}`, which is declared outside it"
        )));
    }
    let outs = live_out(syms, lo, hi);
    if outs.len() > 1 {
        let names: Vec<&str> = outs.iter().map(|&i| syms.symbol(i).name.as_str()).collect();
        return Err(Diagnostic::precondition(format!(
            "multiple live-out values: {}",
            names.join(", ")
        )));
    }
    let free = free_symbols(stmts, syms, lo, hi);
    if function {
        let mut quantum = free.iter().any(|&id| syms.symbol(id).ty.is_quantum());
        each_stmt(stmts, &mut |s| {
            quantum |= matches!(s.kind, StmtKind::Using { .. })
        });
        each_expr(stmts, &mut |e| {
            quantum |= match &e.kind {
                ExprKind::Controlled { .. } => true,
                ExprKind::Call(..) => {
                    builtin_callee(e, syms).is_some_and(|b| b.is_quantum())
                        || user_callee(e, syms).is_some_and(|l| {
                            ctx.program.callable(l).kind == CallableKind::Operation
                        })
                }
                _ => false,
            }
        });
        if quantum {
            return Err(Diagnostic::precondition(
                "the range touches qubits and cannot become a function",
            ));
        }
    }
    for (old, _) in renames {
        if !free.iter().any(|&id| &syms.symbol(id).name == old) {
            return Err(request(format!(
                "`{old}` is not a parameter of the extracted code"
            )));
        }
    }
    let new_name = |id: SymbolId| {
        let n = &syms.symbol(id).name;
        renames
            .iter()
            .find(|(o, _)| o == n)
            .map_or(n.clone(), |(_, new)| new.clone())
    };
    let params: Vec<Param> = free
        .iter()
        .map(|&id| Param {
            name: Ident::new(new_name(id)),
            ty: syms.symbol(id).ty.clone(),
        })
        .collect();
    let mut body = stmts.to_vec();
    let leading = std::mem::take(&mut body[0].comments);
    let map: HashMap<SymbolId, String> = free
        .iter()
        .map(|&id| (id, new_name(id)))
        .filter(|(id, n)| &syms.symbol(*id).name != n)
        .collect();
    rename_symbols(&mut body, syms, &map);
    let out = outs.first().map(|&id| syms.symbol(id));
    let return_type = out.map_or(Type::Unit, |s| s.ty.clone());
    if let Some(s) = out {
        body.push(Stmt::new(StmtKind::Return(Expr::name(&s.name))));
    }
    let call = Expr::call(
        name,
        free.iter()
            .map(|&id| Expr::name(&syms.symbol(id).name))
            .collect(),
    );
    let mut replacement = Stmt::new(match out {
        Some(s) if s.mutable => StmtKind::Mutable {
            name: Ident::new(&s.name),
            value: call,
        },
        Some(s) => StmtKind::Let {
            name: Ident::new(&s.name),
            value: call,
        },
        None => StmtKind::Call(call),
    });
    replacement.comments = leading;
    replacement.blank_before = stmts[0].blank_before;
    let out_ordinal = out.and_then(|s| declared(stmts).iter().position(|n| *n == s.name));
    Ok(Extraction {
        callable: Callable {
            kind: if function {
                CallableKind::Function
            } else {
                CallableKind::Operation
            },
            name: Ident::new(name),
            params,
            return_type,
            body: Block::new(body),
            comments: Vec::new(),
            span: Default::default(),
        },
        replacement,
        out_ordinal,
    })
}

fn replace_range(program: &mut Program, r: &StmtRange, with: Stmt) {
    let (block, lo) =
        block_of_mut(&mut program.callable_mut(r.loc).body, &r.from).expect("checked range");
    block.stmts.splice(lo..=r.hi, [with]);
}

fn describe(ctx: &Ctx, r: &StmtRange, name: &str) -> String {
    format!(
        "extracted {}:{}..{} into `{name}`",
        ctx.qualified(r.loc),
        r.from,
        r.to
    )
}

fn parse_renames(s: &str) -> Result<Vec<(String, String)>, Diagnostic> {
    s.split([',', ';'])
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(a, b)| (a.trim().to_owned(), b.trim().to_owned()))
                .ok_or_else(|| request(format!("expected old=new, got `{p}`")))
        })
        .collect()
}

pub(crate) fn extract(
    ctx: &Ctx,
    target: &Target,
    args: &Args,
    function: bool,
) -> Result<Outcome, Diagnostic> {
    let r = ctx.range(target)?;
    let name = req_arg(args, "name")?;
    let renames = parse_renames(arg(args, "params").unwrap_or_default())?;
    if r.from.0.len() == 1 && r.len() == ctx.body(r.loc).stmts.len() && function {
        let c = ctx.program.callable(r.loc);
        if c.kind == CallableKind::Function {
            return Err(Diagnostic::precondition(
                "the range is the whole body of a function",
            ));
        }
    }
    check_name_free(ctx, r.loc.0, name)?;
    let ex = plan(ctx, &r, name, &renames, function)?;
    let mut program = ctx.program.clone();
    replace_range(&mut program, &r, ex.replacement);
    program.namespaces[r.loc.0]
        .callables
        .insert(r.loc.1 + 1, ex.callable);
    Ok(Outcome::new(program, describe(ctx, &r, name)))
}

/// The block split shorthand indexes: the body, or the body of a lone
/// top-level `for`/`using` (repeatedly).
pub(crate) fn primary_prefix(body: &Block) -> Vec<usize> {
    let mut prefix = Vec::new();
    let mut block = body;
    while let [s] = block.stmts.as_slice() {
        match &s.kind {
            StmtKind::For { body, .. } | StmtKind::Using { body, .. } => {
                prefix.push(0);
                block = body;
            }
            _ => break,
        }
    }
    prefix
}

struct Part {
    from: Path,
    to: Path,
    name: String,
    renames: Vec<(String, String)>,
}

/// `a..b:Name[old=new,...]` entries separated by top-level commas.
fn parse_partition(spec: &str, prefix: &[usize]) -> Result<Vec<Part>, Diagnostic> {
    let mut entries = Vec::new();
    let (mut depth, mut start) = (0, 0);
    for (i, ch) in spec.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                entries.push(&spec[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    entries.push(&spec[start..]);
    entries
        .into_iter()
        .map(str::trim)
        .filter(|e| !e.is_empty())
        .map(|e| {
            let bad = || request(format!("expected a..b:Name, got `{e}`"));
            let (range, rest) = e.split_once(':').ok_or_else(bad)?;
            let (name, renames) = match rest.split_once('[') {
                Some((n, r)) => (n, parse_renames(r.trim_end_matches(']'))?),
                None => (rest, Vec::new()),
            };
            let (a, b) = range.split_once("..").unwrap_or((range, range));
            let (mut from, mut to) = (
                Path::parse(a).ok_or_else(bad)?,
                Path::parse(b).ok_or_else(bad)?,
            );
            if from.0.len() == 1 && to.0.len() == 1 {
                from = Path([prefix, &from.0].concat());
                to = Path([prefix, &to.0].concat());
            }
            Ok(Part {
                from,
                to,
                name: name.trim().to_owned(),
                renames,
            })
        })
        .collect()
}

pub(crate) fn split(ctx: &Ctx, target: &Target, args: &Args) -> Result<Outcome, Diagnostic> {
    let loc = ctx.single_callable(target)?;
    let body = ctx.body(loc);
    let parts = parse_partition(req_arg(args, "split")?, &primary_prefix(body))?;
    if parts.is_empty() {
        return Err(request("the partition is empty"));
    }
    let mut ranges = Vec::new();
    for p in &parts {
        check_name_free(ctx, loc.0, &p.name)?;
        if parts.iter().filter(|q| q.name == p.name).count() > 1 {
            return Err(Diagnostic::precondition(format!(
                "`{}` names two partition entries",
                p.name
            )));
        }
        ranges.push(ctx.range_in(loc, &p.from, &p.to)?);
    }
    for w in ranges.windows(2) {
        if !same_block(body, &w[0].from, &w[1].from) {
            return Err(Diagnostic::precondition(
                "partition ranges lie in different blocks",
            ));
        }
        if w[0].hi >= w[1].lo {
            return Err(Diagnostic::precondition(
                "partition ranges overlap or are out of order",
            ));
        }
    }
    let plans = parts
        .iter()
        .zip(&ranges)
        .map(|(p, r)| plan(ctx, r, &p.name, &p.renames, false))
        .collect::<Result<Vec<_>, _>>()?;
    let mut program = ctx.program.clone();
    let mut changes = Vec::new();
    for ((ex, r), p) in plans.into_iter().zip(&ranges).zip(&parts).rev() {
        replace_range(&mut program, r, ex.replacement);
        program.namespaces[loc.0]
            .callables
            .insert(loc.1 + 1, ex.callable);
        changes.push(describe(ctx, r, &p.name));
    }
    changes.reverse();
    Ok(Outcome { program, changes })
}

pub(crate) fn remove_duplication(
    ctx: &Ctx,
    target: &Target,
    args: &Args,
) -> Result<Outcome, Diagnostic> {
    let a = ctx.range(target)?;
    let other =
        Path::parse(req_arg(args, "other")?).ok_or_else(|| request("invalid path in `other`"))?;
    let b_to = other.with_last(other.last() + a.len() - 1);
    let b = ctx.range_in(a.loc, &other, &b_to)?;
    if b.len() != a.len() {
        return Err(Diagnostic::precondition("the occurrences differ in length"));
    }
    let overlap = a.paths().iter().any(|x| {
        b.paths()
            .iter()
            .any(|y| x.is_prefix_of(y) || y.is_prefix_of(x))
    });
    if overlap {
        return Err(Diagnostic::precondition("the occurrences overlap"));
    }
    let (first, second) = if a.from < b.from { (a, b) } else { (b, a) };
    let (sa, sb) = (range_stmts(ctx, &first), range_stmts(ctx, &second));
    if canonical(sa) != canonical(sb) {
        return Err(Diagnostic::precondition(
            "the statement sequences are not duplicates",
        ));
    }
    let name = match arg(args, "name") {
        Some(n) => n.to_owned(),
        None => fresh("Extracted", &all_names(&ctx.program)),
    };
    check_name_free(ctx, first.loc.0, &name)?;
    let pa = plan(ctx, &first, &name, &[], false)?;
    let pb = plan(ctx, &second, &name, &[], false)?;
    let sig = |e: &Extraction| -> Vec<(String, Type)> {
        e.callable
            .params
            .iter()
            .map(|p| (p.name.name.clone(), p.ty.clone()))
            .collect()
    };
    if sig(&pa) != sig(&pb) || pa.callable.return_type != pb.callable.return_type {
        return Err(Diagnostic::precondition(
            "the occurrences use different free variables",
        ));
    }
    if pa.out_ordinal != pb.out_ordinal {
        return Err(Diagnostic::precondition(
            "the occurrences return different values",
        ));
    }
    let mut program = ctx.program.clone();
    replace_range(&mut program, &second, pb.replacement);
    replace_range(&mut program, &first, pa.replacement);
    program.namespaces[first.loc.0]
        .callables
        .insert(first.loc.1 + 1, pa.callable);
    Ok(Outcome::new(
        program,
        format!(
            "extracted the duplicated statements at {} and {} into `{name}`",
            first.from, second.from
        ),
    ))
}

#[cfg(test)]
mod tests {
    use crate::diagnostic::Code;
    use crate::refactor::{apply, EditResult, Refactoring, RefactoringRequest};
    use crate::syntax::{ast_equal, parse, print, FileId};

    const BEFORE: &str = include_str!("../../tests/corpus/figure2_before.qs");
    const AFTER: &str = include_str!("../../tests/corpus/figure2_after.qs");

    fn run(src: &str, req: RefactoringRequest) -> EditResult {
        apply(&parse(src, FileId(0)).unwrap(), &req)
    }

    #[test]
    fn split_matches_the_refactored_figure() {
        let r = run(
            BEFORE,
            RefactoringRequest::new(
                Refactoring::SplitOperation,
                "MyNamespace.PerformQuantumSimulation",
            )
            .arg(
                "split",
                "0..3:PerformQuantumOperations,4..6:MeasureAndDisplayResult[i=iteration]",
            ),
        );
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        assert!(
            ast_equal(&r.program, &parse(AFTER, FileId(1)).unwrap()),
            "{}",
            print(&r.program)
        );
    }

    #[test]
    fn split_rejects_overlap_and_allows_whole_body() {
        let req = |s: &str| {
            RefactoringRequest::new(
                Refactoring::SplitOperation,
                "MyNamespace.PerformQuantumSimulation",
            )
            .arg("split", s)
        };
        let r = run(BEFORE, req("0..3:A,3..6:B"));
        assert_eq!(r.diagnostics[0].code, Code::Precondition);
        let r = run(BEFORE, req("0.0..0.6:Body"));
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        assert!(print(&r.program).contains("Body(qubits, i);"));
    }

    #[test]
    fn extract_live_out_becomes_return() {
        let src = "namespace N { operation Main() : Unit { using (q = Qubit()) { H(q); let r = M(q); Message($\"{r}\"); Reset(q); } } }";
        let r = run(
            src,
            RefactoringRequest::new(Refactoring::ExtractOperation, "N.Main:0.0..0.1")
                .arg("name", "Prepare"),
        );
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(t.contains("let r = Prepare(q);"), "{t}");
        assert!(t.contains("operation Prepare(q : Qubit) : Result {"));
        assert!(t.contains("return r;"));
    }

    #[test]
    fn extract_rejects_multiple_outputs_and_returns() {
        let src = "namespace N { operation Main() : Unit { let a = 1; let b = 2; Message($\"{a}{b}\"); } function F() : Int { return 1; } }";
        let r = run(
            src,
            RefactoringRequest::new(Refactoring::ExtractOperation, "N.Main:0..1")
                .arg("name", "Two"),
        );
        assert!(r.diagnostics[0].message.contains("multiple live-out"));
        let r = run(
            src,
            RefactoringRequest::new(Refactoring::ExtractFunction, "N.F:0").arg("name", "G"),
        );
        assert_eq!(r.diagnostics[0].code, Code::Precondition);
        let r = run(
            src,
            RefactoringRequest::new(Refactoring::ExtractOperation, "N.Main:1..0").arg("name", "E"),
        );
        assert_eq!(r.diagnostics[0].code, Code::Precondition);
    }

    #[test]
    fn function_extraction_is_classical_only() {
        let r = run(
            BEFORE,
            RefactoringRequest::new(
                Refactoring::ExtractFunction,
                "MyNamespace.PerformQuantumSimulation:0.5..0.6",
            )
            .arg("name", "Report"),
        );
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(
            t.contains("function Report(i : Int, measurements : Result[]) : Unit"),
            "{t}"
        );
        let r = run(
            BEFORE,
            RefactoringRequest::new(
                Refactoring::ExtractFunction,
                "MyNamespace.PerformQuantumSimulation:0.0",
            )
            .arg("name", "Gates"),
        );
        assert!(r.diagnostics[0].message.contains("qubits"));
    }

    #[test]
    fn duplicated_blocks_become_one_operation() {
        let src = "namespace N { operation Main() : Unit { using (q = Qubit()) { H(q); X(q); let a = M(q); H(q); X(q); let b = M(q); Message($\"{a}{b}\"); Reset(q); } } }";
        let r = run(
            src,
            RefactoringRequest::new(Refactoring::RemoveCodeDuplication, "N.Main:0.0..0.2")
                .arg("other", "0.3")
                .arg("name", "ApplyHX"),
        );
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(
            t.contains("let a = ApplyHX(q);") && t.contains("let b = ApplyHX(q);"),
            "{t}"
        );
    }
}
