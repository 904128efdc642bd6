//! Merge, parameterize and specialize callables that differ in literals.

use std::collections::{HashMap, HashSet};

use crate::analysis::calls::user_callee;
use crate::analysis::dups::canonical;
use crate::analysis::index::{block_of_mut, stmt_at};
use crate::analysis::symbols::Role;
use crate::analysis::{entry_points, CallableLoc, SymbolId, SymbolKind};
use crate::diagnostic::Diagnostic;
use crate::syntax::ast::*;
use crate::syntax::printer;

use super::util::{
    check_new_name, fold, literal_tag, literal_type, literals_mut, normalized, rename_symbols,
    rewrite_calls, set_last_segment, stmt_call, stmt_call_mut, substitute,
};
use super::{arg, request, Args, Ctx, Outcome, Target};

/// Body with parameters renamed positionally, as canonical text.
fn body_text(ctx: &Ctx, loc: CallableLoc, blank_literals: bool) -> String {
    let c = ctx.program.callable(loc);
    let mut stmts = c.body.stmts.clone();
    let map: HashMap<SymbolId, String> = c
        .params
        .iter()
        .enumerate()
        .filter_map(|(i, p)| Some((ctx.symbols.symbol_at(&p.name.span)?, format!("%p{i}"))))
        .collect();
    rename_symbols(&mut stmts, &ctx.symbols, &map);
    if blank_literals {
        for l in literals_mut(&mut stmts) {
            *l = Expr::name("%lit");
        }
    }
    canonical(&stmts)
}

fn literals(c: &Callable) -> Vec<Expr> {
    let mut stmts = c.body.stmts.clone();
    literals_mut(&mut stmts)
        .into_iter()
        .map(|e| normalized(e))
        .collect()
}

fn signature(c: &Callable) -> (CallableKind, Vec<Type>, Type) {
    (
        c.kind,
        c.params.iter().map(|p| p.ty.clone()).collect(),
        c.return_type.clone(),
    )
}

fn callable_id(ctx: &Ctx, loc: CallableLoc) -> SymbolId {
    ctx.symbols
        .callable_symbol(loc)
        .expect("callables are resolved")
}

fn check_replaceable(ctx: &Ctx, locs: &[CallableLoc], what: &str) -> Result<(), Diagnostic> {
    let entries = entry_points(&ctx.program, &ctx.symbols);
    for &l in locs {
        let name = &ctx.program.callable(l).name.name;
        if name == "Main" || entries.contains(&l) {
            return Err(Diagnostic::precondition(format!(
                "`{name}` is an entry point and cannot be {what}"
            )));
        }
        let id = callable_id(ctx, l);
        if ctx.symbols.occurrences_of(id).any(|o| o.role == Role::Use) {
            return Err(Diagnostic::precondition(format!(
                "`{name}` is used as a value"
            )));
        }
    }
    if locs.iter().any(|l| l.0 != locs[0].0) {
        return Err(Diagnostic::precondition(format!(
            "callables to be {what} must share a namespace"
        )));
    }
    Ok(())
}

/// Longest common prefix of the names without trailing digits and `_`.
fn common_name(names: &[&str]) -> String {
    let first = names[0];
    let mut n = first.len();
    for other in &names[1..] {
        n = n.min(
            first
                .bytes()
                .zip(other.bytes())
                .take_while(|(a, b)| a == b)
                .count(),
        );
    }
    first[..n]
        .trim_end_matches(|c: char| c.is_ascii_digit() || c == '_')
        .to_owned()
}

/// Replaces `locs` by `merged`, placed at the first target, and rewrites
/// every call through `retarget`.
fn replace_callables(
    ctx: &Ctx,
    locs: &[CallableLoc],
    merged: Callable,
    retarget: &mut impl FnMut(usize, &mut Vec<Expr>),
) -> Program {
    let ids: Vec<SymbolId> = locs.iter().map(|&l| callable_id(ctx, l)).collect();
    let new_name = merged.name.name.clone();
    let mut program = ctx.program.clone();
    rewrite_calls(&mut program, &ctx.symbols, &ids, &mut |id, name, args| {
        let k = ids.iter().position(|&i| i == id).expect("target");
        set_last_segment(name, &new_name);
        retarget(k, args);
    });
    let ns = &mut program.namespaces[locs[0].0];
    let mut first = usize::MAX;
    let mut kept = Vec::new();
    for (ci, c) in std::mem::take(&mut ns.callables).into_iter().enumerate() {
        if locs.iter().any(|l| l.1 == ci) {
            first = first.min(kept.len());
        } else {
            kept.push(c);
        }
    }
    kept.insert(first, merged);
    ns.callables = kept;
    program
}

fn check_merged_name(ctx: &Ctx, locs: &[CallableLoc], name: &str) -> Result<(), Diagnostic> {
    check_new_name(name)?;
    let ns = &ctx.program.namespaces[locs[0].0];
    let clash = ns
        .callables
        .iter()
        .enumerate()
        .any(|(ci, c)| c.name.name == name && !locs.iter().any(|l| l.1 == ci));
    if clash {
        return Err(Diagnostic::precondition(format!(
            "`{name}` already exists in `{}`",
            ns.name.name
        )));
    }
    Ok(())
}

pub(crate) fn merge_operations(
    ctx: &Ctx,
    target: &Target,
    args: &Args,
) -> Result<Outcome, Diagnostic> {
    let locs = ctx.callables(target)?;
    let [a, b] = locs[..] else {
        return Err(request("merge-operations takes exactly two callables"));
    };
    if a == b {
        return Err(request("the two callables are the same"));
    }
    let (ca, cb) = (ctx.program.callable(a), ctx.program.callable(b));
    if signature(ca) != signature(cb) {
        return Err(Diagnostic::precondition(format!(
            "the signatures of `{}` and `{}` differ",
            ca.name.name, cb.name.name
        )));
    }
    check_replaceable(ctx, &locs, "merged")?;
    if body_text(ctx, a, false) != body_text(ctx, b, false) {
        if body_text(ctx, a, true) == body_text(ctx, b, true) {
            return parameterize(ctx, target, args);
        }
        return Err(Diagnostic::precondition(format!(
            "the bodies of `{}` and `{}` cannot be unified",
            ca.name.name, cb.name.name
        )));
    }
    let name = arg(args, "name").unwrap_or(&ca.name.name).to_owned();
    check_merged_name(ctx, &locs, &name)?;
    let mut merged = ca.clone();
    merged.name = Ident::new(&name);
    let program = replace_callables(ctx, &locs, merged, &mut |_, _| {});
    Ok(Outcome::new(
        program,
        format!(
            "merged `{}` and `{}` into `{name}`",
            ca.name.name, cb.name.name
        ),
    ))
}

pub(crate) fn parameterize(ctx: &Ctx, target: &Target, args: &Args) -> Result<Outcome, Diagnostic> {
    let locs = ctx.callables(target)?;
    if locs.is_empty() {
        return Err(request("no callables given"));
    }
    if locs.iter().collect::<HashSet<_>>().len() != locs.len() {
        return Err(request("a callable is listed twice"));
    }
    let cs: Vec<&Callable> = locs.iter().map(|&l| ctx.program.callable(l)).collect();
    if cs.iter().any(|c| signature(c) != signature(cs[0])) {
        return Err(Diagnostic::precondition("the signatures differ"));
    }
    check_replaceable(ctx, &locs, "parameterized")?;
    let skeleton = body_text(ctx, locs[0], true);
    if locs[1..]
        .iter()
        .any(|&l| body_text(ctx, l, true) != skeleton)
    {
        return Err(Diagnostic::precondition(
            "the bodies differ in more than classical literals",
        ));
    }
    let lits: Vec<Vec<Expr>> = cs.iter().map(|c| literals(c)).collect();
    let positions: Vec<usize> = if locs.len() == 1 {
        let k = match arg(args, "literal") {
            Some(s) => s
                .parse::<usize>()
                .map_err(|_| request(format!("`literal` must be an index, got `{s}`")))?,
            None => lits[0]
                .iter()
                .position(|e| matches!(e.kind, ExprKind::Int(_)))
                .ok_or_else(|| Diagnostic::precondition("the body has no Int literal"))?,
        };
        if k >= lits[0].len() {
            return Err(Diagnostic::precondition(format!(
                "the body has {} literals; {k} is out of range",
                lits[0].len()
            )));
        }
        vec![k]
    } else {
        (0..lits[0].len())
            .filter(|&i| lits.iter().any(|l| l[i] != lits[0][i]))
            .collect()
    };
    if positions.is_empty() {
        return Err(Diagnostic::precondition(
            "the bodies are identical; merge them instead",
        ));
    }
    let ty = literal_type(&lits[0][positions[0]]).expect("literal");
    let mut values = Vec::new();
    for l in &lits {
        if positions
            .iter()
            .any(|&p| literal_type(&l[p]).as_ref() != Some(&ty))
        {
            return Err(Diagnostic::precondition(
                "the differing literals have mixed types",
            ));
        }
        if positions.iter().any(|&p| l[p] != l[positions[0]]) {
            return Err(Diagnostic::precondition(
                "a callable differs in more than one value",
            ));
        }
        values.push(l[positions[0]].clone());
    }
    let names: Vec<&str> = cs.iter().map(|c| c.name.name.as_str()).collect();
    let name = match arg(args, "name") {
        Some(n) => n.to_owned(),
        None => {
            let n = common_name(&names);
            if n.is_empty() {
                return Err(request("the callables share no name prefix; pass `name`"));
            }
            n
        }
    };
    check_merged_name(ctx, &locs, &name)?;
    let param = arg(args, "param").unwrap_or("value");
    check_new_name(param)?;
    if ctx.symbols.local_names(locs[0]).contains(&param) {
        return Err(Diagnostic::precondition(format!(
            "`{param}` is already declared in `{}`",
            names[0]
        )));
    }
    let mut merged = cs[0].clone();
    merged.name = Ident::new(&name);
    for (i, l) in literals_mut(&mut merged.body.stmts).into_iter().enumerate() {
        if positions.contains(&i) {
            *l = Expr::name(param);
        }
    }
    merged.params.push(Param {
        name: Ident::new(param),
        ty: ty.clone(),
    });
    let program = replace_callables(ctx, &locs, merged, &mut |k, args| {
        args.push(values[k].clone())
    });
    Ok(Outcome::new(
        program,
        format!(
            "parameterized {} as `{name}` with `{param} : {ty}`",
            names.join(", ")
        ),
    ))
}

/// `if` chains with constant conditions reduced to the taken branch.
fn fold_ifs(stmts: Vec<Stmt>, splice_ok: &impl Fn(&Block) -> bool) -> Vec<Stmt> {
    let mut out = Vec::new();
    for mut s in stmts {
        for b in s.blocks_mut() {
            b.stmts = fold_ifs(std::mem::take(&mut b.stmts), splice_ok);
        }
        if let StmtKind::If {
            cond,
            then_block,
            elifs,
            else_block,
        } = &s.kind
        {
            let mut arms: Vec<(&Expr, &Block)> = vec![(cond, then_block)];
            arms.extend(elifs.iter().map(|(c, b)| (c, b)));
            arms.retain(|(c, _)| c.kind != ExprKind::Bool(false));
            let taken = match arms.first() {
                Some((c, b)) if c.kind == ExprKind::Bool(true) => Some(Some(*b)),
                None => Some(else_block.as_ref()),
                _ => None,
            };
            match taken {
                Some(Some(b)) if splice_ok(b) => {
                    out.extend(b.stmts.iter().cloned());
                    continue;
                }
                Some(None) => continue,
                _ => {}
            }
        }
        out.push(s);
    }
    out
}

pub(crate) fn specialize(ctx: &Ctx, target: &Target, args: &Args) -> Result<Outcome, Diagnostic> {
    let (caller, path) = ctx.stmt(target)?;
    let site = stmt_at(ctx.body(caller), &path).expect("checked path");
    let call = stmt_call(site)
        .ok_or_else(|| Diagnostic::precondition(format!("statement {path} is not a call")))?;
    let callee = user_callee(call, &ctx.symbols).ok_or_else(|| {
        Diagnostic::precondition(format!("statement {path} does not call a user callable"))
    })?;
    if let Some(c) = arg(args, "callee") {
        if ctx.callable(c)? != callee {
            return Err(request(format!("statement {path} does not call `{c}`")));
        }
    }
    let ExprKind::Call(_, call_args) = &call.kind else {
        unreachable!()
    };
    let c = ctx.program.callable(callee);
    let fixed: Vec<usize> = call_args
        .iter()
        .enumerate()
        .filter(|(_, a)| a.is_literal())
        .map(|(i, _)| i)
        .collect();
    if fixed.is_empty() {
        return Err(Diagnostic::precondition(format!(
            "the call of `{}` passes no literal arguments",
            c.name.name
        )));
    }
    let tags: Vec<String> = fixed
        .iter()
        .filter_map(|&i| literal_tag(&call_args[i]))
        .collect();
    let name = match arg(args, "name") {
        Some(n) => n.to_owned(),
        None => format!("{}_{}", c.name.name, tags.join("_")),
    };
    check_new_name(&name)?;
    if ctx.program.namespaces[callee.0]
        .callables
        .iter()
        .any(|x| x.name.name == name)
    {
        return Err(Diagnostic::precondition(format!("`{name}` already exists")));
    }

    let mut copy = c.clone();
    let subst: HashMap<SymbolId, Expr> = fixed
        .iter()
        .map(|&i| {
            let id = ctx
                .symbols
                .symbol_at(&c.params[i].name.span)
                .expect("parameters are resolved");
            (id, call_args[i].clone())
        })
        .collect();
    substitute(&mut copy.body, &ctx.symbols, &subst);
    copy.params = c
        .params
        .iter()
        .enumerate()
        .filter(|(i, _)| !fixed.contains(i))
        .map(|(_, p)| p.clone())
        .collect();
    copy.name = Ident::new(&name);
    copy.comments.clear();
    crate::syntax::visit::map_exprs_in_block(&mut copy.body, &mut fold);
    let counts: HashMap<&str, usize> =
        ctx.symbols
            .locals_of(callee)
            .fold(HashMap::new(), |mut m, s| {
                if s.kind != SymbolKind::Parameter {
                    *m.entry(s.name.as_str()).or_default() += 1;
                }
                m
            });
    let splice_ok = |b: &Block| {
        b.stmts.iter().all(|s| match &s.kind {
            StmtKind::Let { name, .. } | StmtKind::Mutable { name, .. } => {
                counts.get(name.name.as_str()) == Some(&1)
            }
            _ => true,
        })
    };
    copy.body.stmts = fold_ifs(std::mem::take(&mut copy.body.stmts), &splice_ok);

    let mut program = ctx.program.clone();
    let (block, i) =
        block_of_mut(&mut program.callable_mut(caller).body, &path).expect("checked path");
    let e = stmt_call_mut(&mut block.stmts[i]).expect("call");
    if let ExprKind::Call(callee_e, a) = &mut e.kind {
        if let ExprKind::Name(n) = &mut callee_e.kind {
            if caller.0 == callee.0 {
                *n = name.clone();
            } else {
                *n = format!("{}.{name}", ctx.program.namespaces[callee.0].name.name);
            }
        }
        *a = a
            .iter()
            .enumerate()
            .filter(|(i, _)| !fixed.contains(i))
            .map(|(_, x)| x.clone())
            .collect();
    }
    program.namespaces[callee.0]
        .callables
        .insert(callee.1 + 1, copy);
    let lits: Vec<String> = fixed
        .iter()
        .map(|&i| printer::expr(&call_args[i]))
        .collect();
    Ok(Outcome::new(
        program,
        format!(
            "specialized `{}` for {} as `{name}`",
            c.name.name,
            lits.join(", ")
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::common_name;
    use crate::diagnostic::Code;
    use crate::refactor::{apply, EditResult, Refactoring, RefactoringRequest};
    use crate::syntax::{parse, print, FileId};

    const FIG2: &str = include_str!("../../tests/corpus/figure2_before.qs");

    fn run(src: &str, r: RefactoringRequest) -> EditResult {
        apply(&parse(src, FileId(0)).unwrap(), &r)
    }

    const BELLS: &str = "namespace N {
        operation ApplyBell1(a : Qubit, b : Qubit) : Unit { H(a); CNOT(a, b); }
        operation ApplyBell2(x : Qubit, y : Qubit) : Unit { H(x); CNOT(x, y); }
        operation Main() : Unit { using (qs = Qubit[2]) { ApplyBell1(qs[0], qs[1]); ApplyBell2(qs[1], qs[0]); Reset(qs[0]); Reset(qs[1]); } }
    }";

    const REPEATS: &str = "namespace N {
        operation RepeatX3(q : Qubit) : Unit { for (i in 1..3) { X(q); } }
        operation RepeatX5(q : Qubit) : Unit { for (i in 1..5) { X(q); } }
        operation Main() : Unit { using (q = Qubit()) { RepeatX3(q); RepeatX5(q); Reset(q); } }
    }";

    #[test]
    fn names() {
        assert_eq!(common_name(&["RepeatX3", "RepeatX5"]), "RepeatX");
        assert_eq!(common_name(&["Apply_1", "Apply_2"]), "Apply");
        assert_eq!(common_name(&["Foo"]), "Foo");
    }

    #[test]
    fn identical_bodies_merge() {
        let r = run(
            BELLS,
            RefactoringRequest::new(Refactoring::MergeOperations, "N.ApplyBell1,N.ApplyBell2")
                .arg("name", "ApplyBell"),
        );
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(
            t.contains("ApplyBell(qs[0], qs[1]);") && t.contains("ApplyBell(qs[1], qs[0]);"),
            "{t}"
        );
        assert_eq!(t.matches("operation ApplyBell").count(), 1);
    }

    #[test]
    fn literal_difference_merges_with_a_parameter() {
        let r = run(
            REPEATS,
            RefactoringRequest::new(Refactoring::MergeOperations, "N.RepeatX3,N.RepeatX5"),
        );
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(
            t.contains("operation RepeatX(q : Qubit, value : Int) : Unit"),
            "{t}"
        );
        assert!(t.contains("for (i in 1..value)"));
        assert!(t.contains("RepeatX(q, 3);") && t.contains("RepeatX(q, 5);"));
    }

    #[test]
    fn arity_mismatch_and_gate_mismatch() {
        let src = "namespace N { operation A(q : Qubit) : Unit { H(q); } operation B(q : Qubit, r : Qubit) : Unit { H(q); } operation C(q : Qubit) : Unit { X(q); } operation Main() : Unit { using (qs = Qubit[2]) { A(qs[0]); B(qs[0], qs[1]); C(qs[0]); Reset(qs[0]); Reset(qs[1]); } } }";
        let r = run(
            src,
            RefactoringRequest::new(Refactoring::MergeOperations, "N.A,N.B"),
        );
        assert_eq!(r.diagnostics[0].code, Code::Precondition);
        let r = run(
            src,
            RefactoringRequest::new(Refactoring::ParameterizeOperation, "N.A,N.C")
                .arg("name", "AC"),
        );
        assert!(r.diagnostics[0].message.contains("classical literals"));
    }

    #[test]
    fn parameterize_by_name_and_single_target() {
        let r = run(
            REPEATS,
            RefactoringRequest::new(Refactoring::ParameterizeOperation, "N.RepeatX3,N.RepeatX5")
                .arg("param", "n"),
        );
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        assert!(print(&r.program).contains("operation RepeatX(q : Qubit, n : Int)"));
        let r = run(
            REPEATS,
            RefactoringRequest::new(Refactoring::ParameterizeOperation, "N.RepeatX3")
                .arg("literal", "1")
                .arg("name", "RepeatXN"),
        );
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(
            t.contains("for (i in 1..value)") && t.contains("RepeatXN(q, 3);"),
            "{t}"
        );
    }

    #[test]
    fn specialize_the_simulation_call() {
        let r = run(
            FIG2,
            RefactoringRequest::new(Refactoring::SpecializeOperation, "MyNamespace.Main:0.0"),
        );
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(
            t.contains("operation PerformQuantumSimulation_5(qubits : Qubit[]) : Unit"),
            "{t}"
        );
        assert!(t.contains("for (i in 1..5)"));
        assert!(t.contains("PerformQuantumSimulation_5(qubits);"));
    }

    #[test]
    fn specialize_needs_literals_and_folds_branches() {
        let src = "namespace N { operation F(q : Qubit, b : Bool) : Unit { if (b) { X(q); } else { H(q); } } operation Main() : Unit { using (q = Qubit()) { let t = true; F(q, t); F(q, true); Reset(q); } } }";
        let r = run(
            src,
            RefactoringRequest::new(Refactoring::SpecializeOperation, "N.Main:0.1"),
        );
        assert_eq!(r.diagnostics[0].code, Code::Precondition);
        let r = run(
            src,
            RefactoringRequest::new(Refactoring::SpecializeOperation, "N.Main:0.2"),
        );
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(
            t.contains("operation F_true(q : Qubit) : Unit {\n        X(q);\n    }"),
            "{t}"
        );
    }
}
