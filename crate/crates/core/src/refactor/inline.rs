//! Inline a function or operation at one call site or at all of them.

use std::collections::{HashMap, HashSet};

use crate::analysis::calls::{is_recursive, user_callee};
use crate::analysis::symbols::Role;
use crate::analysis::{CallableLoc, Path, SymbolId, SymbolKind};
use crate::diagnostic::Diagnostic;
use crate::syntax::ast::*;
use crate::syntax::span::Span;
use crate::syntax::visit::{self, VisitMut};

use super::util::{
    contains_return, each_stmt, fresh, has_effects, rename_symbols, stmt_call, substitute,
};
use super::{arg, request, Args, Ctx, Outcome, Target};

pub(crate) fn inline_callable(
    ctx: &Ctx,
    target: &Target,
    args: &Args,
) -> Result<Outcome, Diagnostic> {
    match target {
        Target::Callables(v) if v.len() == 1 => {
            let callee = ctx.callable(&v[0])?;
            if let Some(c) = arg(args, "callee") {
                if ctx.callable(c)? != callee {
                    return Err(request("`callee` disagrees with the target"));
                }
            }
            inline_all(ctx, callee)
        }
        Target::Stmts { .. } => {
            let (caller, path) = ctx.stmt(target)?;
            inline_one(ctx, caller, &path, arg(args, "callee"))
        }
        _ => Err(request(format!(
            "expected a callee or a call statement, got `{target}`"
        ))),
    }
}

fn check_callee(ctx: &Ctx, loc: CallableLoc) -> Result<(), Diagnostic> {
    let c = ctx.program.callable(loc);
    if is_recursive(&ctx.program, &ctx.symbols, loc) {
        return Err(Diagnostic::precondition(format!(
            "`{}` is recursive",
            c.name.name
        )));
    }
    let stmts = &c.body.stmts;
    let (last, init) = match stmts.split_last() {
        Some((l, i)) => (Some(l), i),
        None => (None, &stmts[..]),
    };
    let nested_return = last.is_some_and(|l| {
        !matches!(l.kind, StmtKind::Return(_)) && contains_return(std::slice::from_ref(l))
    });
    if contains_return(init) || nested_return {
        return Err(Diagnostic::precondition(format!(
            "`{}` has multiple returns or an early return",
            c.name.name
        )));
    }
    Ok(())
}

/// The call to `callee` a site statement is made of.
fn site_call<'a>(ctx: &Ctx, s: &'a Stmt, callee: CallableLoc) -> Option<&'a Expr> {
    stmt_call(s).filter(|e| user_callee(e, &ctx.symbols) == Some(callee))
}

fn taken_names(ctx: &Ctx, caller: CallableLoc) -> HashSet<String> {
    let mut taken: HashSet<String> = ctx
        .symbols
        .local_names(caller)
        .into_iter()
        .map(str::to_owned)
        .collect();
    taken.extend(ctx.program.callables().map(|(_, c)| c.name.name.clone()));
    taken
}

fn check_sites(ctx: &Ctx, callee: CallableLoc, sites: &[&Stmt]) -> Result<(), Diagnostic> {
    let returns = matches!(
        ctx.program
            .callable(callee)
            .body
            .stmts
            .last()
            .map(|s| &s.kind),
        Some(StmtKind::Return(_))
    );
    if !returns && sites.iter().any(|s| !matches!(s.kind, StmtKind::Call(_))) {
        return Err(Diagnostic::precondition(format!(
            "`{}` returns no value but a call site uses one",
            ctx.program.callable(callee).name.name
        )));
    }
    Ok(())
}

fn inline_all(ctx: &Ctx, callee: CallableLoc) -> Result<Outcome, Diagnostic> {
    check_callee(ctx, callee)?;
    let id = ctx
        .symbols
        .callable_symbol(callee)
        .expect("callables are resolved");
    let name = ctx.qualified(callee);
    let calls = ctx
        .symbols
        .occurrences_of(id)
        .filter(|o| o.role == Role::Call)
        .count();
    let other_uses = ctx.symbols.occurrences_of(id).any(|o| o.role == Role::Use);
    let mut sites = Vec::new();
    for (_, c) in ctx.program.callables() {
        each_stmt(&c.body.stmts, &mut |s| {
            if site_call(ctx, s, callee).is_some() {
                sites.push(s);
            }
        });
    }
    if sites.len() != calls {
        return Err(Diagnostic::precondition(format!(
            "a call to `{name}` sits inside an expression; only call statements, initializers and returns can be inlined"
        )));
    }
    if sites.is_empty() {
        return Err(Diagnostic::precondition(format!(
            "`{name}` is never called"
        )));
    }
    check_sites(ctx, callee, &sites)?;
    let mut program = ctx.program.clone();
    for (ni, ns) in program.namespaces.iter_mut().enumerate() {
        for (ci, c) in ns.callables.iter_mut().enumerate() {
            if (ni, ci) == callee {
                continue;
            }
            let mut inl = Inliner {
                ctx,
                callee,
                only: None,
                caller_ns: ni,
                taken: taken_names(ctx, (ni, ci)),
            };
            inl.block(&mut c.body);
        }
    }
    let mut change = format!("inlined `{name}` at {calls} call site(s)");
    let is_main = ctx.program.callable(callee).name.name == "Main";
    if !other_uses && !is_main {
        program.namespaces[callee.0].callables.remove(callee.1);
        change.push_str(" and removed it");
    }
    Ok(Outcome::new(program, change))
}

fn inline_one(
    ctx: &Ctx,
    caller: CallableLoc,
    path: &Path,
    callee_arg: Option<&str>,
) -> Result<Outcome, Diagnostic> {
    let stmt = crate::analysis::index::stmt_at(ctx.body(caller), path).expect("checked path");
    let callee = stmt_call(stmt)
        .and_then(|e| user_callee(e, &ctx.symbols))
        .ok_or_else(|| {
            Diagnostic::precondition(format!("statement {path} is not a call of a user callable"))
        })?;
    if let Some(c) = callee_arg {
        if ctx.callable(c)? != callee {
            return Err(request(format!("statement {path} does not call `{c}`")));
        }
    }
    check_callee(ctx, callee)?;
    check_sites(ctx, callee, &[stmt])?;
    let mut program = ctx.program.clone();
    let mut inl = Inliner {
        ctx,
        callee,
        only: Some(stmt.span),
        caller_ns: caller.0,
        taken: taken_names(ctx, caller),
    };
    inl.block(&mut program.callable_mut(caller).body);
    Ok(Outcome::new(
        program,
        format!(
            "inlined `{}` at {}:{path}",
            ctx.qualified(callee),
            ctx.qualified(caller)
        ),
    ))
}

struct Inliner<'a> {
    ctx: &'a Ctx,
    callee: CallableLoc,
    /// Sites to expand; `None` expands every site.
    only: Option<Span>,
    caller_ns: usize,
    taken: HashSet<String>,
}

impl Inliner<'_> {
    fn block(&mut self, b: &mut Block) {
        let mut out = Vec::with_capacity(b.stmts.len());
        for mut s in std::mem::take(&mut b.stmts) {
            let hit = site_call(self.ctx, &s, self.callee).is_some()
                && self.only.is_none_or(|sp| sp == s.span);
            if hit {
                out.extend(self.expand(&s));
            } else {
                for inner in s.blocks_mut() {
                    self.block(inner);
                }
                out.push(s);
            }
        }
        b.stmts = out;
    }

    fn expand(&mut self, site: &Stmt) -> Vec<Stmt> {
        let syms = &self.ctx.symbols;
        let c = self.ctx.program.callable(self.callee);
        let call = site_call(self.ctx, site, self.callee).expect("site");
        let ExprKind::Call(_, args) = &call.kind else {
            unreachable!()
        };
        let mut out = Vec::new();

        let mut body = c.body.stmts.clone();
        let locals: HashMap<SymbolId, String> = syms
            .locals_of(self.callee)
            .filter(|s| s.kind != SymbolKind::Parameter)
            .map(|s| {
                let n = fresh(&s.name, &self.taken);
                self.taken.insert(n.clone());
                (s.id, n)
            })
            .collect();
        rename_symbols(&mut body, syms, &locals);

        let mut params = HashMap::new();
        for (p, a) in c.params.iter().zip(args) {
            let id = syms
                .symbol_at(&p.name.span)
                .expect("parameters are resolved");
            let simple = a.is_literal() || a.as_name().is_some() || p.ty.is_quantum();
            let once = syms.use_count(id) <= 1 && !has_effects(a, syms);
            if simple || once {
                params.insert(id, a.clone());
            } else {
                let n = fresh(&p.name.name, &self.taken);
                self.taken.insert(n.clone());
                out.push(Stmt::new(StmtKind::Let {
                    name: Ident::new(&n),
                    value: a.clone(),
                }));
                params.insert(id, Expr::name(n));
            }
        }
        substitute(&mut body, syms, &params);
        if self.callee.0 != self.caller_ns {
            qualify_callables(&mut body, self.ctx);
        }

        let ret = match body.last().map(|s| &s.kind) {
            Some(StmtKind::Return(_)) => match body.pop().map(|s| s.kind) {
                Some(StmtKind::Return(e)) => Some(e),
                _ => unreachable!(),
            },
            _ => None,
        };
        out.extend(body);
        let tail = match (&site.kind, ret) {
            (StmtKind::Call(_), Some(e)) if has_effects(&e, syms) => Some(StmtKind::Call(e)),
            (StmtKind::Call(_), _) => None,
            (StmtKind::Let { name, .. }, Some(e)) => Some(StmtKind::Let {
                name: name.clone(),
                value: e,
            }),
            (StmtKind::Mutable { name, .. }, Some(e)) => Some(StmtKind::Mutable {
                name: name.clone(),
                value: e,
            }),
            (StmtKind::Set { name, .. }, Some(e)) => Some(StmtKind::Set {
                name: name.clone(),
                value: e,
            }),
            (StmtKind::Return(_), Some(e)) => Some(StmtKind::Return(e)),
            _ => unreachable!("checked before expansion"),
        };
        out.extend(tail.map(Stmt::new));
        if let Some(first) = out.first_mut() {
            first.comments = site.comments.clone();
        }
        out
    }
}

/// Rewrites unqualified callable references to `Ns.Name`.
fn qualify_callables(body: &mut Vec<Stmt>, ctx: &Ctx) {
    struct Q<'a>(&'a Ctx);
    impl VisitMut for Q<'_> {
        fn visit_expr(&mut self, e: &mut Expr) {
            if let ExprKind::Name(n) = &mut e.kind {
                if let Some(id) = self.0.symbols.symbol_at(&e.span) {
                    let s = self.0.symbols.symbol(id);
                    if s.kind == SymbolKind::Callable && !n.contains('.') {
                        *n = s.qualified.clone();
                    }
                }
            }
            visit::walk_expr_mut(self, e);
        }
    }
    for s in body {
        Q(ctx).visit_stmt(s);
    }
}

#[cfg(test)]
mod tests {
    use crate::diagnostic::Code;
    use crate::refactor::{apply, EditResult, Refactoring, RefactoringRequest};
    use crate::syntax::{parse, print, FileId};

    const FIG1: &str = include_str!("../../tests/corpus/figure1.qs");

    fn run(src: &str, target: &str) -> EditResult {
        apply(
            &parse(src, FileId(0)).unwrap(),
            &RefactoringRequest::new(Refactoring::InlineCallable, target),
        )
    }

    #[test]
    fn multiply_by_two_is_inlined_and_removed() {
        let r = run(FIG1, "MyNamespace.MultiplyByTwo");
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(
            t.contains("let multipliedResult = 2 * ResultArrayAsInt([result]);"),
            "{t}"
        );
        assert!(!t.contains("function MultiplyByTwo"));
    }

    #[test]
    fn empty_body_deletes_the_call() {
        let src = "namespace N { operation Nop() : Unit { } operation Main() : Unit { Nop(); Message(\"x\"); } }";
        let r = run(src, "N.Main:0");
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(!t.contains("Nop();"), "{t}");
        assert!(
            t.contains("operation Nop()"),
            "single-site inlining keeps the callee"
        );
    }

    #[test]
    fn recursion_and_early_returns_are_rejected() {
        let src = "namespace N { operation R(n : Int) : Unit { if (n > 0) { R(n - 1); } } operation Main() : Unit { R(2); } }";
        assert_eq!(run(src, "N.R").diagnostics[0].code, Code::Precondition);
        let src = "namespace N { function F(n : Int) : Int { if (n > 0) { return 1; } return 2; } operation Main() : Unit { let x = F(1); Message($\"{x}\"); } }";
        assert!(run(src, "N.F").diagnostics[0]
            .message
            .contains("early return"));
    }

    #[test]
    fn locals_are_freshened_and_effectful_args_bound_once() {
        let src = "namespace N { operation G(r : Result) : Unit { let x = r; Message($\"{x}{r}\"); } operation Main() : Unit { using (q = Qubit()) { let x = 1; G(M(q)); Message($\"{x}\"); Reset(q); } } }";
        let r = run(src, "N.G");
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(t.contains("let r = M(q);"), "{t}");
        assert!(t.contains("let x_1 = r;"), "{t}");
        assert!(t.contains("Message($\"{x_1}{r}\");"), "{t}");
    }
}
