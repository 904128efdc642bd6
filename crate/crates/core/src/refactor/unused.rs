//! Remove unused variables, parameters and callables.

use crate::analysis::index::{all_paths, block_of_mut};
use crate::analysis::{find_unused, SymbolKind};
use crate::diagnostic::Diagnostic;
use crate::syntax::ast::*;
use crate::syntax::printer;

use super::util::has_effects;
use super::{signature, Args, Ctx, Outcome, Target};

pub(crate) fn remove_unused(
    ctx: &Ctx,
    target: &Target,
    _args: &Args,
) -> Result<Outcome, Diagnostic> {
    let id = ctx.symbol(target)?;
    let sym = ctx.symbols.symbol(id);
    if sym.kind == SymbolKind::Callable && sym.name == "Main" {
        return Err(Diagnostic::precondition("`Main` is the entry point"));
    }
    if !find_unused(&ctx.program, &ctx.symbols).contains(&id) {
        return Err(Diagnostic::precondition(format!(
            "`{}` is used or cannot be removed",
            sym.name
        )));
    }
    let mut program = ctx.program.clone();
    match sym.kind {
        SymbolKind::Callable => {
            let (ni, ci) = sym.owner;
            program.namespaces[ni].callables.remove(ci);
        }
        SymbolKind::Parameter => {
            return signature::remove(ctx, sym.owner, &sym.name.clone());
        }
        _ => {
            let body = ctx.body(sym.owner);
            let (path, stmt) = all_paths(body)
                .into_iter()
                .find(|(_, s)| match &s.kind {
                    StmtKind::Let { name, .. } | StmtKind::Mutable { name, .. } => {
                        name.span == sym.decl
                    }
                    _ => false,
                })
                .expect("variables are declared by let or mutable");
            let (StmtKind::Let { value, .. } | StmtKind::Mutable { value, .. }) = &stmt.kind else {
                unreachable!()
            };
            let (block, i) =
                block_of_mut(&mut program.callable_mut(sym.owner).body, &path).expect("found path");
            if has_effects(value, &ctx.symbols) {
                if !matches!(value.kind, ExprKind::Call(..) | ExprKind::Controlled { .. }) {
                    return Err(Diagnostic::precondition(format!(
                        "the initializer `{}` has effects and is not a call",
                        printer::expr(value)
                    )));
                }
                block.stmts[i].kind = StmtKind::Call(value.clone());
            } else {
                let removed = block.stmts.remove(i);
                match block.stmts.get_mut(i) {
                    Some(next) => next.comments.splice(0..0, removed.comments),
                    None => block.trailing_comments.splice(0..0, removed.comments),
                };
            }
        }
    }
    Ok(Outcome::new(
        program,
        format!(
            "removed unused `{}` from {}",
            sym.name,
            ctx.qualified(sym.owner)
        ),
    ))
}
