//! Add, remove or reorder callable parameters.

use crate::analysis::{entry_points, SymbolId};
use crate::diagnostic::Diagnostic;
use crate::syntax::ast::{Expr, ExprKind, Ident, Param};
use crate::syntax::{parse_expr, parse_type};

use super::util::{check_new_name, has_effects, rewrite_calls};
use super::{arg, request, Args, Ctx, Outcome, Target};

pub(crate) fn change_signature(
    ctx: &Ctx,
    target: &Target,
    args: &Args,
) -> Result<Outcome, Diagnostic> {
    let loc = ctx.single_callable(target)?;
    let given: Vec<&str> = ["add", "remove", "reorder"]
        .into_iter()
        .filter(|k| args.contains_key(*k))
        .collect();
    match given.as_slice() {
        ["add"] => add(ctx, loc, arg(args, "add").unwrap_or_default()),
        ["remove"] => remove(ctx, loc, arg(args, "remove").unwrap_or_default()),
        ["reorder"] => reorder(ctx, loc, arg(args, "reorder").unwrap_or_default()),
        _ => Err(request(
            "change-signature takes exactly one of add, remove, reorder",
        )),
    }
}

fn callable_id(ctx: &Ctx, loc: (usize, usize)) -> SymbolId {
    ctx.symbols
        .callable_symbol(loc)
        .expect("callables are resolved")
}

/// Every argument list passed to the callable is free of effects.
fn check_pure_args(ctx: &Ctx, id: SymbolId, what: &str) -> Result<(), Diagnostic> {
    let mut program = ctx.program.clone();
    let mut bad = false;
    rewrite_calls(&mut program, &ctx.symbols, &[id], &mut |_, _, a| {
        bad |= a.iter().any(|e| has_effects(e, &ctx.symbols));
    });
    if bad {
        return Err(Diagnostic::precondition(format!(
            "a call site passes an argument with effects; {what} would change evaluation"
        )));
    }
    Ok(())
}

fn add(ctx: &Ctx, loc: (usize, usize), spec: &str) -> Result<Outcome, Diagnostic> {
    let bad = || request(format!("expected add=name:Type=default, got `{spec}`"));
    let (decl, default) = spec.split_once('=').ok_or_else(bad)?;
    let (name, ty) = decl.split_once(':').ok_or_else(bad)?;
    let (name, ty) = (name.trim(), parse_type(ty.trim()).map_err(|_| bad())?);
    let default = parse_expr(default.trim()).map_err(|_| bad())?;
    check_new_name(name)?;
    let c = ctx.program.callable(loc);
    if c.params.iter().any(|p| p.name.name == name) {
        return Err(Diagnostic::precondition(format!(
            "`{}` already has a parameter `{name}`",
            c.name.name
        )));
    }
    if ty.is_quantum() {
        return Err(Diagnostic::precondition(
            "added parameters must be classical",
        ));
    }
    let mut closed = true;
    default.walk(&mut |e| {
        closed &= !matches!(
            e.kind,
            ExprKind::Name(_) | ExprKind::Call(..) | ExprKind::Controlled { .. }
        )
    });
    if !closed {
        return Err(Diagnostic::precondition(
            "the default argument must be a closed classical expression",
        ));
    }
    if entry_points(&ctx.program, &ctx.symbols).contains(&loc) {
        return Err(Diagnostic::precondition(format!(
            "`{}` is an entry point and cannot gain a parameter",
            c.name.name
        )));
    }
    let id = callable_id(ctx, loc);
    let mut program = ctx.program.clone();
    program.callable_mut(loc).params.push(Param {
        name: Ident::new(name),
        ty: ty.clone(),
    });
    rewrite_calls(&mut program, &ctx.symbols, &[id], &mut |_, _, a| {
        a.push(default.clone())
    });
    Ok(Outcome::new(
        program,
        format!("added parameter `{name} : {ty}` to `{}`", c.name.name),
    ))
}

pub(crate) fn remove(ctx: &Ctx, loc: (usize, usize), name: &str) -> Result<Outcome, Diagnostic> {
    let c = ctx.program.callable(loc);
    let idx = c
        .params
        .iter()
        .position(|p| p.name.name == name)
        .ok_or_else(|| request(format!("`{}` has no parameter `{name}`", c.name.name)))?;
    let psym = ctx
        .symbols
        .symbol_at(&c.params[idx].name.span)
        .expect("parameters are resolved");
    if ctx.symbols.use_count(psym) > 0 {
        return Err(Diagnostic::precondition(format!(
            "parameter `{name}` is used in `{}`",
            c.name.name
        )));
    }
    let id = callable_id(ctx, loc);
    let mut dropped_effect = false;
    let mut program = ctx.program.clone();
    rewrite_calls(&mut program, &ctx.symbols, &[id], &mut |_, _, a| {
        let e: Expr = a.remove(idx);
        dropped_effect |= has_effects(&e, &ctx.symbols);
    });
    if dropped_effect {
        return Err(Diagnostic::precondition(format!(
            "a call site passes an argument with effects for `{name}`"
        )));
    }
    program.callable_mut(loc).params.remove(idx);
    Ok(Outcome::new(
        program,
        format!("removed parameter `{name}` from `{}`", c.name.name),
    ))
}

fn reorder(ctx: &Ctx, loc: (usize, usize), spec: &str) -> Result<Outcome, Diagnostic> {
    let c = ctx.program.callable(loc);
    let perm: Vec<usize> = spec
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| request(format!("expected reorder=i,j,..., got `{spec}`")))?;
    let n = c.params.len();
    let mut seen = vec![false; n];
    if perm.len() != n
        || perm
            .iter()
            .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
    {
        return Err(Diagnostic::precondition(format!(
            "`{spec}` is not a permutation of {n} parameters"
        )));
    }
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        return Ok(Outcome {
            program: ctx.program.clone(),
            changes: Vec::new(),
        });
    }
    let id = callable_id(ctx, loc);
    check_pure_args(ctx, id, "reordering")?;
    let mut program = ctx.program.clone();
    rewrite_calls(&mut program, &ctx.symbols, &[id], &mut |_, _, a| {
        *a = perm.iter().map(|&i| a[i].clone()).collect();
    });
    let params = &mut program.callable_mut(loc).params;
    *params = perm.iter().map(|&i| params[i].clone()).collect();
    Ok(Outcome::new(
        program,
        format!("reordered the parameters of `{}` as {spec}", c.name.name),
    ))
}
