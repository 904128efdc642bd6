//! Consolidate single-qubit measurements into one `MultiM`.

use crate::analysis::calls::builtin_callee;
use crate::analysis::index::{block_of, block_of_mut};
use crate::analysis::qubits::{may_conflict, qubit_ref};
use crate::builtins::Builtin;
use crate::diagnostic::Diagnostic;
use crate::syntax::ast::*;
use crate::syntax::printer;

use super::util::{check_new_name, fresh};
use super::{arg, Args, Ctx, Outcome, Target};

pub(crate) fn consolidate(ctx: &Ctx, target: &Target, args: &Args) -> Result<Outcome, Diagnostic> {
    let r = ctx.range(target)?;
    if r.len() < 2 {
        return Err(Diagnostic::precondition(
            "consolidation needs at least two measurements",
        ));
    }
    let syms = &ctx.symbols;
    let (block, _) = block_of(ctx.body(r.loc), &r.from).expect("checked range");
    let mut binds = Vec::new();
    for s in &block.stmts[r.lo..=r.hi] {
        let found = match &s.kind {
            StmtKind::Let { name, value } if builtin_callee(value, syms) == Some(Builtin::M) => {
                match &value.kind {
                    ExprKind::Call(_, a) => Some((name.name.clone(), a[0].clone())),
                    _ => None,
                }
            }
            _ => None,
        };
        binds.push(found.ok_or_else(|| {
            Diagnostic::precondition(format!(
                "`{}` is not of the form `let r = M(q);`",
                printer::stmts(std::slice::from_ref(s)).trim()
            ))
        })?);
    }
    let refs: Vec<_> = binds
        .iter()
        .map(|(_, q)| qubit_ref(q, syms).expect("M takes a qubit"))
        .collect();
    for (i, a) in refs.iter().enumerate() {
        if let Some(b) = refs[..i].iter().find(|b| may_conflict(a, b)) {
            return Err(Diagnostic::precondition(format!(
                "`{}` and `{}` may be the same qubit",
                b.text, a.text
            )));
        }
    }
    let mut taken: std::collections::HashSet<String> = syms
        .local_names(r.loc)
        .into_iter()
        .map(str::to_owned)
        .collect();
    taken.extend(ctx.program.callables().map(|(_, c)| c.name.name.clone()));
    let name = match arg(args, "name") {
        Some(n) => {
            check_new_name(n)?;
            if taken.contains(n) {
                return Err(Diagnostic::precondition(format!(
                    "`{n}` is already declared"
                )));
            }
            n.to_owned()
        }
        None => fresh("rs", &taken),
    };
    let mut new = vec![Stmt::new(StmtKind::Let {
        name: Ident::new(&name),
        value: Expr::call(
            Builtin::MultiM.name(),
            vec![Expr::new(ExprKind::Array(
                binds.iter().map(|(_, q)| q.clone()).collect(),
            ))],
        ),
    })];
    for (i, (r, _)) in binds.iter().enumerate() {
        new.push(Stmt::new(StmtKind::Let {
            name: Ident::new(r),
            value: Expr::new(ExprKind::Index(
                Box::new(Expr::name(&name)),
                Box::new(Expr::int(i as i64)),
            )),
        }));
    }
    let mut program = ctx.program.clone();
    let (block, lo) =
        block_of_mut(&mut program.callable_mut(r.loc).body, &r.from).expect("checked range");
    new[0].comments = std::mem::take(&mut block.stmts[lo].comments);
    new[0].blank_before = block.stmts[lo].blank_before;
    block.stmts.splice(lo..=r.hi, new);
    Ok(Outcome::new(
        program,
        format!(
            "consolidated {} measurements at {}:{} into `{name}`",
            r.len(),
            ctx.qualified(r.loc),
            r.from
        ),
    ))
}
