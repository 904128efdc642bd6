//! Loop unrolling and rolling.

use std::collections::{HashMap, HashSet};

use crate::analysis::dups::canonical;
use crate::analysis::index::{block_of, block_of_mut, stmt_at};
use crate::analysis::qubits::const_int;
use crate::analysis::SymbolId;
use crate::diagnostic::Diagnostic;
use crate::syntax::ast::*;

use super::util::{
    check_new_name, contains_return, extent, fresh, literals_mut, live_out, normalized,
    rename_symbols, substitute,
};
use super::{arg, request, Args, Ctx, Outcome, Target};

const DEFAULT_LIMIT: i64 = 64;

fn taken_names(ctx: &Ctx, loc: crate::analysis::CallableLoc) -> HashSet<String> {
    let mut taken: HashSet<String> = ctx
        .symbols
        .local_names(loc)
        .into_iter()
        .map(str::to_owned)
        .collect();
    taken.extend(ctx.program.callables().map(|(_, c)| c.name.name.clone()));
    taken
}

pub(crate) fn unroll(ctx: &Ctx, target: &Target, args: &Args) -> Result<Outcome, Diagnostic> {
    let (loc, path) = ctx.stmt(target)?;
    let limit = match arg(args, "limit") {
        Some(s) => s
            .parse::<i64>()
            .map_err(|_| request(format!("expected limit=<integer>, got `{s}`")))?,
        None => DEFAULT_LIMIT,
    };
    let stmt = stmt_at(ctx.body(loc), &path).expect("checked path");
    let StmtKind::For { var, range, body } = &stmt.kind else {
        return Err(Diagnostic::precondition(format!(
            "statement {path} is not a for loop"
        )));
    };
    let bounds = match &range.kind {
        ExprKind::Range(a, b) => const_int(a).zip(const_int(b)),
        _ => None,
    };
    let (lo, hi) =
        bounds.ok_or_else(|| Diagnostic::precondition("the loop bounds are not constant"))?;
    let count = (hi - lo + 1).max(0);
    if count > limit {
        return Err(Diagnostic::precondition(format!(
            "the loop runs {count} times, over the limit of {limit}"
        )));
    }
    if contains_return(&body.stmts) {
        return Err(Diagnostic::precondition("the loop body contains a return"));
    }
    let syms = &ctx.symbols;
    let var_id = syms
        .symbol_at(&var.span)
        .expect("loop variables are resolved");
    let decls: Vec<(SymbolId, &str)> = body
        .stmts
        .iter()
        .filter_map(|s| match &s.kind {
            StmtKind::Let { name, .. } | StmtKind::Mutable { name, .. } => {
                Some((syms.symbol_at(&name.span)?, name.name.as_str()))
            }
            _ => None,
        })
        .collect();
    let mut taken = taken_names(ctx, loc);
    let mut copies = Vec::new();
    for (k, v) in (lo..=hi).enumerate() {
        let mut stmts = body.stmts.clone();
        let renames: HashMap<SymbolId, String> = decls
            .iter()
            .map(|&(id, n)| {
                let new = fresh(&format!("{n}_{}", k + 1), &taken);
                taken.insert(new.clone());
                (id, new)
            })
            .collect();
        rename_symbols(&mut stmts, syms, &renames);
        substitute(&mut stmts, syms, &HashMap::from([(var_id, Expr::int(v))]));
        copies.extend(stmts);
    }
    let mut program = ctx.program.clone();
    let (block, i) =
        block_of_mut(&mut program.callable_mut(loc).body, &path).expect("checked path");
    let comments = std::mem::take(&mut block.stmts[i].comments);
    match copies.first_mut() {
        Some(first) => first.comments.splice(0..0, comments),
        None if i + 1 < block.stmts.len() => block.stmts[i + 1].comments.splice(0..0, comments),
        None => block.trailing_comments.splice(0..0, comments),
    };
    block.stmts.splice(i..=i, copies);
    Ok(Outcome::new(
        program,
        format!(
            "unrolled the loop at {}:{path} into {count} copies",
            ctx.qualified(loc)
        ),
    ))
}

/// Canonical text with literals blanked, and the literals themselves.
fn shape(s: &Stmt) -> (String, Vec<Expr>) {
    let mut blank = vec![s.clone()];
    let lits = literals_mut(&mut blank).into_iter().map(|e| {
        let l = normalized(e);
        *e = Expr::name("%lit");
        l
    });
    let lits: Vec<Expr> = lits.collect();
    (canonical(&blank), lits)
}

pub(crate) fn roll(ctx: &Ctx, target: &Target, args: &Args) -> Result<Outcome, Diagnostic> {
    let r = ctx.range(target)?;
    if r.len() < 2 {
        return Err(Diagnostic::precondition(
            "rolling needs at least two statements",
        ));
    }
    let (block, _) = block_of(ctx.body(r.loc), &r.from).expect("checked range");
    let stmts = &block.stmts[r.lo..=r.hi];
    if contains_return(stmts) {
        return Err(Diagnostic::precondition("the statements contain a return"));
    }
    let shapes: Vec<(String, Vec<Expr>)> = stmts.iter().map(shape).collect();
    let uniform = Diagnostic::precondition("the statements are not uniform");
    if shapes.iter().any(|s| s.0 != shapes[0].0) {
        return Err(uniform);
    }
    let varying: Vec<usize> = (0..shapes[0].1.len())
        .filter(|&j| shapes.iter().any(|s| s.1[j] != shapes[0].1[j]))
        .collect();
    let mut start = None;
    if !varying.is_empty() {
        let mut values = Vec::new();
        for s in &shapes {
            let vals: Vec<Option<i64>> = varying
                .iter()
                .map(|&j| match s.1[j].kind {
                    ExprKind::Int(v) => Some(v),
                    _ => None,
                })
                .collect();
            match vals[0] {
                Some(v) if vals.iter().all(|x| *x == Some(v)) => values.push(v),
                _ => return Err(uniform),
            }
        }
        if values.windows(2).any(|w| w[0].checked_add(1) != Some(w[1])) {
            return Err(Diagnostic::precondition(
                "the varying literal does not step by one",
            ));
        }
        start = Some(values[0]);
    }
    let (lo, hi) = extent(stmts);
    if let Some(&id) = live_out(&ctx.symbols, lo, hi).first() {
        return Err(Diagnostic::precondition(format!(
            "`{}` is used after the statements",
            ctx.symbols.symbol(id).name
        )));
    }
    let taken = taken_names(ctx, r.loc);
    let var = match arg(args, "var") {
        Some(v) => {
            check_new_name(v)?;
            if taken.contains(v) {
                return Err(Diagnostic::precondition(format!(
                    "`{v}` is already declared"
                )));
            }
            v.to_owned()
        }
        None => fresh("i", &taken),
    };
    let k = r.len() as i64;
    let mut first = vec![stmts[0].clone()];
    first[0].comments.clear();
    let (from, to) = match start {
        Some(v0) => {
            for (j, l) in literals_mut(&mut first).into_iter().enumerate() {
                if varying.contains(&j) {
                    *l = Expr::name(&var);
                }
            }
            (v0, v0 + k - 1)
        }
        None => (1, k),
    };
    let mut lp = Stmt::new(StmtKind::For {
        var: Ident::new(&var),
        range: Expr::new(ExprKind::Range(
            Box::new(Expr::int(from)),
            Box::new(Expr::int(to)),
        )),
        body: Block::new(first),
    });
    let mut program = ctx.program.clone();
    let (block, lo) =
        block_of_mut(&mut program.callable_mut(r.loc).body, &r.from).expect("checked range");
    lp.comments = block.stmts[lo..=r.hi]
        .iter_mut()
        .flat_map(|s| std::mem::take(&mut s.comments))
        .collect();
    lp.blank_before = block.stmts[lo].blank_before;
    block.stmts.splice(lo..=r.hi, [lp]);
    Ok(Outcome::new(
        program,
        format!(
            "rolled {k} statements at {}:{} into a loop",
            ctx.qualified(r.loc),
            r.from
        ),
    ))
}
