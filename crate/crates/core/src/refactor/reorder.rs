//! Statement reordering and qubit relabeling.

use crate::analysis::index::{block_of_mut, stmt_at};
use crate::analysis::pdg::{build_pdg, EdgeKind};
use crate::analysis::qubits::const_int;
use crate::diagnostic::Diagnostic;
use crate::syntax::ast::*;
use crate::syntax::visit::{self, VisitMut};

use super::util::each_expr;
use super::{req_arg, request, Args, Ctx, Outcome, Target};

fn edge_name(k: EdgeKind) -> &'static str {
    match k {
        EdgeKind::Control => "ControlDep",
        EdgeKind::Data => "DataDep",
        EdgeKind::Qubit => "QubitOrder",
    }
}

pub(crate) fn reorder_instructions(
    ctx: &Ctx,
    target: &Target,
    _args: &Args,
) -> Result<Outcome, Diagnostic> {
    let r = ctx.range(target)?;
    if r.lo == r.hi {
        return Err(request("name two different statements, as a..b"));
    }
    let pdg = build_pdg(&ctx.program, &ctx.symbols, r.loc);
    if let Err(b) = pdg.can_swap(&r.from, &r.to) {
        let at = |id: usize| {
            pdg.nodes[id]
                .path
                .as_ref()
                .map_or_else(|| "entry".to_owned(), |p| p.to_string())
        };
        return Err(Diagnostic::precondition(format!(
            "the statements are dependent: {} edge on `{}` from {} to {}",
            edge_name(b.kind),
            b.label,
            at(b.from),
            at(b.to)
        )));
    }
    let mut program = ctx.program.clone();
    let (block, lo) =
        block_of_mut(&mut program.callable_mut(r.loc).body, &r.from).expect("checked range");
    block.stmts.swap(lo, r.hi);
    Ok(Outcome::new(
        program,
        format!("swapped {}:{} and {}", ctx.qualified(r.loc), r.from, r.to),
    ))
}

fn parse_permutation(spec: &str, n: usize) -> Result<Vec<i64>, Diagnostic> {
    let perm: Vec<usize> = spec
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| request(format!("expected permutation=i,j,..., got `{spec}`")))?;
    let mut seen = vec![false; n];
    if perm.len() != n
        || perm
            .iter()
            .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
    {
        return Err(Diagnostic::precondition(format!(
            "`{spec}` is not a permutation of 0..{}",
            n.saturating_sub(1)
        )));
    }
    Ok(perm.into_iter().map(|i| i as i64).collect())
}

pub(crate) fn order_qubits(ctx: &Ctx, target: &Target, args: &Args) -> Result<Outcome, Diagnostic> {
    let (loc, path) = ctx.stmt(target)?;
    let stmt = stmt_at(ctx.body(loc), &path).expect("checked path");
    let StmtKind::Using {
        binding,
        alloc: QubitAlloc::Array(size),
        body,
    } = &stmt.kind
    else {
        return Err(Diagnostic::precondition(format!(
            "statement {path} does not allocate a qubit array"
        )));
    };
    let n = const_int(size)
        .filter(|&n| n >= 0)
        .ok_or_else(|| Diagnostic::precondition("the register size is not a constant"))?
        as usize;
    let perm = parse_permutation(req_arg(args, "permutation")?, n)?;
    let syms = &ctx.symbols;
    let reg = syms
        .symbol_at(&binding.span)
        .expect("bindings are resolved");
    let is_reg =
        |e: &Expr| matches!(e.kind, ExprKind::Name(_)) && syms.symbol_at(&e.span) == Some(reg);
    let (mut indexed, mut whole) = (0, 0);
    let mut dynamic = None;
    each_expr(&body.stmts, &mut |e| match &e.kind {
        ExprKind::Index(base, idx) if is_reg(base) => match const_int(idx) {
            Some(i) if (0..n as i64).contains(&i) => indexed += 1,
            _ => {
                dynamic.get_or_insert_with(|| crate::syntax::printer::expr(e));
            }
        },
        _ if is_reg(e) => whole += 1,
        _ => {}
    });
    if let Some(text) = dynamic {
        return Err(Diagnostic::precondition(format!(
            "`{text}` does not use a constant index in range"
        )));
    }
    if whole > indexed && indexed > 0 {
        return Err(Diagnostic::precondition(format!(
            "`{}` is used both whole and by index",
            binding.name
        )));
    }
    let identity = perm.iter().enumerate().all(|(i, &p)| i as i64 == p);
    if indexed == 0 || identity {
        return Ok(Outcome {
            program: ctx.program.clone(),
            changes: Vec::new(),
        });
    }
    struct P<'a, F: Fn(&Expr) -> bool> {
        is_reg: F,
        perm: &'a [i64],
    }
    impl<F: Fn(&Expr) -> bool> VisitMut for P<'_, F> {
        fn visit_expr(&mut self, e: &mut Expr) {
            if let ExprKind::Index(base, idx) = &mut e.kind {
                if (self.is_reg)(base) {
                    let i = const_int(idx).expect("checked index");
                    **idx = Expr::int(self.perm[i as usize]);
                    return;
                }
            }
            visit::walk_expr_mut(self, e);
        }
    }
    let mut program = ctx.program.clone();
    let (block, i) =
        block_of_mut(&mut program.callable_mut(loc).body, &path).expect("checked path");
    P {
        is_reg,
        perm: &perm,
    }
    .visit_stmt(&mut block.stmts[i]);
    Ok(Outcome::new(
        program,
        format!(
            "relabeled the qubits of `{}` by ({})",
            binding.name,
            req_arg(args, "permutation")?
        ),
    ))
}
