//! Gate merging and replacement driven by the rule table.

use std::collections::HashMap;

use crate::analysis::calls::builtin_callee;
use crate::analysis::index::{all_paths, block_of, block_of_mut, same_block};
use crate::analysis::qubits::{const_int, may_conflict, qubit_refs, QubitRef};
use crate::analysis::{CallableLoc, Path, SymbolTable};
use crate::builtins::Builtin;
use crate::diagnostic::Diagnostic;
use crate::syntax::ast::*;
use crate::syntax::printer;

use super::rules::{Builtin1, GateOp, GateRuleTable, Rule, RuleKind};
use super::util::{contains_return, each_stmt};
use super::{req_arg, request, Args, Ctx, Outcome, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    One(Builtin1),
    Cnot,
    ControlledX,
}

/// A gate statement: its shape and operand expressions.
struct Gate {
    shape: Shape,
    operands: Vec<Expr>,
}

fn op_shape(op: &GateOp) -> (Shape, Vec<usize>) {
    match *op {
        GateOp::One(g, w) => (Shape::One(g), vec![w]),
        GateOp::Cnot(c, t) => (Shape::Cnot, vec![c, t]),
        GateOp::ControlledX(c, t) => (Shape::ControlledX, vec![c, t]),
    }
}

/// Operands whose meaning cannot change between two statements.
fn stable(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Name(_) => true,
        ExprKind::Index(base, idx) => {
            matches!(base.kind, ExprKind::Name(_)) && const_int(idx).is_some()
        }
        _ => false,
    }
}

fn gate_of(s: &Stmt, syms: &SymbolTable) -> Option<Gate> {
    let StmtKind::Call(e) = &s.kind else {
        return None;
    };
    let (shape, operands) = match &e.kind {
        ExprKind::Call(_, args) => {
            let b = builtin_callee(e, syms)?;
            let shape = if b == Builtin::Cnot {
                Shape::Cnot
            } else {
                Shape::One(Builtin1::from_builtin(b)?)
            };
            (shape, args.clone())
        }
        ExprKind::Controlled {
            gate,
            controls,
            args,
        } if gate == "X" && args.len() == 1 => match &controls.kind {
            ExprKind::Array(cs) if cs.len() == 1 => {
                (Shape::ControlledX, vec![cs[0].clone(), args[0].clone()])
            }
            _ => return None,
        },
        _ => return None,
    };
    operands
        .iter()
        .all(stable)
        .then_some(Gate { shape, operands })
}

/// Binds rule wires to operand text when `gates` match `lhs` in order.
fn match_rule(lhs: &[GateOp], gates: &[Gate]) -> Option<HashMap<usize, Expr>> {
    if lhs.len() != gates.len() {
        return None;
    }
    let mut wires: HashMap<usize, Expr> = HashMap::new();
    for (op, g) in lhs.iter().zip(gates) {
        let (shape, ws) = op_shape(op);
        if shape != g.shape {
            return None;
        }
        for (w, e) in ws.iter().zip(&g.operands) {
            match wires.get(w) {
                Some(prev) if printer::expr(prev) != printer::expr(e) => return None,
                Some(_) => {}
                None => {
                    wires.insert(*w, e.clone());
                }
            }
        }
    }
    let mut texts: Vec<String> = wires.values().map(printer::expr).collect();
    texts.sort();
    texts.dedup();
    (texts.len() == wires.len()).then_some(wires)
}

fn instantiate(rhs: &[GateOp], wires: &HashMap<usize, Expr>) -> Vec<Stmt> {
    rhs.iter()
        .map(|op| {
            let e = match *op {
                GateOp::One(g, w) => Expr::call(g.builtin().name(), vec![wires[&w].clone()]),
                GateOp::Cnot(c, t) => Expr::call(
                    Builtin::Cnot.name(),
                    vec![wires[&c].clone(), wires[&t].clone()],
                ),
                GateOp::ControlledX(c, t) => Expr::new(ExprKind::Controlled {
                    gate: "X".into(),
                    controls: Box::new(Expr::new(ExprKind::Array(vec![wires[&c].clone()]))),
                    args: vec![wires[&t].clone()],
                }),
            };
            Stmt::new(StmtKind::Call(e))
        })
        .collect()
}

fn refs_of(s: &Stmt, syms: &SymbolTable) -> Vec<QubitRef> {
    let mut out = Vec::new();
    each_stmt(std::slice::from_ref(s), &mut |x| {
        for e in x.header_exprs() {
            qubit_refs(e, syms, &mut out);
        }
    });
    out
}

struct Reduction {
    first: Path,
    second: Path,
    rule: &'static str,
    replacement: Vec<Stmt>,
}

/// Statement range a merge may touch: (any path in the block, lo, end).
type Scope = Option<(Path, usize, usize)>;

fn find_reduction(
    ctx: &Ctx,
    loc: CallableLoc,
    table: &GateRuleTable,
    scope: &Scope,
) -> Option<Reduction> {
    let syms = &ctx.symbols;
    let body = ctx.body(loc);
    let in_scope = |p: &Path| match scope {
        None => true,
        Some((anchor, lo, end)) => same_block(body, anchor, p) && (*lo..*end).contains(&p.last()),
    };
    for (p, s) in all_paths(body) {
        if !in_scope(&p) {
            continue;
        }
        let Some(g) = gate_of(s, syms) else { continue };
        let (block, i) = block_of(body, &p).expect("indexed path");
        let mine = refs_of(s, syms);
        for (k, other) in block.stmts.iter().enumerate().skip(i + 1) {
            if contains_return(std::slice::from_ref(other)) {
                break;
            }
            let theirs = refs_of(other, syms);
            if !mine
                .iter()
                .any(|a| theirs.iter().any(|b| may_conflict(a, b)))
            {
                continue;
            }
            let q = p.with_last(p.last() + (k - i));
            if !in_scope(&q) {
                break;
            }
            let Some(h) = gate_of(other, syms) else { break };
            let pair = [g, h];
            for rule in table.reductions() {
                if let Some(w) = match_rule(&rule.lhs, &pair) {
                    return Some(Reduction {
                        first: p.clone(),
                        second: q,
                        rule: rule.name,
                        replacement: instantiate(&rule.rhs, &w),
                    });
                }
            }
            break;
        }
    }
    None
}

pub(crate) fn merge_gates(ctx: &Ctx, target: &Target, _args: &Args) -> Result<Outcome, Diagnostic> {
    let (loc, mut scope) = match target {
        Target::Stmts { .. } => {
            let r = ctx.range(target)?;
            (
                r.loc,
                Some((r.from.clone(), r.from.last(), r.to.last() + 1)),
            )
        }
        _ => (ctx.single_callable(target)?, None),
    };
    let table = GateRuleTable::standard();
    let mut cur = Ctx::new(&ctx.program)?;
    let mut changes = Vec::new();
    while let Some(red) = find_reduction(&cur, loc, &table, &scope) {
        let mut program = cur.program.clone();
        let body = &mut program.callable_mut(loc).body;
        let (block, i) = block_of_mut(body, &red.first).expect("indexed path");
        let j = i + (red.second.last() - red.first.last());
        let removed = block.stmts.remove(j);
        let mut comments = removed.comments;
        let old = block.stmts.remove(i);
        comments.splice(0..0, old.comments);
        let n = red.replacement.len();
        block.stmts.splice(i..i, red.replacement);
        match block.stmts.get_mut(i) {
            Some(s) => s.comments.splice(0..0, comments).for_each(drop),
            None => block
                .trailing_comments
                .splice(0..0, comments)
                .for_each(drop),
        }
        if let Some((_, _, end)) = &mut scope {
            *end -= 2 - n;
        }
        changes.push(format!(
            "applied {} at {}:{} and {}",
            red.rule,
            ctx.qualified(loc),
            red.first,
            red.second
        ));
        cur = Ctx::new(&program)?;
    }
    Ok(Outcome {
        program: cur.program,
        changes,
    })
}

pub(crate) fn replace_gate(ctx: &Ctx, target: &Target, args: &Args) -> Result<Outcome, Diagnostic> {
    let r = ctx.range(target)?;
    let name = req_arg(args, "rule")?;
    let table = GateRuleTable::standard();
    let rule: &Rule = table
        .get(name)
        .filter(|r| r.kind == RuleKind::Substitution)
        .ok_or_else(|| {
            let names: Vec<&str> = table
                .rules
                .iter()
                .filter(|r| r.kind == RuleKind::Substitution)
                .map(|r| r.name)
                .collect();
            request(format!(
                "unknown substitution rule `{name}`; known: {}",
                names.join(", ")
            ))
        })?;
    let (block, _) = block_of(ctx.body(r.loc), &r.from).expect("checked range");
    let gates: Option<Vec<Gate>> = block.stmts[r.lo..=r.hi]
        .iter()
        .map(|s| gate_of(s, &ctx.symbols))
        .collect();
    let wires = gates
        .and_then(|g| match_rule(&rule.lhs, &g))
        .ok_or_else(|| {
            Diagnostic::precondition(format!(
                "{}:{}..{} does not match the left side of `{name}`",
                ctx.qualified(r.loc),
                r.from,
                r.to
            ))
        })?;
    let mut program = ctx.program.clone();
    let (block, lo) =
        block_of_mut(&mut program.callable_mut(r.loc).body, &r.from).expect("checked range");
    let comments = std::mem::take(&mut block.stmts[lo].comments);
    let mut new = instantiate(&rule.rhs, &wires);
    new[0].comments = comments;
    block.stmts.splice(lo..=r.hi, new);
    Ok(Outcome::new(
        program,
        format!("applied {name} at {}:{}", ctx.qualified(r.loc), r.from),
    ))
}
