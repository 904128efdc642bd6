//! Call graph over user callables.

use std::collections::{BTreeSet, HashSet};

use crate::builtins::Builtin;
use crate::syntax::ast::{Expr, ExprKind, Program};
use crate::syntax::visit::for_each_expr;

use super::symbols::{CallableLoc, Resolution, SymbolKind, SymbolTable};

/// Callee of a call expression, when it is a user callable.
pub fn user_callee(e: &Expr, symbols: &SymbolTable) -> Option<CallableLoc> {
    let ExprKind::Call(callee, _) = &e.kind else {
        return None;
    };
    match symbols.resolution(&callee.span)? {
        Resolution::Symbol(id) => {
            let s = symbols.symbol(id);
            (s.kind == SymbolKind::Callable).then_some(s.owner)
        }
        Resolution::Builtin(_) => None,
    }
}

pub fn builtin_callee(e: &Expr, symbols: &SymbolTable) -> Option<Builtin> {
    let ExprKind::Call(callee, _) = &e.kind else {
        return None;
    };
    match symbols.resolution(&callee.span)? {
        Resolution::Builtin(b) => Some(b),
        Resolution::Symbol(_) => None,
    }
}

/// Direct user callees of `loc`.
pub fn callees(
    program: &Program,
    symbols: &SymbolTable,
    loc: CallableLoc,
) -> BTreeSet<CallableLoc> {
    let mut out = BTreeSet::new();
    for_each_expr(&program.callable(loc).body, &mut |e| {
        if let Some(c) = user_callee(e, symbols) {
            out.insert(c);
        }
    });
    out
}

/// Callables reachable from `loc` through one or more calls.
pub fn reachable(
    program: &Program,
    symbols: &SymbolTable,
    loc: CallableLoc,
) -> BTreeSet<CallableLoc> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<CallableLoc> = callees(program, symbols, loc).into_iter().collect();
    while let Some(c) = stack.pop() {
        if seen.insert(c) {
            stack.extend(callees(program, symbols, c));
        }
    }
    seen
}

pub fn is_recursive(program: &Program, symbols: &SymbolTable, loc: CallableLoc) -> bool {
    reachable(program, symbols, loc).contains(&loc)
}

/// Callables whose execution may append to the message trace.
pub fn emitters(program: &Program, symbols: &SymbolTable) -> HashSet<CallableLoc> {
    let mut direct = HashSet::new();
    for (ni, ns) in program.namespaces.iter().enumerate() {
        for (ci, c) in ns.callables.iter().enumerate() {
            let mut emits = false;
            for_each_expr(&c.body, &mut |e| {
                emits |= builtin_callee(e, symbols) == Some(Builtin::Message);
            });
            if emits {
                direct.insert((ni, ci));
            }
        }
    }
    let mut out = HashSet::new();
    for (ni, ns) in program.namespaces.iter().enumerate() {
        for ci in 0..ns.callables.len() {
            let loc = (ni, ci);
            if direct.contains(&loc)
                || reachable(program, symbols, loc)
                    .iter()
                    .any(|c| direct.contains(c))
            {
                out.insert(loc);
            }
        }
    }
    out
}
