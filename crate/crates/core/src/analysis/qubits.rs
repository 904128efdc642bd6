//! Syntactic qubit references and the aliasing rule.

use crate::syntax::ast::{BinOp, Expr, ExprKind, UnOp};
use crate::syntax::printer;
use crate::syntax::span::Span;

use super::symbols::{SymbolId, SymbolTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selector {
    /// The binding itself (a single qubit or a whole array).
    Whole,
    /// `q[i]`, with the index when it is a constant.
    Index(Option<i64>),
    /// `q[a..b]`, with constant bounds when known.
    Slice(Option<(i64, i64)>),
}

#[derive(Clone, Debug)]
pub struct QubitRef {
    pub binding: SymbolId,
    pub sel: Selector,
    pub span: Span,
    pub text: String,
}

/// Folds an integer expression built from literals.
pub fn const_int(e: &Expr) -> Option<i64> {
    match &e.kind {
        ExprKind::Int(v) => Some(*v),
        ExprKind::Unary(UnOp::Neg, x) => const_int(x)?.checked_neg(),
        ExprKind::Binary(op, a, b) => {
            let (a, b) = (const_int(a)?, const_int(b)?);
            match op {
                BinOp::Add => a.checked_add(b),
                BinOp::Sub => a.checked_sub(b),
                BinOp::Mul => a.checked_mul(b),
                BinOp::Div => a.checked_div(b),
                BinOp::Mod => a.checked_rem(b),
                _ => None,
            }
        }
        _ => None,
    }
}

fn quantum_symbol(e: &Expr, symbols: &SymbolTable) -> Option<SymbolId> {
    if !matches!(e.kind, ExprKind::Name(_)) {
        return None;
    }
    let id = symbols.symbol_at(&e.span)?;
    symbols.symbol(id).ty.is_quantum().then_some(id)
}

/// Interprets `e` as a reference to (part of) a qubit binding.
pub fn qubit_ref(e: &Expr, symbols: &SymbolTable) -> Option<QubitRef> {
    let (binding, sel) = match &e.kind {
        ExprKind::Name(_) => (quantum_symbol(e, symbols)?, Selector::Whole),
        ExprKind::Index(base, idx) => (
            quantum_symbol(base, symbols)?,
            Selector::Index(const_int(idx)),
        ),
        ExprKind::Slice(base, range) => {
            let bounds = match &range.kind {
                ExprKind::Range(lo, hi) => const_int(lo).zip(const_int(hi)),
                _ => None,
            };
            (quantum_symbol(base, symbols)?, Selector::Slice(bounds))
        }
        _ => return None,
    };
    Some(QubitRef {
        binding,
        sel,
        span: e.span,
        text: printer::expr(e),
    })
}

/// Outermost qubit references inside `e`.
pub fn qubit_refs(e: &Expr, symbols: &SymbolTable, out: &mut Vec<QubitRef>) {
    if let Some(r) = qubit_ref(e, symbols) {
        out.push(r);
        return;
    }
    for c in e.children() {
        qubit_refs(c, symbols, out);
    }
}

/// Conservative conflict: the references may denote a common qubit.
pub fn may_conflict(a: &QubitRef, b: &QubitRef) -> bool {
    if a.binding != b.binding {
        return false;
    }
    match (&a.sel, &b.sel) {
        (Selector::Index(Some(x)), Selector::Index(Some(y))) => x == y,
        _ => true,
    }
}

/// Definite overlap: the references certainly share a qubit.
pub fn must_overlap(a: &QubitRef, b: &QubitRef) -> bool {
    if a.binding != b.binding {
        return false;
    }
    use Selector::*;
    match (&a.sel, &b.sel) {
        (Whole, _) | (_, Whole) => true,
        (Index(Some(x)), Index(Some(y))) => x == y,
        (Index(Some(k)), Slice(Some((lo, hi)))) | (Slice(Some((lo, hi))), Index(Some(k))) => {
            lo <= k && k <= hi
        }
        (Slice(Some((a0, a1))), Slice(Some((b0, b1)))) => {
            a0 <= a1 && b0 <= b1 && a0 <= b1 && b0 <= a1
        }
        _ => a.text == b.text,
    }
}
