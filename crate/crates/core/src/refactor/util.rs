//! Shared rewriting helpers.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::analysis::calls::builtin_callee;
use crate::analysis::qubits::const_int;
use crate::analysis::{SymbolId, SymbolKind, SymbolTable};
use crate::builtins;
use crate::diagnostic::Diagnostic;
use crate::syntax::ast::*;
use crate::syntax::lexer::is_plain_ident;
use crate::syntax::span::Span;
use crate::syntax::visit::{self, VisitMut};

/// Renames every declaration of and reference to the symbols in `map`.
pub fn rename_symbols<T: Walk>(
    node: &mut T,
    symbols: &SymbolTable,
    map: &HashMap<SymbolId, String>,
) {
    struct R<'a> {
        symbols: &'a SymbolTable,
        map: &'a HashMap<SymbolId, String>,
    }
    impl VisitMut for R<'_> {
        fn visit_ident(&mut self, id: &mut Ident) {
            if let Some(new) = self
                .symbols
                .symbol_at(&id.span)
                .and_then(|s| self.map.get(&s))
            {
                id.name = new.clone();
            }
        }
        fn visit_expr(&mut self, e: &mut Expr) {
            let hit = self
                .symbols
                .symbol_at(&e.span)
                .and_then(|s| self.map.get(&s));
            if let (Some(new), ExprKind::Name(n)) = (hit, &mut e.kind) {
                *n = match n.rsplit_once('.') {
                    Some((ns, _)) => format!("{ns}.{new}"),
                    None => new.clone(),
                };
            }
            visit::walk_expr_mut(self, e);
        }
    }
    node.walk(&mut R { symbols, map });
}

/// Replaces every reference to a symbol in `map` with a copy of its
/// expression.
pub fn substitute<T: Walk>(node: &mut T, symbols: &SymbolTable, map: &HashMap<SymbolId, Expr>) {
    struct S<'a> {
        symbols: &'a SymbolTable,
        map: &'a HashMap<SymbolId, Expr>,
    }
    impl VisitMut for S<'_> {
        fn visit_expr(&mut self, e: &mut Expr) {
            if matches!(e.kind, ExprKind::Name(_)) {
                if let Some(r) = self
                    .symbols
                    .symbol_at(&e.span)
                    .and_then(|s| self.map.get(&s))
                {
                    *e = r.clone();
                    return;
                }
            }
            visit::walk_expr_mut(self, e);
        }
    }
    node.walk(&mut S { symbols, map });
}

/// Nodes a visitor can start from.
pub trait Walk {
    fn walk<V: VisitMut>(&mut self, v: &mut V);
}

impl Walk for Program {
    fn walk<V: VisitMut>(&mut self, v: &mut V) {
        v.visit_program(self);
    }
}

impl Walk for Callable {
    fn walk<V: VisitMut>(&mut self, v: &mut V) {
        v.visit_callable(self);
    }
}

impl Walk for Block {
    fn walk<V: VisitMut>(&mut self, v: &mut V) {
        v.visit_block(self);
    }
}

impl Walk for Stmt {
    fn walk<V: VisitMut>(&mut self, v: &mut V) {
        v.visit_stmt(self);
    }
}

impl Walk for Vec<Stmt> {
    fn walk<V: VisitMut>(&mut self, v: &mut V) {
        for s in self {
            v.visit_stmt(s);
        }
    }
}

impl Walk for Expr {
    fn walk<V: VisitMut>(&mut self, v: &mut V) {
        v.visit_expr(self);
    }
}

/// Copy with spans reset and comments dropped.
pub fn normalized<T: Walk + Clone>(node: &T) -> T {
    struct N;
    impl VisitMut for N {
        fn visit_span(&mut self, span: &mut Span) {
            *span = Span::default();
        }
        fn visit_comments(&mut self, c: &mut Vec<Comment>) {
            c.clear();
        }
        fn visit_stmt(&mut self, s: &mut Stmt) {
            s.blank_before = false;
            visit::walk_stmt_mut(self, s);
        }
    }
    let mut n = node.clone();
    n.walk(&mut N);
    n
}

/// Every expression evaluated by `stmts`, nested blocks included.
pub fn each_expr<'a>(stmts: &'a [Stmt], f: &mut impl FnMut(&'a Expr)) {
    for s in stmts {
        for e in s.header_exprs() {
            e.walk(f);
        }
        for b in s.blocks() {
            each_expr(&b.stmts, f);
        }
    }
}

pub fn each_stmt<'a>(stmts: &'a [Stmt], f: &mut impl FnMut(&'a Stmt)) {
    for s in stmts {
        f(s);
        for b in s.blocks() {
            each_stmt(&b.stmts, f);
        }
    }
}

pub fn contains_return(stmts: &[Stmt]) -> bool {
    let mut found = false;
    each_stmt(stmts, &mut |s| {
        found |= matches!(s.kind, StmtKind::Return(_))
    });
    found
}

/// Every name spelled anywhere in the program: namespaces segments,
/// callables, parameters, locals and references.
pub fn all_names(program: &Program) -> HashSet<String> {
    struct C(HashSet<String>);
    impl VisitMut for C {
        fn visit_ident(&mut self, id: &mut Ident) {
            for part in id.name.split('.') {
                self.0.insert(part.to_owned());
            }
        }
        fn visit_expr(&mut self, e: &mut Expr) {
            if let ExprKind::Name(n) = &e.kind {
                for part in n.split('.') {
                    self.0.insert(part.to_owned());
                }
            }
            visit::walk_expr_mut(self, e);
        }
    }
    let mut c = C(HashSet::new());
    c.visit_program(&mut program.clone());
    c.0
}

/// `base` when it is free, else `base_k` for the smallest free `k >= 1`.
pub fn fresh(base: &str, taken: &HashSet<String>) -> String {
    if !taken.contains(base) && !builtins::is_builtin(base) {
        return base.to_owned();
    }
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !taken.contains(n))
        .expect("unbounded")
}

/// Validates a user-supplied name for a new declaration.
pub fn check_new_name(name: &str) -> Result<(), Diagnostic> {
    if builtins::is_builtin(name) {
        return Err(Diagnostic::precondition(format!(
            "`{name}` is a builtin name"
        )));
    }
    if !is_plain_ident(name) {
        return Err(Diagnostic::precondition(format!(
            "`{name}` is not a valid identifier"
        )));
    }
    Ok(())
}

/// Whether evaluating `e` can have an effect: any call other than a pure
/// builtin, or a controlled application.
pub fn has_effects(e: &Expr, symbols: &SymbolTable) -> bool {
    let mut found = false;
    e.walk(&mut |x| match &x.kind {
        ExprKind::Call(..) => {
            if builtin_callee(x, symbols).is_none_or(|b| b.is_effectful()) {
                found = true;
            }
        }
        ExprKind::Controlled { .. } => found = true,
        _ => {}
    });
    found
}

/// Folds literal arithmetic, comparisons and boolean connectives in place.
pub fn fold(e: &mut Expr) {
    struct F;
    impl VisitMut for F {
        fn visit_expr(&mut self, e: &mut Expr) {
            visit::walk_expr_mut(self, e);
            if let Some(k) = fold_one(e) {
                e.kind = k;
            }
        }
    }
    F.visit_expr(e);
}

fn fold_one(e: &Expr) -> Option<ExprKind> {
    use ExprKind::*;
    match &e.kind {
        Binary(op, a, b) => {
            if let (Some(x), Some(y)) = (const_int(a), const_int(b)) {
                if matches!(a.kind, Int(_)) && matches!(b.kind, Int(_)) {
                    return Some(match op {
                        BinOp::Eq => Bool(x == y),
                        BinOp::Ne => Bool(x != y),
                        BinOp::Lt => Bool(x < y),
                        BinOp::Le => Bool(x <= y),
                        BinOp::Gt => Bool(x > y),
                        BinOp::Ge => Bool(x >= y),
                        _ => Int(const_int(e)?),
                    });
                }
            }
            match (op, &a.kind, &b.kind) {
                (BinOp::And, Bool(x), Bool(y)) => Some(Bool(*x && *y)),
                (BinOp::Or, Bool(x), Bool(y)) => Some(Bool(*x || *y)),
                (BinOp::Eq, Bool(x), Bool(y)) => Some(Bool(x == y)),
                (BinOp::Ne, Bool(x), Bool(y)) => Some(Bool(x != y)),
                (BinOp::Eq, ResultLit(x), ResultLit(y)) => Some(Bool(x == y)),
                (BinOp::Ne, ResultLit(x), ResultLit(y)) => Some(Bool(x != y)),
                _ => None,
            }
        }
        Unary(UnOp::Neg, a) => match a.kind {
            Int(v) => v.checked_neg().map(Int),
            _ => None,
        },
        Unary(UnOp::Not, a) => match a.kind {
            Bool(v) => Some(Bool(!v)),
            _ => None,
        },
        _ => None,
    }
}

/// Local symbols referenced in `stmts` but declared outside the span
/// `[lo, hi)`, sorted qubits first, then by declaration order.
pub fn free_symbols(stmts: &[Stmt], symbols: &SymbolTable, lo: u32, hi: u32) -> Vec<SymbolId> {
    let mut set = BTreeSet::new();
    each_expr(stmts, &mut |e| {
        if matches!(e.kind, ExprKind::Name(_)) {
            if let Some(id) = symbols.symbol_at(&e.span) {
                let s = symbols.symbol(id);
                if s.kind != SymbolKind::Callable && !(lo <= s.decl.lo && s.decl.hi <= hi) {
                    set.insert(id);
                }
            }
        }
    });
    let mut v: Vec<SymbolId> = set.into_iter().collect();
    v.sort_by_key(|id| (!symbols.symbol(*id).ty.is_quantum(), *id));
    v
}

/// Symbols declared in `[lo, hi)` that are referenced after `hi`.
pub fn live_out(symbols: &SymbolTable, lo: u32, hi: u32) -> Vec<SymbolId> {
    symbols
        .symbols
        .iter()
        .filter(|s| s.kind != SymbolKind::Callable && lo <= s.decl.lo && s.decl.hi <= hi)
        .filter(|s| symbols.occurrences_of(s.id).any(|o| o.span.lo >= hi))
        .map(|s| s.id)
        .collect()
}

/// Byte span covered by a statement run.
pub fn extent(stmts: &[Stmt]) -> (u32, u32) {
    (stmts[0].span.lo, stmts[stmts.len() - 1].span.hi)
}

/// The user or builtin call expression a statement is made of, if any:
/// the statement itself, a `let`/`mutable`/`set` initializer or a
/// `return` value.
pub fn stmt_call(s: &Stmt) -> Option<&Expr> {
    let e = match &s.kind {
        StmtKind::Call(e) | StmtKind::Return(e) => e,
        StmtKind::Let { value, .. }
        | StmtKind::Mutable { value, .. }
        | StmtKind::Set { value, .. } => value,
        _ => return None,
    };
    matches!(e.kind, ExprKind::Call(..)).then_some(e)
}

pub fn stmt_call_mut(s: &mut Stmt) -> Option<&mut Expr> {
    let e = match &mut s.kind {
        StmtKind::Call(e) | StmtKind::Return(e) => e,
        StmtKind::Let { value, .. }
        | StmtKind::Mutable { value, .. }
        | StmtKind::Set { value, .. } => value,
        _ => return None,
    };
    matches!(e.kind, ExprKind::Call(..)).then_some(e)
}

/// Rewrites every call of a callable in `targets` anywhere in `program`.
pub fn rewrite_calls(
    program: &mut Program,
    symbols: &SymbolTable,
    targets: &[SymbolId],
    f: &mut impl FnMut(SymbolId, &mut String, &mut Vec<Expr>),
) {
    struct W<'a, F> {
        symbols: &'a SymbolTable,
        targets: &'a [SymbolId],
        f: &'a mut F,
    }
    impl<F: FnMut(SymbolId, &mut String, &mut Vec<Expr>)> VisitMut for W<'_, F> {
        fn visit_expr(&mut self, e: &mut Expr) {
            visit::walk_expr_mut(self, e);
            if let ExprKind::Call(callee, args) = &mut e.kind {
                if let Some(id) = self.symbols.symbol_at(&callee.span) {
                    if self.targets.contains(&id) {
                        if let ExprKind::Name(n) = &mut callee.kind {
                            (self.f)(id, n, args);
                        }
                    }
                }
            }
        }
    }
    W {
        symbols,
        targets,
        f,
    }
    .visit_program(program);
}

/// Replaces the last segment of a possibly qualified name.
pub fn set_last_segment(name: &mut String, new: &str) {
    *name = match name.rsplit_once('.') {
        Some((ns, _)) => format!("{ns}.{new}"),
        None => new.to_owned(),
    };
}

/// Literal value of a simple literal expression, as source text for names.
pub fn literal_tag(e: &Expr) -> Option<String> {
    Some(match &e.kind {
        ExprKind::Int(v) if *v < 0 => format!("m{}", v.unsigned_abs()),
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::ResultLit(true) => "One".into(),
        ExprKind::ResultLit(false) => "Zero".into(),
        ExprKind::Double(d) => format!("{d}").replace('-', "m").replace('.', "p"),
        _ => return None,
    })
}

pub fn literal_type(e: &Expr) -> Option<Type> {
    Some(match e.kind {
        ExprKind::Int(_) => Type::Int,
        ExprKind::Double(_) => Type::Double,
        ExprKind::Bool(_) => Type::Bool,
        ExprKind::ResultLit(_) => Type::Result,
        ExprKind::Str(_) => Type::String,
        _ => return None,
    })
}

/// Mutable references to every literal in the statements, pre-order.
pub fn literals_mut(stmts: &mut [Stmt]) -> Vec<&mut Expr> {
    fn expr<'a>(e: &'a mut Expr, out: &mut Vec<&'a mut Expr>) {
        if e.is_literal() {
            out.push(e);
            return;
        }
        match &mut e.kind {
            ExprKind::Interp(parts) => {
                for p in parts {
                    if let InterpPart::Expr(x) = p {
                        expr(x, out);
                    }
                }
            }
            ExprKind::Array(items) => items.iter_mut().for_each(|x| expr(x, out)),
            ExprKind::Index(a, b)
            | ExprKind::Slice(a, b)
            | ExprKind::Range(a, b)
            | ExprKind::Binary(_, a, b) => {
                expr(a, out);
                expr(b, out);
            }
            ExprKind::Unary(_, a) => expr(a, out),
            ExprKind::Call(c, args) => {
                expr(c, out);
                args.iter_mut().for_each(|x| expr(x, out));
            }
            ExprKind::Controlled { controls, args, .. } => {
                expr(controls, out);
                args.iter_mut().for_each(|x| expr(x, out));
            }
            _ => {}
        }
    }
    fn block<'a>(list: &'a mut [Stmt], out: &mut Vec<&'a mut Expr>) {
        for s in list {
            match &mut s.kind {
                StmtKind::Let { value, .. }
                | StmtKind::Mutable { value, .. }
                | StmtKind::Set { value, .. }
                | StmtKind::Return(value)
                | StmtKind::Call(value) => expr(value, out),
                StmtKind::Using { alloc, body, .. } => {
                    if let QubitAlloc::Array(n) = alloc {
                        expr(n, out);
                    }
                    block(&mut body.stmts, out);
                }
                StmtKind::For { range, body, .. } => {
                    expr(range, out);
                    block(&mut body.stmts, out);
                }
                StmtKind::If {
                    cond,
                    then_block,
                    elifs,
                    else_block,
                } => {
                    expr(cond, out);
                    block(&mut then_block.stmts, out);
                    for (c, b) in elifs {
                        expr(c, out);
                        block(&mut b.stmts, out);
                    }
                    if let Some(b) = else_block {
                        block(&mut b.stmts, out);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    block(stmts, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, printer};

    #[test]
    fn folding_literals() {
        let mut e = parse_expr("1 + 2 * 3 == 7 and not false").unwrap();
        fold(&mut e);
        assert_eq!(e.kind, ExprKind::Bool(true));
        let mut e = parse_expr("x + (2 - 1)").unwrap();
        fold(&mut e);
        assert_eq!(printer::expr(&e), "x + 1");
    }

    #[test]
    fn fresh_names() {
        let taken: HashSet<String> = ["rs".to_owned(), "rs_1".to_owned()].into();
        assert_eq!(fresh("rs", &taken), "rs_2");
        assert_eq!(fresh("x", &taken), "x");
        assert_eq!(fresh("H", &taken), "H_1");
    }

    #[test]
    fn identifiers() {
        assert!(check_new_name("outcome").is_ok());
        assert!(check_new_name("M").is_err());
        assert!(check_new_name("for").is_err());
        assert!(check_new_name("2x").is_err());
    }
}
