//! Mutable tree walker. Override the hooks you need and call the matching
//! `walk_*_mut` function to keep descending.

use super::ast::*;
use super::span::Span;

pub trait VisitMut: Sized {
    fn visit_program(&mut self, p: &mut Program) {
        walk_program_mut(self, p);
    }
    fn visit_namespace(&mut self, ns: &mut Namespace) {
        walk_namespace_mut(self, ns);
    }
    fn visit_callable(&mut self, c: &mut Callable) {
        walk_callable_mut(self, c);
    }
    fn visit_block(&mut self, b: &mut Block) {
        walk_block_mut(self, b);
    }
    fn visit_stmt(&mut self, s: &mut Stmt) {
        walk_stmt_mut(self, s);
    }
    fn visit_expr(&mut self, e: &mut Expr) {
        walk_expr_mut(self, e);
    }
    fn visit_ident(&mut self, id: &mut Ident) {
        self.visit_span(&mut id.span);
    }
    fn visit_span(&mut self, _span: &mut Span) {}
    fn visit_comments(&mut self, _comments: &mut Vec<Comment>) {}
}

pub fn walk_program_mut<V: VisitMut>(v: &mut V, p: &mut Program) {
    for ns in &mut p.namespaces {
        v.visit_namespace(ns);
    }
    v.visit_comments(&mut p.trailing_comments);
}

pub fn walk_namespace_mut<V: VisitMut>(v: &mut V, ns: &mut Namespace) {
    v.visit_comments(&mut ns.comments);
    v.visit_span(&mut ns.span);
    v.visit_ident(&mut ns.name);
    for o in &mut ns.opens {
        v.visit_ident(o);
    }
    for c in &mut ns.callables {
        v.visit_callable(c);
    }
    v.visit_comments(&mut ns.trailing_comments);
}

pub fn walk_callable_mut<V: VisitMut>(v: &mut V, c: &mut Callable) {
    v.visit_comments(&mut c.comments);
    v.visit_span(&mut c.span);
    v.visit_ident(&mut c.name);
    for p in &mut c.params {
        v.visit_ident(&mut p.name);
    }
    v.visit_block(&mut c.body);
}

pub fn walk_block_mut<V: VisitMut>(v: &mut V, b: &mut Block) {
    v.visit_span(&mut b.span);
    for s in &mut b.stmts {
        v.visit_stmt(s);
    }
    v.visit_comments(&mut b.trailing_comments);
}

pub fn walk_stmt_mut<V: VisitMut>(v: &mut V, s: &mut Stmt) {
    v.visit_comments(&mut s.comments);
    v.visit_span(&mut s.span);
    match &mut s.kind {
        StmtKind::Let { name, value }
        | StmtKind::Mutable { name, value }
        | StmtKind::Set { name, value } => {
            v.visit_expr(value);
            v.visit_ident(name);
        }
        StmtKind::Using {
            binding,
            alloc,
            body,
        } => {
            if let QubitAlloc::Array(n) = alloc {
                v.visit_expr(n);
            }
            v.visit_ident(binding);
            v.visit_block(body);
        }
        StmtKind::For { var, range, body } => {
            v.visit_expr(range);
            v.visit_ident(var);
            v.visit_block(body);
        }
        StmtKind::If {
            cond,
            then_block,
            elifs,
            else_block,
        } => {
            v.visit_expr(cond);
            v.visit_block(then_block);
            for (c, b) in elifs {
                v.visit_expr(c);
                v.visit_block(b);
            }
            if let Some(b) = else_block {
                v.visit_block(b);
            }
        }
        StmtKind::Return(e) | StmtKind::Call(e) => v.visit_expr(e),
    }
}

pub fn walk_expr_mut<V: VisitMut>(v: &mut V, e: &mut Expr) {
    v.visit_span(&mut e.span);
    match &mut e.kind {
        ExprKind::Int(_)
        | ExprKind::Double(_)
        | ExprKind::Bool(_)
        | ExprKind::ResultLit(_)
        | ExprKind::Str(_)
        | ExprKind::Name(_) => {}
        ExprKind::Interp(parts) => {
            for p in parts {
                if let InterpPart::Expr(x) = p {
                    v.visit_expr(x);
                }
            }
        }
        ExprKind::Array(items) => {
            for x in items {
                v.visit_expr(x);
            }
        }
        ExprKind::Index(a, b)
        | ExprKind::Slice(a, b)
        | ExprKind::Range(a, b)
        | ExprKind::Binary(_, a, b) => {
            v.visit_expr(a);
            v.visit_expr(b);
        }
        ExprKind::Unary(_, a) => v.visit_expr(a),
        ExprKind::Call(callee, args) => {
            v.visit_expr(callee);
            for x in args {
                v.visit_expr(x);
            }
        }
        ExprKind::Controlled { controls, args, .. } => {
            v.visit_expr(controls);
            for x in args {
                v.visit_expr(x);
            }
        }
    }
}

/// Applies `f` to every expression in `block`, innermost first.
pub fn map_exprs_in_block(block: &mut Block, f: &mut impl FnMut(&mut Expr)) {
    struct M<'f, F>(&'f mut F);
    impl<F: FnMut(&mut Expr)> VisitMut for M<'_, F> {
        fn visit_expr(&mut self, e: &mut Expr) {
            walk_expr_mut(self, e);
            (self.0)(e);
        }
    }
    M(f).visit_block(block);
}

/// Applies `f` to every statement in `block` (pre-order, nested included).
pub fn for_each_stmt(block: &Block, f: &mut impl FnMut(&Stmt)) {
    for s in &block.stmts {
        f(s);
        for b in s.blocks() {
            for_each_stmt(b, f);
        }
    }
}

/// Applies `f` to every expression evaluated inside `block`, pre-order.
pub fn for_each_expr<'a>(block: &'a Block, f: &mut impl FnMut(&'a Expr)) {
    for s in &block.stmts {
        for e in s.header_exprs() {
            e.walk(f);
        }
        for b in s.blocks() {
            for_each_expr(b, f);
        }
    }
}
