//! Name resolution and type checking against the builtin registry.

use std::collections::HashMap;

use crate::builtins::{Builtin, ParamKind};
use crate::diagnostic::{Code, Diagnostic};
use crate::syntax::ast::*;
use crate::syntax::span::Span;

use super::symbols::*;

/// Resolves every name in `program`. Fails with all diagnostics found.
pub fn resolve(program: &Program) -> Result<SymbolTable, Vec<Diagnostic>> {
    let (table, diags) = resolve_partial(program);
    if diags.is_empty() {
        Ok(table)
    } else {
        Err(diags)
    }
}

/// Resolves as much as possible and returns the table together with any
/// diagnostics.
pub fn resolve_partial(program: &Program) -> (SymbolTable, Vec<Diagnostic>) {
    let mut r = Resolver {
        program,
        table: SymbolTable::default(),
        diags: Vec::new(),
        ns_index: HashMap::new(),
        scope_stack: Vec::new(),
        current: (0, 0),
        exited_qubits: Vec::new(),
    };
    r.run();
    (r.table, r.diags)
}

struct Resolver<'a> {
    program: &'a Program,
    table: SymbolTable,
    diags: Vec<Diagnostic>,
    ns_index: HashMap<&'a str, usize>,
    scope_stack: Vec<ScopeId>,
    current: CallableLoc,
    exited_qubits: Vec<String>,
}

enum Lookup {
    Local(SymbolId),
    Callable(SymbolId),
    Builtin(Builtin),
    Ambiguous(Vec<String>),
    Missing,
}

impl<'a> Resolver<'a> {
    fn error(&mut self, code: Code, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, span, msg));
    }

    fn new_scope(&mut self, parent: Option<ScopeId>) -> ScopeId {
        self.table.scopes.push(Scope {
            parent,
            names: Vec::new(),
        });
        ScopeId(self.table.scopes.len() as u32 - 1)
    }

    fn scope(&self) -> ScopeId {
        *self.scope_stack.last().expect("scope stack is never empty")
    }

    fn push_scope(&mut self) {
        let parent = self.scope();
        let s = self.new_scope(Some(parent));
        self.scope_stack.push(s);
    }

    fn pop_scope(&mut self) {
        self.scope_stack.pop();
    }

    fn add_symbol(
        &mut self,
        ident: &Ident,
        kind: SymbolKind,
        ty: Type,
        mutable: bool,
        qualified: String,
    ) -> SymbolId {
        let scope = self.scope();
        let id = SymbolId(self.table.symbols.len() as u32);
        if kind != SymbolKind::Callable {
            let dup = self.table.scopes[scope.0 as usize]
                .names
                .iter()
                .any(|(n, _)| *n == ident.name);
            if dup {
                self.error(
                    Code::Duplicate,
                    ident.span,
                    format!("`{}` is already declared in this scope", ident.name),
                );
            }
        }
        self.table.symbols.push(Symbol {
            id,
            name: ident.name.clone(),
            kind,
            decl: ident.span,
            ty,
            mutable,
            scope,
            owner: self.current,
            qualified,
        });
        self.table.scopes[scope.0 as usize]
            .names
            .push((ident.name.clone(), id));
        self.record(ident.span, id, Role::Decl);
        id
    }

    fn record(&mut self, span: Span, symbol: SymbolId, role: Role) {
        let scope = self.scope();
        self.table.occurrences.push(Occurrence {
            span,
            symbol,
            role,
            scope,
        });
        self.table
            .names
            .insert(key(&span), Resolution::Symbol(symbol));
    }

    fn run(&mut self) {
        let root = self.new_scope(None);
        self.scope_stack.push(root);
        let program = self.program;
        for (ni, ns) in program.namespaces.iter().enumerate() {
            if self.ns_index.insert(ns.name.name.as_str(), ni).is_some() {
                self.error(
                    Code::Duplicate,
                    ns.name.span,
                    format!("namespace `{}` is declared twice", ns.name.name),
                );
            }
        }
        for (ni, ns) in program.namespaces.iter().enumerate() {
            for (ci, c) in ns.callables.iter().enumerate() {
                if ns.callables[..ci]
                    .iter()
                    .any(|o| o.name.name == c.name.name)
                {
                    self.error(
                        Code::Duplicate,
                        c.name.span,
                        format!(
                            "callable `{}` is declared twice in `{}`",
                            c.name.name, ns.name.name
                        ),
                    );
                }
                if Builtin::from_name(&c.name.name).is_some() {
                    self.error(
                        Code::Duplicate,
                        c.name.span,
                        format!("callable `{}` collides with a builtin", c.name.name),
                    );
                }
                self.current = (ni, ci);
                let id = self.add_symbol(
                    &c.name,
                    SymbolKind::Callable,
                    c.return_type.clone(),
                    false,
                    format!("{}.{}", ns.name.name, c.name.name),
                );
                self.table.callables.insert((ni, ci), id);
                self.table.callable_kinds.insert(id, c.kind);
            }
        }
        for (ni, ns) in program.namespaces.iter().enumerate() {
            for (ci, c) in ns.callables.iter().enumerate() {
                self.current = (ni, ci);
                self.callable(c);
            }
        }
    }

    fn callable(&mut self, c: &Callable) {
        self.exited_qubits.clear();
        self.push_scope();
        for p in &c.params {
            self.add_symbol(
                &p.name,
                SymbolKind::Parameter,
                p.ty.clone(),
                false,
                p.name.name.clone(),
            );
        }
        if c.return_type.is_quantum() {
            self.error(
                Code::QubitEscape,
                c.name.span,
                "callables cannot return qubits",
            );
        }
        self.block(&c.body, &c.return_type);
        if c.return_type != Type::Unit && !definitely_returns(&c.body) {
            self.error(
                Code::Type,
                c.name.span,
                format!(
                    "`{}` returns `{}` but not every path ends in `return`",
                    c.name.name, c.return_type
                ),
            );
        }
        self.pop_scope();
    }

    fn block(&mut self, b: &Block, ret: &Type) {
        self.push_scope();
        self.block_in_scope(b, ret);
        self.pop_scope();
    }

    fn block_in_scope(&mut self, b: &Block, ret: &Type) {
        for s in &b.stmts {
            self.stmt(s, ret);
        }
    }

    fn stmt(&mut self, s: &Stmt, ret: &Type) {
        match &s.kind {
            StmtKind::Let { name, value } | StmtKind::Mutable { name, value } => {
                let mutable = matches!(s.kind, StmtKind::Mutable { .. });
                let ty = self.expr(value);
                if let Some(t) = &ty {
                    if *t == Type::Unit {
                        self.error(Code::Type, value.span, "cannot bind a `Unit` value");
                    } else if t.is_quantum() {
                        self.error(
                            Code::Type,
                            value.span,
                            "qubit values cannot be rebound with `let`/`mutable`",
                        );
                    }
                }
                self.add_symbol(
                    name,
                    SymbolKind::Variable,
                    ty.unwrap_or(Type::Unit),
                    mutable,
                    name.name.clone(),
                );
            }
            StmtKind::Set { name, value } => {
                let ty = self.expr(value);
                match self.lookup(&name.name) {
                    Lookup::Local(id) => {
                        self.record(name.span, id, Role::Assign);
                        let sym = self.table.symbol(id).clone();
                        if !sym.mutable {
                            self.error(
                                Code::Type,
                                name.span,
                                format!("`{}` is not mutable", name.name),
                            );
                        } else if let Some(t) = ty {
                            if t != sym.ty {
                                self.error(
                                    Code::Type,
                                    value.span,
                                    format!("expected `{}`, found `{}`", sym.ty, t),
                                );
                            }
                        }
                    }
                    _ => self.unresolved(&name.name, name.span),
                }
            }
            StmtKind::Using {
                binding,
                alloc,
                body,
            } => {
                let ty = match alloc {
                    QubitAlloc::Single => Type::Qubit,
                    QubitAlloc::Array(n) => {
                        self.expect_type(n, &Type::Int);
                        Type::array(Type::Qubit)
                    }
                };
                self.push_scope();
                self.add_symbol(
                    binding,
                    SymbolKind::QubitBinding,
                    ty,
                    false,
                    binding.name.clone(),
                );
                self.block(body, ret);
                self.pop_scope();
                self.exited_qubits.push(binding.name.clone());
            }
            StmtKind::For { var, range, body } => {
                self.expect_type(range, &Type::Range);
                self.push_scope();
                self.add_symbol(var, SymbolKind::LoopVar, Type::Int, false, var.name.clone());
                self.block(body, ret);
                self.pop_scope();
            }
            StmtKind::If {
                cond,
                then_block,
                elifs,
                else_block,
            } => {
                self.expect_type(cond, &Type::Bool);
                self.block(then_block, ret);
                for (c, b) in elifs {
                    self.expect_type(c, &Type::Bool);
                    self.block(b, ret);
                }
                if let Some(b) = else_block {
                    self.block(b, ret);
                }
            }
            StmtKind::Return(e) => {
                let ty = self.expr(e);
                if *ret == Type::Unit {
                    self.error(Code::Type, s.span, "`Unit` callables cannot return a value");
                } else if let Some(t) = ty {
                    if t.is_quantum() {
                        self.error(Code::QubitEscape, e.span, "qubits cannot be returned");
                    } else if t != *ret {
                        self.error(Code::Type, e.span, format!("expected `{ret}`, found `{t}`"));
                    }
                }
            }
            StmtKind::Call(e) => {
                self.expr(e);
            }
        }
    }

    fn expect_type(&mut self, e: &Expr, want: &Type) {
        if let Some(t) = self.expr(e) {
            if t != *want {
                self.error(
                    Code::Type,
                    e.span,
                    format!("expected `{want}`, found `{t}`"),
                );
            }
        }
    }

    fn lookup(&self, name: &str) -> Lookup {
        if !name.contains('.') {
            if let Some(id) = self.lookup_local(name) {
                return Lookup::Local(id);
            }
            let (ni, _) = self.current;
            let ns = &self.program.namespaces[ni];
            if let Some(ci) = ns.callables.iter().position(|c| c.name.name == name) {
                return Lookup::Callable(self.table.callables[&(ni, ci)]);
            }
            let mut found = Vec::new();
            for open in &ns.opens {
                if let Some(&oi) = self.ns_index.get(open.name.as_str()) {
                    if oi == ni {
                        continue;
                    }
                    if let Some(ci) = self.program.namespaces[oi]
                        .callables
                        .iter()
                        .position(|c| c.name.name == name)
                    {
                        found.push((oi, ci));
                    }
                }
            }
            found.dedup();
            match found.len() {
                0 => {}
                1 => return Lookup::Callable(self.table.callables[&found[0]]),
                _ => {
                    return Lookup::Ambiguous(
                        found
                            .iter()
                            .map(|&(oi, _)| self.program.namespaces[oi].name.name.clone())
                            .collect(),
                    )
                }
            }
            if let Some(b) = Builtin::from_name(name) {
                return Lookup::Builtin(b);
            }
            return Lookup::Missing;
        }
        let (ns_name, item) = name.rsplit_once('.').expect("dotted");
        if let Some(&oi) = self.ns_index.get(ns_name) {
            if let Some(ci) = self.program.namespaces[oi]
                .callables
                .iter()
                .position(|c| c.name.name == item)
            {
                return Lookup::Callable(self.table.callables[&(oi, ci)]);
            }
        }
        Lookup::Missing
    }

    fn lookup_local(&self, name: &str) -> Option<SymbolId> {
        for s in self.scope_stack.iter().rev() {
            let sc = &self.table.scopes[s.0 as usize];
            if let Some((_, id)) = sc.names.iter().rev().find(|(n, _)| n == name) {
                if self.table.symbol(*id).kind != SymbolKind::Callable {
                    return Some(*id);
                }
            }
        }
        None
    }

    fn unresolved(&mut self, name: &str, span: Span) {
        if self.exited_qubits.iter().any(|q| q == name) {
            self.error(
                Code::QubitEscape,
                span,
                format!("qubit `{name}` is used outside the `using` block that allocated it"),
            );
        } else {
            self.error(
                Code::Unresolved,
                span,
                format!("cannot find `{name}` in scope"),
            );
        }
    }

    fn expr(&mut self, e: &Expr) -> Option<Type> {
        let t = self.expr_inner(e);
        if let Some(t) = &t {
            self.table.types.insert(key(&e.span), t.clone());
        }
        t
    }

    fn expr_inner(&mut self, e: &Expr) -> Option<Type> {
        match &e.kind {
            ExprKind::Int(_) => Some(Type::Int),
            ExprKind::Double(_) => Some(Type::Double),
            ExprKind::Bool(_) => Some(Type::Bool),
            ExprKind::ResultLit(_) => Some(Type::Result),
            ExprKind::Str(_) => Some(Type::String),
            ExprKind::Interp(parts) => {
                for p in parts {
                    if let InterpPart::Expr(x) = p {
                        if let Some(t) = self.expr(x) {
                            if t == Type::Unit || t.is_quantum() {
                                self.error(
                                    Code::Type,
                                    x.span,
                                    format!("cannot format a `{t}` value"),
                                );
                            }
                        }
                    }
                }
                Some(Type::String)
            }
            ExprKind::Name(n) => match self.lookup(n) {
                Lookup::Local(id) => {
                    self.record(e.span, id, Role::Use);
                    Some(self.table.symbol(id).ty.clone())
                }
                Lookup::Callable(id) => {
                    self.record(e.span, id, Role::Use);
                    self.error(
                        Code::Type,
                        e.span,
                        format!("callable `{n}` cannot be used as a value"),
                    );
                    None
                }
                Lookup::Builtin(b) => {
                    self.table
                        .names
                        .insert(key(&e.span), Resolution::Builtin(b));
                    self.error(
                        Code::Type,
                        e.span,
                        format!("builtin `{n}` cannot be used as a value here"),
                    );
                    None
                }
                Lookup::Ambiguous(nss) => {
                    self.error(
                        Code::Ambiguous,
                        e.span,
                        format!("`{n}` is ambiguous between {}", nss.join(", ")),
                    );
                    None
                }
                Lookup::Missing => {
                    self.unresolved(n, e.span);
                    None
                }
            },
            ExprKind::Array(items) => {
                let tys: Vec<Option<Type>> = items.iter().map(|x| self.expr(x)).collect();
                if items.is_empty() {
                    self.error(
                        Code::Type,
                        e.span,
                        "cannot infer the type of an empty array",
                    );
                    return None;
                }
                let first = tys[0].clone()?;
                for (x, t) in items.iter().zip(&tys).skip(1) {
                    if let Some(t) = t {
                        if *t != first {
                            self.error(
                                Code::Type,
                                x.span,
                                format!("array elements must all be `{first}`, found `{t}`"),
                            );
                        }
                    }
                }
                Some(Type::array(first))
            }
            ExprKind::Index(base, idx) => {
                let bt = self.expr(base);
                self.expect_type(idx, &Type::Int);
                match bt? {
                    Type::Array(t) => Some(*t),
                    other => {
                        self.error(Code::Type, base.span, format!("cannot index a `{other}`"));
                        None
                    }
                }
            }
            ExprKind::Slice(base, range) => {
                let bt = self.expr(base);
                self.expect_type(range, &Type::Range);
                match bt? {
                    t @ Type::Array(_) => Some(t),
                    other => {
                        self.error(Code::Type, base.span, format!("cannot slice a `{other}`"));
                        None
                    }
                }
            }
            ExprKind::Range(lo, hi) => {
                self.expect_type(lo, &Type::Int);
                self.expect_type(hi, &Type::Int);
                Some(Type::Range)
            }
            ExprKind::Unary(op, x) => {
                let t = self.expr(x)?;
                let ok = match op {
                    UnOp::Neg => matches!(t, Type::Int | Type::Double),
                    UnOp::Not => t == Type::Bool,
                };
                if !ok {
                    self.error(
                        Code::Type,
                        x.span,
                        format!("operator not defined for `{t}`"),
                    );
                    return None;
                }
                Some(t)
            }
            ExprKind::Binary(op, l, r) => {
                let lt = self.expr(l);
                let rt = self.expr(r);
                let (lt, rt) = (lt?, rt?);
                if lt != rt {
                    self.error(
                        Code::Type,
                        e.span,
                        format!("mismatched operand types `{lt}` and `{rt}`"),
                    );
                    return None;
                }
                let result = match op {
                    BinOp::Add => {
                        matches!(lt, Type::Int | Type::Double | Type::String).then(|| lt.clone())
                    }
                    BinOp::Sub | BinOp::Mul | BinOp::Div => {
                        matches!(lt, Type::Int | Type::Double).then(|| lt.clone())
                    }
                    BinOp::Mod => (lt == Type::Int).then_some(Type::Int),
                    BinOp::Eq | BinOp::Ne => matches!(
                        lt,
                        Type::Int | Type::Double | Type::Bool | Type::String | Type::Result
                    )
                    .then_some(Type::Bool),
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        matches!(lt, Type::Int | Type::Double).then_some(Type::Bool)
                    }
                    BinOp::And | BinOp::Or => (lt == Type::Bool).then_some(Type::Bool),
                };
                if result.is_none() {
                    self.error(
                        Code::Type,
                        e.span,
                        format!("operator `{}` not defined for `{lt}`", op.symbol()),
                    );
                }
                result
            }
            ExprKind::Call(callee, args) => self.call(e, callee, args),
            ExprKind::Controlled { controls, args, .. } => {
                self.expect_type(controls, &Type::array(Type::Qubit));
                if args.len() != 1 {
                    self.error(
                        Code::Arity,
                        e.span,
                        format!("`Controlled X` expects 1 target, found {}", args.len()),
                    );
                }
                for a in args {
                    self.expect_type(a, &Type::Qubit);
                }
                Some(Type::Unit)
            }
        }
    }

    fn call(&mut self, e: &Expr, callee: &Expr, args: &[Expr]) -> Option<Type> {
        let Some(name) = callee.as_name() else {
            self.error(
                Code::Type,
                callee.span,
                "only named callables can be called",
            );
            for a in args {
                self.expr(a);
            }
            return None;
        };
        match self.lookup(name) {
            Lookup::Builtin(b) => {
                self.table
                    .names
                    .insert(key(&callee.span), Resolution::Builtin(b));
                let params = b.params();
                if params.len() != args.len() {
                    self.error(
                        Code::Arity,
                        e.span,
                        format!(
                            "`{}` expects {} argument{}, found {}",
                            b.name(),
                            params.len(),
                            if params.len() == 1 { "" } else { "s" },
                            args.len()
                        ),
                    );
                }
                for (a, p) in args.iter().zip(params.iter()) {
                    match p {
                        ParamKind::Value(t) => self.expect_type(a, t),
                        ParamKind::Gate => {
                            let gate = a.as_name().and_then(|n| match self.lookup(n) {
                                Lookup::Builtin(g) if g.is_each_target() => Some(g),
                                _ => None,
                            });
                            match gate {
                                Some(g) => {
                                    self.table
                                        .names
                                        .insert(key(&a.span), Resolution::Builtin(g));
                                }
                                None => self.error(
                                    Code::Type,
                                    a.span,
                                    "expected a single-qubit gate name",
                                ),
                            }
                        }
                    }
                }
                for a in args.iter().skip(params.len()) {
                    self.expr(a);
                }
                Some(b.return_type())
            }
            Lookup::Callable(id) => {
                self.record(callee.span, id, Role::Call);
                let owner = self.table.symbol(id).owner;
                let target = self.program.callable(owner);
                if target.params.len() != args.len() {
                    self.error(
                        Code::Arity,
                        e.span,
                        format!(
                            "`{}` expects {} argument{}, found {}",
                            target.name.name,
                            target.params.len(),
                            if target.params.len() == 1 { "" } else { "s" },
                            args.len()
                        ),
                    );
                }
                for (a, p) in args.iter().zip(target.params.iter()) {
                    self.expect_type(a, &p.ty);
                }
                for a in args.iter().skip(target.params.len()) {
                    self.expr(a);
                }
                Some(target.return_type.clone())
            }
            Lookup::Local(id) => {
                self.record(callee.span, id, Role::Use);
                self.error(Code::Type, callee.span, format!("`{name}` is not callable"));
                for a in args {
                    self.expr(a);
                }
                None
            }
            Lookup::Ambiguous(nss) => {
                self.error(
                    Code::Ambiguous,
                    callee.span,
                    format!("`{name}` is ambiguous between {}", nss.join(", ")),
                );
                for a in args {
                    self.expr(a);
                }
                None
            }
            Lookup::Missing => {
                self.unresolved(name, callee.span);
                for a in args {
                    self.expr(a);
                }
                None
            }
        }
    }
}

/// Whether every path through `b` ends in `return`.
pub fn definitely_returns(b: &Block) -> bool {
    b.stmts.iter().any(|s| match &s.kind {
        StmtKind::Return(_) => true,
        StmtKind::If {
            then_block,
            elifs,
            else_block: Some(e),
            ..
        } => {
            definitely_returns(then_block)
                && elifs.iter().all(|(_, b)| definitely_returns(b))
                && definitely_returns(e)
        }
        StmtKind::Using { body, .. } => definitely_returns(body),
        _ => false,
    })
}
