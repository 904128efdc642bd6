//! Syntax tree for the supported Q# subset.
//!
//! Every node carries a [`Span`]. Structural comparison that ignores spans
//! and comments goes through [`Program::normalized`] / [`ast_equal`].

use std::fmt;

use super::span::Span;
use super::visit::{self, VisitMut};

#[derive(Clone, Debug, PartialEq)]
pub struct Comment {
    /// Text after the leading `//`, trailing whitespace removed.
    pub text: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: Span::default(),
        }
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub namespaces: Vec<Namespace>,
    pub trailing_comments: Vec<Comment>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Namespace {
    /// Dotted name, e.g. `MyNamespace.Math`.
    pub name: Ident,
    pub opens: Vec<Ident>,
    pub callables: Vec<Callable>,
    pub comments: Vec<Comment>,
    pub trailing_comments: Vec<Comment>,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CallableKind {
    Operation,
    Function,
}

impl CallableKind {
    pub fn keyword(self) -> &'static str {
        match self {
            CallableKind::Operation => "operation",
            CallableKind::Function => "function",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Callable {
    pub kind: CallableKind,
    pub name: Ident,
    pub params: Vec<Param>,
    pub return_type: Type,
    pub body: Block,
    pub comments: Vec<Comment>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: Ident,
    pub ty: Type,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Unit,
    Int,
    Double,
    Bool,
    String,
    Result,
    Range,
    Qubit,
    Array(Box<Type>),
}

impl Type {
    pub fn array(elem: Type) -> Type {
        Type::Array(Box::new(elem))
    }

    /// `Qubit` or an array (of arrays) of qubits.
    pub fn is_quantum(&self) -> bool {
        match self {
            Type::Qubit => true,
            Type::Array(t) => t.is_quantum(),
            _ => false,
        }
    }

    pub fn elem(&self) -> Option<&Type> {
        match self {
            Type::Array(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Unit => f.write_str("Unit"),
            Type::Int => f.write_str("Int"),
            Type::Double => f.write_str("Double"),
            Type::Bool => f.write_str("Bool"),
            Type::String => f.write_str("String"),
            Type::Result => f.write_str("Result"),
            Type::Range => f.write_str("Range"),
            Type::Qubit => f.write_str("Qubit"),
            Type::Array(t) => write!(f, "{t}[]"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    /// Comments between the last statement and the closing brace.
    pub trailing_comments: Vec<Comment>,
    pub span: Span,
}

impl Block {
    pub fn new(stmts: Vec<Stmt>) -> Self {
        Block {
            stmts,
            ..Block::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub comments: Vec<Comment>,
    /// Preceded by a blank line in the source; kept when printing.
    pub blank_before: bool,
    pub span: Span,
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Stmt {
            kind,
            comments: Vec::new(),
            blank_before: false,
            span: Span::default(),
        }
    }

    /// Nested blocks in source order.
    pub fn blocks(&self) -> Vec<&Block> {
        match &self.kind {
            StmtKind::Using { body, .. } | StmtKind::For { body, .. } => vec![body],
            StmtKind::If {
                then_block,
                elifs,
                else_block,
                ..
            } => {
                let mut v = vec![then_block];
                v.extend(elifs.iter().map(|(_, b)| b));
                v.extend(else_block.iter());
                v
            }
            _ => Vec::new(),
        }
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut Block> {
        match &mut self.kind {
            StmtKind::Using { body, .. } | StmtKind::For { body, .. } => vec![body],
            StmtKind::If {
                then_block,
                elifs,
                else_block,
                ..
            } => {
                let mut v = vec![then_block];
                v.extend(elifs.iter_mut().map(|(_, b)| b));
                v.extend(else_block.iter_mut());
                v
            }
            _ => Vec::new(),
        }
    }

    /// Expressions evaluated by this statement itself, excluding nested blocks.
    pub fn header_exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Let { value, .. }
            | StmtKind::Mutable { value, .. }
            | StmtKind::Set { value, .. } => vec![value],
            StmtKind::Using { alloc, .. } => match alloc {
                QubitAlloc::Single => Vec::new(),
                QubitAlloc::Array(e) => vec![e],
            },
            StmtKind::For { range, .. } => vec![range],
            StmtKind::If { cond, elifs, .. } => {
                let mut v = vec![cond];
                v.extend(elifs.iter().map(|(c, _)| c));
                v
            }
            StmtKind::Return(e) | StmtKind::Call(e) => vec![e],
        }
    }

    pub fn is_compound(&self) -> bool {
        matches!(
            self.kind,
            StmtKind::Using { .. } | StmtKind::For { .. } | StmtKind::If { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QubitAlloc {
    /// `Qubit()`
    Single,
    /// `Qubit[n]`
    Array(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Let {
        name: Ident,
        value: Expr,
    },
    Mutable {
        name: Ident,
        value: Expr,
    },
    Set {
        name: Ident,
        value: Expr,
    },
    Using {
        binding: Ident,
        alloc: QubitAlloc,
        body: Block,
    },
    For {
        var: Ident,
        range: Expr,
        body: Block,
    },
    If {
        cond: Expr,
        then_block: Block,
        elifs: Vec<(Expr, Block)>,
        else_block: Option<Block>,
    },
    Return(Expr),
    /// Expression statement; always a call or controlled application.
    Call(Expr),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    /// Binding strength; higher binds tighter. Ranges sit below all of these.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Ne => 4,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InterpPart {
    Lit(String),
    Expr(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Double(f64),
    Bool(bool),
    /// `Zero` (false) or `One` (true).
    ResultLit(bool),
    Str(String),
    Interp(Vec<InterpPart>),
    /// Possibly dotted name, e.g. `q` or `MyNamespace.Op`.
    Name(String),
    Array(Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Slice(Box<Expr>, Box<Expr>),
    Range(Box<Expr>, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    Call(Box<Expr>, Vec<Expr>),
    /// `Controlled X(controls, target)`
    Controlled {
        gate: String,
        controls: Box<Expr>,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn name(n: impl Into<String>) -> Self {
        Expr::new(ExprKind::Name(n.into()))
    }

    pub fn int(v: i64) -> Self {
        Expr::new(ExprKind::Int(v))
    }

    pub fn call(callee: impl Into<String>, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Call(Box::new(Expr::name(callee)), args))
    }

    pub fn as_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Name(n) => Some(n),
            _ => None,
        }
    }

    /// Callee name for `f(args)`.
    pub fn callee_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Call(callee, _) => callee.as_name(),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::Int(_)
                | ExprKind::Double(_)
                | ExprKind::Bool(_)
                | ExprKind::ResultLit(_)
                | ExprKind::Str(_)
        )
    }

    /// Direct subexpressions in evaluation order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Int(_)
            | ExprKind::Double(_)
            | ExprKind::Bool(_)
            | ExprKind::ResultLit(_)
            | ExprKind::Str(_)
            | ExprKind::Name(_) => Vec::new(),
            ExprKind::Interp(parts) => parts
                .iter()
                .filter_map(|p| match p {
                    InterpPart::Expr(e) => Some(e),
                    InterpPart::Lit(_) => None,
                })
                .collect(),
            ExprKind::Array(items) => items.iter().collect(),
            ExprKind::Index(a, b)
            | ExprKind::Slice(a, b)
            | ExprKind::Range(a, b)
            | ExprKind::Binary(_, a, b) => vec![a, b],
            ExprKind::Unary(_, a) => vec![a],
            ExprKind::Call(callee, args) => {
                let mut v = vec![callee.as_ref()];
                v.extend(args.iter());
                v
            }
            ExprKind::Controlled { controls, args, .. } => {
                let mut v = vec![controls.as_ref()];
                v.extend(args.iter());
                v
            }
        }
    }

    /// Pre-order walk over this expression and all subexpressions.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

impl Program {
    /// Copy with every span reset and every comment dropped.
    pub fn normalized(&self) -> Program {
        let mut p = self.clone();
        Normalizer.visit_program(&mut p);
        p
    }

    pub fn namespace(&self, name: &str) -> Option<&Namespace> {
        self.namespaces.iter().find(|n| n.name.name == name)
    }

    /// All callables with their namespace, in source order.
    pub fn callables(&self) -> impl Iterator<Item = (&Namespace, &Callable)> {
        self.namespaces
            .iter()
            .flat_map(|ns| ns.callables.iter().map(move |c| (ns, c)))
    }

    /// Looks up `Ns.Callable`, or a bare callable name when it is unique.
    pub fn find_callable(&self, qualified: &str) -> Option<(usize, usize)> {
        if let Some((ns, name)) = qualified.rsplit_once('.') {
            let ni = self.namespaces.iter().position(|n| n.name.name == ns)?;
            let ci = self.namespaces[ni]
                .callables
                .iter()
                .position(|c| c.name.name == name)?;
            return Some((ni, ci));
        }
        let mut found = None;
        for (ni, ns) in self.namespaces.iter().enumerate() {
            for (ci, c) in ns.callables.iter().enumerate() {
                if c.name.name == qualified {
                    if found.is_some() {
                        return None;
                    }
                    found = Some((ni, ci));
                }
            }
        }
        found
    }

    pub fn callable(&self, loc: (usize, usize)) -> &Callable {
        &self.namespaces[loc.0].callables[loc.1]
    }

    pub fn callable_mut(&mut self, loc: (usize, usize)) -> &mut Callable {
        &mut self.namespaces[loc.0].callables[loc.1]
    }
}

struct Normalizer;

impl VisitMut for Normalizer {
    fn visit_span(&mut self, span: &mut Span) {
        *span = Span::default();
    }

    fn visit_comments(&mut self, comments: &mut Vec<Comment>) {
        comments.clear();
    }

    fn visit_stmt(&mut self, stmt: &mut Stmt) {
        stmt.blank_before = false;
        visit::walk_stmt_mut(self, stmt);
    }
}

/// Structural equality ignoring spans, comments and blank lines.
pub fn ast_equal(a: &Program, b: &Program) -> bool {
    a.normalized() == b.normalized()
}
