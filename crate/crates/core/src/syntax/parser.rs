use crate::diagnostic::{Code, Diagnostic};

use super::ast::*;
use super::lexer::{unescape, Kw, Lexer, Tok, Token, UNSUPPORTED_WORDS};
use super::span::{FileId, LineIndex, Span};

const MAX_DEPTH: usize = 64;

/// Parses one `.qs` source file.
///
/// Returns either a program or at least one diagnostic, never both.
pub fn parse(source: &str, file: FileId) -> Result<Program, Vec<Diagnostic>> {
    let lines = LineIndex::new(file, source);
    let tokens = Lexer::new(source, 0, &lines)
        .tokenize()
        .map_err(|d| vec![d])?;
    check_balanced(&tokens, &lines).map_err(|d| vec![d])?;
    let mut p = Parser {
        toks: tokens,
        pos: 0,
        lines: &lines,
        depth: 0,
    };
    p.program().map_err(|d| vec![d])
}

/// Parses a standalone expression (used by request arguments such as
/// default parameter values).
pub fn parse_expr(source: &str) -> Result<Expr, Diagnostic> {
    let lines = LineIndex::new(FileId(u32::MAX), source);
    let tokens = Lexer::new(source, 0, &lines).tokenize()?;
    check_balanced(&tokens, &lines)?;
    let mut p = Parser {
        toks: tokens,
        pos: 0,
        lines: &lines,
        depth: 0,
    };
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

/// Parses a type such as `Int` or `Qubit[]`.
pub fn parse_type(source: &str) -> Result<Type, Diagnostic> {
    let lines = LineIndex::new(FileId(u32::MAX), source);
    let tokens = Lexer::new(source, 0, &lines).tokenize()?;
    let mut p = Parser {
        toks: tokens,
        pos: 0,
        lines: &lines,
        depth: 0,
    };
    let t = p.ty()?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

fn check_balanced(tokens: &[Token], lines: &LineIndex) -> Result<(), Diagnostic> {
    let mut stack: Vec<&Token> = Vec::new();
    for t in tokens {
        let closer = match t.tok {
            Tok::LParen | Tok::LBrace | Tok::LBracket => {
                stack.push(t);
                continue;
            }
            Tok::RParen => Tok::LParen,
            Tok::RBrace => Tok::LBrace,
            Tok::RBracket => Tok::LBracket,
            _ => continue,
        };
        match stack.pop() {
            Some(open) if open.tok == closer => {}
            Some(open) => {
                return Err(Diagnostic::error(
                    Code::Unbalanced,
                    lines.span(t.lo, t.hi),
                    format!(
                        "mismatched {}; {} opened at line {} is still open",
                        describe(&t.tok),
                        describe(&open.tok),
                        lines.line_col(open.lo).line
                    ),
                ))
            }
            None => {
                return Err(Diagnostic::error(
                    Code::Unbalanced,
                    lines.span(t.lo, t.hi),
                    format!("unmatched {}", describe(&t.tok)),
                ))
            }
        }
    }
    if let Some(open) = stack.pop() {
        return Err(Diagnostic::error(
            Code::Unbalanced,
            lines.span(open.lo, open.hi),
            format!("unclosed {}", describe(&open.tok)),
        ));
    }
    Ok(())
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Int(v) => format!("integer `{v}`"),
        Tok::Double(v) => format!("double `{v}`"),
        Tok::Str(_) | Tok::Interp { .. } => "string literal".into(),
        Tok::Kw(k) => format!("keyword `{}`", format!("{k:?}").to_lowercase()),
        Tok::Eof => "end of file".into(),
        other => format!("`{}`", punct(other)),
    }
}

fn punct(t: &Tok) -> &'static str {
    match t {
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::Comma => ",",
        Tok::Semi => ";",
        Tok::Colon => ":",
        Tok::Assign => "=",
        Tok::EqEq => "==",
        Tok::Ne => "!=",
        Tok::Lt => "<",
        Tok::Le => "<=",
        Tok::Gt => ">",
        Tok::Ge => ">=",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        Tok::Percent => "%",
        Tok::DotDot => "..",
        _ => "?",
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    lines: &'a LineIndex,
    depth: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn cur_span(&self) -> Span {
        let t = &self.toks[self.pos];
        self.lines.span(t.lo, t.hi)
    }

    fn prev_hi(&self) -> u32 {
        self.toks[self.pos.saturating_sub(1)].hi
    }

    fn span_from(&self, lo: u32) -> Span {
        self.lines.span(lo, self.prev_hi().max(lo))
    }

    fn lo(&self) -> u32 {
        self.toks[self.pos].lo
    }

    /// Whether an empty line separates the current token, or its first
    /// comment, from the previous token.
    fn blank_line_before(&self) -> bool {
        let Some(prev) = self.pos.checked_sub(1).map(|i| &self.toks[i]) else {
            return false;
        };
        let cur = &self.toks[self.pos];
        let start = cur.comments.first().map_or(cur.lo, |c| c.1);
        self.lines.line_col(start).line > self.lines.line_col(prev.hi).line + 1
    }

    fn take_comments(&mut self) -> Vec<Comment> {
        std::mem::take(&mut self.toks[self.pos].comments)
            .into_iter()
            .map(|(text, lo, hi)| Comment {
                text,
                span: self.lines.span(lo, hi),
            })
            .collect()
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let tok = self.peek();
        if let Tok::Ident(name) = tok {
            if UNSUPPORTED_WORDS.contains(&name.as_str()) {
                return Diagnostic::error(
                    Code::Unsupported,
                    self.cur_span(),
                    format!("`{name}` is not part of the supported Q# subset"),
                );
            }
        }
        Diagnostic::error(
            Code::Syntax,
            self.cur_span(),
            format!("expected {expected}, found {}", describe(tok)),
        )
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<Token> {
        if *self.peek() == t {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&describe(&t)))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                if UNSUPPORTED_WORDS.contains(&name.as_str()) {
                    return Err(self.unexpected("identifier"));
                }
                let span = self.cur_span();
                self.bump();
                Ok(Ident { name, span })
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn simple_ident(&mut self) -> PResult<Ident> {
        let id = self.ident()?;
        if id.name.contains('.') {
            return Err(Diagnostic::error(
                Code::Syntax,
                id.span,
                format!("expected a simple name, found `{}`", id.name),
            ));
        }
        Ok(id)
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Diagnostic::error(
                Code::Syntax,
                self.cur_span(),
                "nesting too deep",
            ));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn program(&mut self) -> PResult<Program> {
        let mut namespaces = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Kw(Kw::Namespace) => namespaces.push(self.namespace()?),
                _ => return Err(self.unexpected("`namespace`")),
            }
        }
        let trailing_comments = self.take_comments();
        Ok(Program {
            namespaces,
            trailing_comments,
        })
    }

    fn namespace(&mut self) -> PResult<Namespace> {
        let comments = self.take_comments();
        let lo = self.lo();
        self.expect(Tok::Kw(Kw::Namespace))?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut opens = Vec::new();
        let mut callables = Vec::new();
        loop {
            match self.peek() {
                Tok::Kw(Kw::Open) => {
                    self.bump();
                    opens.push(self.ident()?);
                    self.expect(Tok::Semi)?;
                }
                Tok::Kw(Kw::Operation) | Tok::Kw(Kw::Function) => {
                    callables.push(self.callable()?);
                }
                Tok::RBrace => break,
                _ => return Err(self.unexpected("`open`, `operation`, `function` or `}`")),
            }
        }
        let trailing_comments = self.take_comments();
        self.expect(Tok::RBrace)?;
        Ok(Namespace {
            name,
            opens,
            callables,
            comments,
            trailing_comments,
            span: self.span_from(lo),
        })
    }

    fn callable(&mut self) -> PResult<Callable> {
        let comments = self.take_comments();
        let lo = self.lo();
        let kind = match self.bump().tok {
            Tok::Kw(Kw::Operation) => CallableKind::Operation,
            _ => CallableKind::Function,
        };
        let name = self.simple_ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let pname = self.simple_ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                params.push(Param { name: pname, ty });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Colon)?;
        let return_type = self.ty()?;
        let body = self.block()?;
        Ok(Callable {
            kind,
            name,
            params,
            return_type,
            body,
            comments,
            span: self.span_from(lo),
        })
    }

    fn ty(&mut self) -> PResult<Type> {
        let id = match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.cur_span();
                self.bump();
                Ident { name, span }
            }
            _ => return Err(self.unexpected("type")),
        };
        let mut t = match id.name.as_str() {
            "Unit" => Type::Unit,
            "Int" => Type::Int,
            "Double" => Type::Double,
            "Bool" => Type::Bool,
            "String" => Type::String,
            "Result" => Type::Result,
            "Range" => Type::Range,
            "Qubit" => Type::Qubit,
            other if UNSUPPORTED_WORDS.contains(&other) => {
                return Err(Diagnostic::error(
                    Code::Unsupported,
                    id.span,
                    format!("type `{other}` is not part of the supported Q# subset"),
                ))
            }
            other => {
                return Err(Diagnostic::error(
                    Code::UnknownType,
                    id.span,
                    format!("unknown type `{other}`"),
                ))
            }
        };
        while *self.peek() == Tok::LBracket && *self.peek_at(1) == Tok::RBracket {
            if t == Type::Unit {
                return Err(Diagnostic::error(
                    Code::Syntax,
                    self.cur_span(),
                    "array element type cannot be `Unit`",
                ));
            }
            self.bump();
            self.bump();
            t = Type::array(t);
        }
        Ok(t)
    }

    fn block(&mut self) -> PResult<Block> {
        self.enter()?;
        let lo = self.lo();
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while !matches!(self.peek(), Tok::RBrace | Tok::Eof) {
            stmts.push(self.stmt()?);
        }
        let trailing_comments = self.take_comments();
        self.expect(Tok::RBrace)?;
        self.leave();
        Ok(Block {
            stmts,
            trailing_comments,
            span: self.span_from(lo),
        })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let blank_before = self.blank_line_before();
        let comments = self.take_comments();
        let lo = self.lo();
        let kind = match self.peek().clone() {
            Tok::Kw(kw @ (Kw::Let | Kw::Mutable | Kw::Set)) => {
                self.bump();
                let name = self.simple_ident()?;
                self.expect(Tok::Assign)?;
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                match kw {
                    Kw::Let => StmtKind::Let { name, value },
                    Kw::Mutable => StmtKind::Mutable { name, value },
                    _ => StmtKind::Set { name, value },
                }
            }
            Tok::Kw(Kw::Using) => {
                self.bump();
                self.expect(Tok::LParen)?;
                let binding = self.simple_ident()?;
                self.expect(Tok::Assign)?;
                match self.peek() {
                    Tok::Ident(q) if q == "Qubit" => {
                        self.bump();
                    }
                    _ => return Err(self.unexpected("`Qubit()` or `Qubit[n]`")),
                }
                let alloc = if self.eat(&Tok::LParen) {
                    self.expect(Tok::RParen)?;
                    QubitAlloc::Single
                } else if self.eat(&Tok::LBracket) {
                    let n = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    QubitAlloc::Array(n)
                } else {
                    return Err(self.unexpected("`()` or `[n]`"));
                };
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                StmtKind::Using {
                    binding,
                    alloc,
                    body,
                }
            }
            Tok::Kw(Kw::For) => {
                self.bump();
                self.expect(Tok::LParen)?;
                let var = self.simple_ident()?;
                self.expect(Tok::Kw(Kw::In))?;
                let range = self.expr()?;
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                StmtKind::For { var, range, body }
            }
            Tok::Kw(Kw::If) => {
                self.bump();
                let cond = self.expr()?;
                let then_block = self.block()?;
                let mut elifs = Vec::new();
                let mut else_block = None;
                loop {
                    if self.eat(&Tok::Kw(Kw::Elif)) {
                        let c = self.expr()?;
                        let b = self.block()?;
                        elifs.push((c, b));
                    } else if self.eat(&Tok::Kw(Kw::Else)) {
                        else_block = Some(self.block()?);
                        break;
                    } else {
                        break;
                    }
                }
                StmtKind::If {
                    cond,
                    then_block,
                    elifs,
                    else_block,
                }
            }
            Tok::Kw(Kw::Return) => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::Return(e)
            }
            Tok::Ident(ref w) if UNSUPPORTED_WORDS.contains(&w.as_str()) => {
                return Err(self.unexpected("statement"))
            }
            Tok::RBrace | Tok::Eof | Tok::Semi => return Err(self.unexpected("statement")),
            _ => {
                let e = self.expr()?;
                if !matches!(e.kind, ExprKind::Call(..) | ExprKind::Controlled { .. }) {
                    return Err(Diagnostic::error(
                        Code::Syntax,
                        e.span,
                        "only call expressions can be used as statements",
                    ));
                }
                self.expect(Tok::Semi)?;
                StmtKind::Call(e)
            }
        };
        Ok(Stmt {
            kind,
            comments,
            blank_before,
            span: self.span_from(lo),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let lo = self.lo();
        let lhs = self.binary(0)?;
        let e = if self.eat(&Tok::DotDot) {
            let rhs = self.binary(0)?;
            Expr {
                kind: ExprKind::Range(Box::new(lhs), Box::new(rhs)),
                span: self.span_from(lo),
            }
        } else {
            lhs
        };
        self.leave();
        Ok(e)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Kw(Kw::Or) => BinOp::Or,
            Tok::Kw(Kw::And) => BinOp::And,
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Percent => BinOp::Mod,
            _ => return None,
        })
    }

    /// Precedence climbing; all binary operators are left-associative.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let lo = self.lo();
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            self.enter()?;
            let rhs = self.binary(prec + 1)?;
            self.leave();
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                span: self.span_from(lo),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let lo = self.lo();
        let op = match self.peek() {
            Tok::Minus => UnOp::Neg,
            Tok::Kw(Kw::Not) => UnOp::Not,
            _ => return self.postfix(),
        };
        self.bump();
        self.enter()?;
        let inner = self.unary()?;
        self.leave();
        let span = self.span_from(lo);
        // `-5` is a negative literal, never `Neg(5)`
        let kind = match (op, &inner.kind) {
            (UnOp::Neg, ExprKind::Int(v)) => ExprKind::Int(v.wrapping_neg()),
            (UnOp::Neg, ExprKind::Double(v)) => ExprKind::Double(-v),
            _ => ExprKind::Unary(op, Box::new(inner)),
        };
        Ok(Expr { kind, span })
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let lo = self.lo();
        let mut e = self.primary()?;
        loop {
            match self.peek() {
                Tok::LParen => {
                    let args = self.args()?;
                    e = Expr {
                        kind: ExprKind::Call(Box::new(e), args),
                        span: self.span_from(lo),
                    };
                }
                Tok::LBracket => {
                    self.bump();
                    let idx = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    let kind = if matches!(idx.kind, ExprKind::Range(..)) {
                        ExprKind::Slice(Box::new(e), Box::new(idx))
                    } else {
                        ExprKind::Index(Box::new(e), Box::new(idx))
                    };
                    e = Expr {
                        kind,
                        span: self.span_from(lo),
                    };
                }
                _ => return Ok(e),
            }
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.expr()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let lo = self.lo();
        let span = self.cur_span();
        let kind = match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                ExprKind::Int(v)
            }
            Tok::Double(v) => {
                self.bump();
                ExprKind::Double(v)
            }
            Tok::Str(s) => {
                self.bump();
                ExprKind::Str(s)
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                ExprKind::Bool(true)
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                ExprKind::Bool(false)
            }
            Tok::Kw(Kw::Zero) => {
                self.bump();
                ExprKind::ResultLit(false)
            }
            Tok::Kw(Kw::One) => {
                self.bump();
                ExprKind::ResultLit(true)
            }
            Tok::Ident(_) => {
                let id = self.ident()?;
                return Ok(Expr {
                    kind: ExprKind::Name(id.name),
                    span: id.span,
                });
            }
            Tok::Interp { raw, base } => {
                self.bump();
                ExprKind::Interp(self.interp_parts(&raw, base)?)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(e);
            }
            Tok::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if *self.peek() != Tok::RBracket {
                    loop {
                        items.push(self.expr()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket)?;
                ExprKind::Array(items)
            }
            Tok::Kw(Kw::Controlled) => {
                self.bump();
                let gate = self.simple_ident()?;
                if gate.name != "X" {
                    return Err(Diagnostic::error(
                        Code::Unsupported,
                        gate.span,
                        format!(
                            "`Controlled {}` is not supported; only `Controlled X` is",
                            gate.name
                        ),
                    ));
                }
                let mut args = self.args()?;
                if args.is_empty() {
                    return Err(Diagnostic::error(
                        Code::Syntax,
                        self.span_from(lo),
                        "`Controlled X` needs a control array argument",
                    ));
                }
                let controls = args.remove(0);
                ExprKind::Controlled {
                    gate: gate.name,
                    controls: Box::new(controls),
                    args,
                }
            }
            _ => return Err(self.unexpected("expression")),
        };
        let span = if self.prev_hi() > span.hi {
            self.span_from(lo)
        } else {
            span
        };
        Ok(Expr { kind, span })
    }

    fn interp_parts(&mut self, raw: &str, base: u32) -> PResult<Vec<InterpPart>> {
        let mut parts = Vec::new();
        let mut lit = String::new();
        let mut chars = raw.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => {
                    let Some((_, e)) = chars.next() else { break };
                    lit.push(unescape(e).ok_or_else(|| {
                        Diagnostic::error(
                            Code::Syntax,
                            self.lines.span(base + i as u32, base + i as u32 + 2),
                            format!("unknown escape `\\{e}`"),
                        )
                    })?);
                }
                '{' => {
                    let start = i + 1;
                    let mut end = start;
                    for (j, d) in chars.by_ref() {
                        if d == '}' {
                            end = j;
                            break;
                        }
                    }
                    if !lit.is_empty() {
                        parts.push(InterpPart::Lit(std::mem::take(&mut lit)));
                    }
                    let hole = &raw[start..end];
                    let toks = Lexer::new(hole, base + start as u32, self.lines).tokenize()?;
                    check_balanced(&toks, self.lines)?;
                    let mut sub = Parser {
                        toks,
                        pos: 0,
                        lines: self.lines,
                        depth: self.depth,
                    };
                    let e = sub.expr()?;
                    sub.expect(Tok::Eof)?;
                    parts.push(InterpPart::Expr(e));
                }
                '}' => {
                    return Err(Diagnostic::error(
                        Code::Syntax,
                        self.lines.span(base + i as u32, base + i as u32 + 1),
                        "unmatched `}` in interpolated string; write `\\}`",
                    ))
                }
                c => lit.push(c),
            }
        }
        if !lit.is_empty() {
            parts.push(InterpPart::Lit(lit));
        }
        Ok(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str) -> Program {
        parse(src, FileId(0)).unwrap_or_else(|d| panic!("{d:?}"))
    }

    fn err(src: &str) -> Diagnostic {
        parse(src, FileId(0)).unwrap_err().remove(0)
    }

    #[test]
    fn empty_namespace() {
        let prog = p("namespace N {}");
        assert_eq!(prog.namespaces.len(), 1);
        assert!(prog.namespaces[0].callables.is_empty());
    }

    #[test]
    fn missing_expression_points_at_semicolon() {
        let src = "namespace N { operation F() : Unit { let x = ; } }";
        let d = err(src);
        assert_eq!(d.code, Code::Syntax);
        let span = d.span.unwrap();
        assert_eq!(&src[span.lo as usize..span.hi as usize], ";");
    }

    #[test]
    fn unbalanced_and_unknown_type() {
        assert_eq!(err("namespace N { ").code, Code::Unbalanced);
        assert_eq!(err("namespace N { ) }").code, Code::Unbalanced);
        assert_eq!(
            err("namespace N { operation F(x : Foo) : Unit {} }").code,
            Code::UnknownType
        );
    }

    #[test]
    fn unsupported_constructs() {
        assert_eq!(
            err("namespace N { operation F() : Unit { use q = Qubit(); } }").code,
            Code::Unsupported
        );
        assert_eq!(
            err("namespace N { operation F(q : Qubit) : Unit { Controlled H([q], q); } }").code,
            Code::Unsupported
        );
        assert_eq!(
            err("namespace N { operation F() : Unit is Adj {} }").code,
            Code::Unsupported
        );
    }

    #[test]
    fn slices_ranges_and_precedence() {
        let prog = p(
            "namespace N { operation F(qs : Qubit[]) : Unit { Controlled X(qs[0..1], qs[2]); let a = 1 + 2 * 3 - -4; } }",
        );
        let body = &prog.namespaces[0].callables[0].body.stmts;
        match &body[0].kind {
            StmtKind::Call(Expr {
                kind: ExprKind::Controlled { controls, args, .. },
                ..
            }) => {
                assert!(matches!(controls.kind, ExprKind::Slice(..)));
                assert!(matches!(args[0].kind, ExprKind::Index(..)));
            }
            other => panic!("{other:?}"),
        }
        match &body[1].kind {
            StmtKind::Let { value, .. } => match &value.kind {
                ExprKind::Binary(BinOp::Sub, lhs, rhs) => {
                    assert!(matches!(lhs.kind, ExprKind::Binary(BinOp::Add, ..)));
                    assert_eq!(rhs.kind, ExprKind::Int(-4));
                }
                other => panic!("{other:?}"),
            },
            _ => unreachable!(),
        }
    }

    #[test]
    fn interpolation_holes_have_source_spans() {
        let src = "namespace N { function F(r : Int) : Unit { Message($\"a \\{ {r} b\"); } }";
        let prog = p(src);
        let StmtKind::Call(call) = &prog.namespaces[0].callables[0].body.stmts[0].kind else {
            panic!()
        };
        let ExprKind::Call(_, args) = &call.kind else {
            panic!()
        };
        let ExprKind::Interp(parts) = &args[0].kind else {
            panic!()
        };
        assert_eq!(parts[0], InterpPart::Lit("a { ".into()));
        let InterpPart::Expr(e) = &parts[1] else {
            panic!()
        };
        assert_eq!(&src[e.span.lo as usize..e.span.hi as usize], "r");
    }

    #[test]
    fn comments_attach_to_following_statement_and_block_end() {
        let prog =
            p("namespace N { operation F(q : Qubit) : Unit {\n // a\n H(q);\n // tail\n } }");
        let body = &prog.namespaces[0].callables[0].body;
        assert_eq!(body.stmts[0].comments[0].text, " a");
        assert_eq!(body.trailing_comments[0].text, " tail");
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = format!(
            "namespace N {{ function F() : Int {{ return {}1{}; }} }}",
            "(".repeat(5000),
            ")".repeat(5000)
        );
        assert_eq!(err(&src).code, Code::Syntax);
    }
}
