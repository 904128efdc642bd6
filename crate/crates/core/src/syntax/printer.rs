//! Canonical pretty-printer.
//!
//! Style: 4-space indentation, one statement per line, one blank line
//! between callables and between namespaces, opens first. Statement,
//! callable, namespace and block-end comments are re-emitted; source
//! whitespace is not preserved. Output always uses LF line endings.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

pub fn print(program: &Program) -> String {
    let mut p = Printer::default();
    for (i, ns) in program.namespaces.iter().enumerate() {
        if i > 0 {
            p.out.push('\n');
        }
        p.namespace(ns);
    }
    p.comments(&program.trailing_comments);
    p.out
}

/// Prints a single statement (header only for compound statements) on
/// one line, for graph labels and change descriptions.
pub fn stmt_header(stmt: &Stmt) -> String {
    match &stmt.kind {
        StmtKind::Using { binding, alloc, .. } => {
            format!("using ({} = {})", binding.name, alloc_text(alloc))
        }
        StmtKind::For { var, range, .. } => format!("for ({} in {})", var.name, expr(range)),
        StmtKind::If { cond, .. } => format!("if ({})", expr(cond)),
        _ => {
            let bare = Stmt {
                comments: Vec::new(),
                blank_before: false,
                ..stmt.clone()
            };
            let mut p = Printer::default();
            p.stmt(&bare);
            p.out.trim().to_owned()
        }
    }
}

pub fn expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

pub fn stmts(list: &[Stmt]) -> String {
    let mut p = Printer::default();
    for s in list {
        p.stmt(s);
    }
    p.out
}

fn alloc_text(alloc: &QubitAlloc) -> String {
    match alloc {
        QubitAlloc::Single => "Qubit()".to_owned(),
        QubitAlloc::Array(n) => format!("Qubit[{}]", expr(n)),
    }
}

#[derive(Default)]
struct Printer {
    out: String,
    level: usize,
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.level {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn comments(&mut self, cs: &[Comment]) {
        for c in cs {
            let text = format!("//{}", c.text);
            self.line(&text);
        }
    }

    fn namespace(&mut self, ns: &Namespace) {
        self.comments(&ns.comments);
        self.line(&format!("namespace {} {{", ns.name.name));
        self.level += 1;
        for o in &ns.opens {
            self.line(&format!("open {};", o.name));
        }
        for (i, c) in ns.callables.iter().enumerate() {
            if i > 0 || !ns.opens.is_empty() {
                self.out.push('\n');
            }
            self.callable(c);
        }
        self.comments(&ns.trailing_comments);
        self.level -= 1;
        self.line("}");
    }

    fn callable(&mut self, c: &Callable) {
        self.comments(&c.comments);
        let params = c
            .params
            .iter()
            .map(|p| format!("{} : {}", p.name.name, p.ty))
            .collect::<Vec<_>>()
            .join(", ");
        self.line(&format!(
            "{} {}({}) : {} {{",
            c.kind.keyword(),
            c.name.name,
            params,
            c.return_type
        ));
        self.block_body(&c.body);
        self.line("}");
    }

    fn block_body(&mut self, b: &Block) {
        self.level += 1;
        for (i, s) in b.stmts.iter().enumerate() {
            if i > 0 && s.blank_before {
                self.out.push('\n');
            }
            self.stmt(s);
        }
        self.comments(&b.trailing_comments);
        self.level -= 1;
    }

    fn stmt(&mut self, s: &Stmt) {
        self.comments(&s.comments);
        match &s.kind {
            StmtKind::Let { name, value } => {
                self.line(&format!("let {} = {};", name.name, expr(value)))
            }
            StmtKind::Mutable { name, value } => {
                self.line(&format!("mutable {} = {};", name.name, expr(value)))
            }
            StmtKind::Set { name, value } => {
                self.line(&format!("set {} = {};", name.name, expr(value)))
            }
            StmtKind::Using {
                binding,
                alloc,
                body,
            } => {
                self.line(&format!(
                    "using ({} = {}) {{",
                    binding.name,
                    alloc_text(alloc)
                ));
                self.block_body(body);
                self.line("}");
            }
            StmtKind::For { var, range, body } => {
                self.line(&format!("for ({} in {}) {{", var.name, expr(range)));
                self.block_body(body);
                self.line("}");
            }
            StmtKind::If {
                cond,
                then_block,
                elifs,
                else_block,
            } => {
                self.line(&format!("if ({}) {{", expr(cond)));
                self.block_body(then_block);
                for (c, b) in elifs {
                    self.line(&format!("}} elif ({}) {{", expr(c)));
                    self.block_body(b);
                }
                if let Some(b) = else_block {
                    self.line("} else {");
                    self.block_body(b);
                }
                self.line("}");
            }
            StmtKind::Return(e) => self.line(&format!("return {};", expr(e))),
            StmtKind::Call(e) => self.line(&format!("{};", expr(e))),
        }
    }
}

const PREC_RANGE: u8 = 1;
const PREC_UNARY: u8 = 8;
const PREC_POSTFIX: u8 = 9;

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Range(..) => PREC_RANGE,
        ExprKind::Binary(op, ..) => op.precedence(),
        ExprKind::Unary(..) => PREC_UNARY,
        _ => PREC_POSTFIX,
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let paren = prec(e) < min;
    if paren {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Int(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Double(v) => {
            let _ = write!(out, "{v:?}");
        }
        ExprKind::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::ResultLit(b) => out.push_str(if *b { "One" } else { "Zero" }),
        ExprKind::Str(s) => {
            out.push('"');
            escape_into(out, s, false);
            out.push('"');
        }
        ExprKind::Interp(parts) => {
            out.push_str("$\"");
            for p in parts {
                match p {
                    InterpPart::Lit(s) => escape_into(out, s, true),
                    InterpPart::Expr(x) => {
                        out.push('{');
                        write_expr(out, x, 0);
                        out.push('}');
                    }
                }
            }
            out.push('"');
        }
        ExprKind::Name(n) => out.push_str(n),
        ExprKind::Array(items) => {
            out.push('[');
            comma_list(out, items);
            out.push(']');
        }
        ExprKind::Index(base, idx) | ExprKind::Slice(base, idx) => {
            write_expr(out, base, PREC_POSTFIX);
            out.push('[');
            write_expr(out, idx, 0);
            out.push(']');
        }
        ExprKind::Range(lo, hi) => {
            write_expr(out, lo, PREC_RANGE + 1);
            out.push_str("..");
            write_expr(out, hi, PREC_RANGE + 1);
        }
        ExprKind::Binary(op, l, r) => {
            let p = op.precedence();
            write_expr(out, l, p);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, r, p + 1);
        }
        ExprKind::Unary(op, x) => {
            out.push_str(match op {
                UnOp::Neg => "-",
                UnOp::Not => "not ",
            });
            write_expr(out, x, PREC_UNARY);
        }
        ExprKind::Call(callee, args) => {
            write_expr(out, callee, PREC_POSTFIX);
            out.push('(');
            comma_list(out, args);
            out.push(')');
        }
        ExprKind::Controlled {
            gate,
            controls,
            args,
        } => {
            let _ = write!(out, "Controlled {gate}(");
            write_expr(out, controls, 0);
            for a in args {
                out.push_str(", ");
                write_expr(out, a, 0);
            }
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

fn comma_list(out: &mut String, items: &[Expr]) {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, x, 0);
    }
}

fn escape_into(out: &mut String, s: &str, interp: bool) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '{' if interp => out.push_str("\\{"),
            '}' if interp => out.push_str("\\}"),
            c => out.push(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, FileId};

    fn roundtrip(src: &str) -> String {
        let p = parse(src, FileId(0)).unwrap();
        let text = print(&p);
        let q = parse(&text, FileId(1)).unwrap_or_else(|d| panic!("{d:?}\n{text}"));
        assert!(ast_equal(&p, &q), "{text}");
        assert_eq!(print(&q), text);
        text
    }

    #[test]
    fn three_statements_one_level_deeper() {
        let text = roundtrip(
            "namespace N { operation F(q : Qubit) : Unit { H(q); X(q); let r = M(q); } }",
        );
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "    operation F(q : Qubit) : Unit {");
        assert_eq!(lines[2], "        H(q);");
        assert_eq!(lines[3], "        X(q);");
        assert_eq!(lines[4], "        let r = M(q);");
    }

    #[test]
    fn parenthesization_preserves_structure() {
        roundtrip(
            "namespace N { function F(a : Int, b : Int) : Int { let x = (a - (b - 1)) * -(a + 2); let y = not (a > 1 and b < 2) or false; let z = (1 + 2)..(a * 3); let s = \"q\\\"\\n\"; let t = $\"{a + 1} \\{lit\\}\"; return x; } }",
        );
    }

    #[test]
    fn blank_line_between_callables() {
        let text = roundtrip(
            "namespace N { open A.B; function F() : Unit {} operation G() : Unit { if (true) { } elif (false) { } else { } } }",
        );
        assert!(text.contains("open A.B;\n\n    function F() : Unit {\n    }\n\n    operation G()"));
    }
}
