//! Static no-cloning and function-purity checks.

use crate::diagnostic::{Code, Diagnostic};
use crate::syntax::ast::*;
use crate::syntax::visit::for_each_stmt;

use super::qubits::{must_overlap, qubit_ref, QubitRef};
use super::symbols::{Resolution, SymbolKind, SymbolTable};

pub fn check_quantum_safety(program: &Program, symbols: &SymbolTable) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (_, c) in program.callables() {
        let is_function = c.kind == CallableKind::Function;
        for_each_stmt(&c.body, &mut |s| {
            if is_function {
                if let StmtKind::Using { .. } = s.kind {
                    out.push(Diagnostic::error(
                        Code::QuantumInFunction,
                        s.span,
                        format!("function `{}` allocates qubits", c.name.name),
                    ));
                }
            }
            for e in s.header_exprs() {
                e.walk(&mut |x| check_expr(x, symbols, is_function, &c.name.name, &mut out));
            }
        });
    }
    out
}

fn check_expr(
    e: &Expr,
    symbols: &SymbolTable,
    in_function: bool,
    fname: &str,
    out: &mut Vec<Diagnostic>,
) {
    match &e.kind {
        ExprKind::Call(callee, args) => {
            let res = symbols.resolution(&callee.span);
            let quantum = match res {
                Some(Resolution::Builtin(b)) => b.is_quantum(),
                Some(Resolution::Symbol(id)) => {
                    let sym = symbols.symbol(id);
                    sym.kind == SymbolKind::Callable
                        && symbols.callable_kind(id) == Some(CallableKind::Operation)
                }
                None => false,
            };
            if in_function && quantum {
                out.push(Diagnostic::error(
                    Code::QuantumInFunction,
                    e.span,
                    format!(
                        "function `{fname}` calls `{}`, which acts on qubits",
                        callee.as_name().unwrap_or("?")
                    ),
                ));
            }
            let checks_args = match res {
                Some(Resolution::Builtin(b)) => b.is_gate(),
                Some(Resolution::Symbol(_)) => true,
                None => false,
            };
            if checks_args {
                let refs: Vec<QubitRef> =
                    args.iter().filter_map(|a| qubit_ref(a, symbols)).collect();
                report_duplicates(&refs, e, out);
            }
        }
        ExprKind::Controlled { controls, args, .. } => {
            if in_function {
                out.push(Diagnostic::error(
                    Code::QuantumInFunction,
                    e.span,
                    format!("function `{fname}` applies a controlled gate"),
                ));
            }
            let ctl: Vec<QubitRef> = match &controls.kind {
                ExprKind::Array(items) => {
                    items.iter().filter_map(|x| qubit_ref(x, symbols)).collect()
                }
                _ => qubit_ref(controls, symbols).into_iter().collect(),
            };
            report_duplicates(&ctl, e, out);
            for t in args.iter().filter_map(|a| qubit_ref(a, symbols)) {
                if let Some(c) = ctl.iter().find(|c| must_overlap(c, &t)) {
                    out.push(Diagnostic::error(
                        Code::OverlapControl,
                        e.span,
                        format!("target `{}` overlaps control `{}`", t.text, c.text),
                    ));
                }
            }
        }
        _ => {}
    }
}

fn report_duplicates(refs: &[QubitRef], e: &Expr, out: &mut Vec<Diagnostic>) {
    for (i, a) in refs.iter().enumerate() {
        if let Some(b) = refs[i + 1..].iter().find(|b| must_overlap(a, b)) {
            out.push(Diagnostic::error(
                Code::DuplicateQubit,
                e.span,
                format!("`{}` and `{}` denote the same qubit", a.text, b.text),
            ));
            return;
        }
    }
}
