//! Move callables into a new namespace.

use std::collections::{BTreeMap, BTreeSet};

use crate::analysis::symbols::Role;
use crate::analysis::{SymbolKind, SymbolTable};
use crate::diagnostic::Diagnostic;
use crate::syntax::ast::{Expr, ExprKind, Ident, Namespace, Program};
use crate::syntax::lexer::is_plain_ident;
use crate::syntax::visit::{self, VisitMut};

use super::util::each_expr;
use super::{req_arg, Args, Ctx, Outcome, Target};

/// For every callable, the callables its references resolve to, in order.
/// Names pass through `rename` so moved callables compare equal.
fn call_targets(
    program: &Program,
    symbols: &SymbolTable,
    rename: &BTreeMap<String, String>,
) -> BTreeMap<String, Vec<String>> {
    let map = |q: &str| rename.get(q).cloned().unwrap_or_else(|| q.to_owned());
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (ns, c) in program.callables() {
        let owner = map(&format!("{}.{}", ns.name.name, c.name.name));
        let refs = symbols
            .occurrences
            .iter()
            .filter(|o| o.role != Role::Decl && c.span.contains(&o.span))
            .filter(|o| symbols.symbol(o.symbol).kind == SymbolKind::Callable)
            .map(|o| map(&symbols.symbol(o.symbol).qualified))
            .collect();
        out.insert(owner, refs);
    }
    out
}

pub(crate) fn extract_namespace(
    ctx: &Ctx,
    target: &Target,
    args: &Args,
) -> Result<Outcome, Diagnostic> {
    let locs = ctx.callables(target)?;
    let new_ns = req_arg(args, "namespace")?;
    if locs.is_empty() {
        return Ok(Outcome {
            program: ctx.program.clone(),
            changes: Vec::new(),
        });
    }
    if !new_ns.split('.').all(is_plain_ident) {
        return Err(Diagnostic::precondition(format!(
            "`{new_ns}` is not a valid namespace name"
        )));
    }
    if ctx.program.namespace(new_ns).is_some() {
        return Err(Diagnostic::precondition(format!(
            "namespace `{new_ns}` already exists"
        )));
    }
    let src = locs[0].0;
    if locs.iter().any(|l| l.0 != src) {
        return Err(Diagnostic::precondition(
            "the callables to move must share a namespace",
        ));
    }
    let moved: BTreeSet<usize> = locs.iter().map(|l| l.1).collect();
    let src_name = ctx.program.namespaces[src].name.name.clone();
    let rename: BTreeMap<String, String> = moved
        .iter()
        .map(|&ci| {
            let n = &ctx.program.namespaces[src].callables[ci].name.name;
            (format!("{src_name}.{n}"), format!("{new_ns}.{n}"))
        })
        .collect();

    // namespaces that reference a moved callable without qualification
    let mut needs_open = BTreeSet::new();
    for (ni, ns) in ctx.program.namespaces.iter().enumerate() {
        for c in &ns.callables {
            each_expr(&c.body.stmts, &mut |e| {
                if let ExprKind::Name(n) = &e.kind {
                    if !n.contains('.') {
                        if let Some(id) = ctx.symbols.symbol_at(&e.span) {
                            if rename.contains_key(&ctx.symbols.symbol(id).qualified) {
                                needs_open.insert(ni);
                            }
                        }
                    }
                }
            });
        }
    }

    let mut program = ctx.program.clone();
    struct Q<'a>(&'a BTreeMap<String, String>);
    impl VisitMut for Q<'_> {
        fn visit_expr(&mut self, e: &mut Expr) {
            if let ExprKind::Name(n) = &mut e.kind {
                if let Some(new) = self.0.get(n.as_str()) {
                    *n = new.clone();
                }
            }
            visit::walk_expr_mut(self, e);
        }
    }
    Q(&rename).visit_program(&mut program);
    let src_ns = &mut program.namespaces[src];
    let mut callables = Vec::new();
    for (ci, c) in std::mem::take(&mut src_ns.callables)
        .into_iter()
        .enumerate()
    {
        if moved.contains(&ci) {
            callables.push(c);
        } else {
            src_ns.callables.push(c);
        }
    }
    let mut opens = src_ns.opens.clone();
    if !opens.iter().any(|o| o.name == src_name) {
        opens.push(Ident::new(&src_name));
    }
    for ni in needs_open {
        let ns = &mut program.namespaces[ni];
        if ni != src || !ns.opens.iter().any(|o| o.name == new_ns) {
            ns.opens.push(Ident::new(new_ns));
        }
    }
    program.namespaces.push(Namespace {
        name: Ident::new(new_ns),
        opens,
        callables,
        comments: Vec::new(),
        trailing_comments: Vec::new(),
        span: Default::default(),
    });

    let after = Ctx::new(&program)
        .map_err(|d| Diagnostic::precondition(format!("moving would clash: {}", d.message)))?;
    let identity = BTreeMap::new();
    if call_targets(&ctx.program, &ctx.symbols, &rename)
        != call_targets(&after.program, &after.symbols, &identity)
    {
        return Err(Diagnostic::precondition(
            "moving would change which callable a name refers to",
        ));
    }
    let names: Vec<&str> = rename.keys().map(String::as_str).collect();
    Ok(Outcome::new(
        program,
        format!("moved {} into namespace `{new_ns}`", names.join(", ")),
    ))
}

#[cfg(test)]
mod tests {
    use crate::diagnostic::Code;
    use crate::refactor::{apply, EditResult, Refactoring, RefactoringRequest};
    use crate::syntax::{parse, print, FileId};

    const FIG1: &str = include_str!("../../tests/corpus/figure1.qs");

    fn run(src: &str, target: &str, ns: &str) -> EditResult {
        apply(
            &parse(src, FileId(0)).unwrap(),
            &RefactoringRequest::new(Refactoring::ExtractNamespace, target).arg("namespace", ns),
        )
    }

    #[test]
    fn moving_a_function_opens_the_new_namespace() {
        let r = run(FIG1, "MyNamespace.MultiplyByTwo", "MyNamespace.Math");
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let t = print(&r.program);
        assert!(t.contains("namespace MyNamespace.Math {"), "{t}");
        assert!(t.contains("open MyNamespace.Math;"), "{t}");
        let p = r.program;
        assert!(p.find_callable("MyNamespace.Math.MultiplyByTwo").is_some());
        assert!(p.find_callable("MyNamespace.MultiplyByTwo").is_none());
    }

    #[test]
    fn nothing_to_move_is_unchanged() {
        let r = run(FIG1, "", "MyNamespace.Math");
        assert!(r.is_ok());
        assert_eq!(print(&r.program), print(&parse(FIG1, FileId(0)).unwrap()));
    }

    #[test]
    fn existing_namespace_and_clashes() {
        let r = run(FIG1, "MyNamespace.MultiplyByTwo", "MyNamespace");
        assert_eq!(r.diagnostics[0].code, Code::Precondition);
        let src = "namespace B { function F() : Int { return 2; } } namespace A { open B; function F() : Int { return 1; } function G() : Int { return F(); } }";
        let r = run(src, "A.G", "C");
        assert_eq!(
            r.diagnostics[0].code,
            Code::Precondition,
            "{}",
            print(&r.program)
        );
    }

    #[test]
    fn moving_main_keeps_it_an_entry_point() {
        let r = run(FIG1, "MyNamespace.HelloWorld", "MyNamespace.App");
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let syms = crate::analysis::analyze(&r.program).unwrap();
        let entries = crate::analysis::entry_points(&r.program, &syms);
        let names: Vec<String> = entries
            .iter()
            .map(|&l| {
                format!(
                    "{}.{}",
                    r.program.namespaces[l.0].name.name,
                    r.program.callable(l).name.name
                )
            })
            .collect();
        assert_eq!(names, ["MyNamespace.App.HelloWorld"]);
    }
}
