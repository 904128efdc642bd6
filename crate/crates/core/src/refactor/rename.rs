//! Rename a variable, parameter or callable.

use std::collections::HashMap;

use crate::analysis::SymbolKind;
use crate::diagnostic::Diagnostic;

use super::util::{check_new_name, rename_symbols};
use super::{req_arg, Args, Ctx, Outcome, Target};

pub(crate) fn rename(ctx: &Ctx, target: &Target, args: &Args) -> Result<Outcome, Diagnostic> {
    let id = ctx.symbol(target)?;
    let new = req_arg(args, "name")?;
    let sym = ctx.symbols.symbol(id);
    if sym.name == new {
        return Ok(Outcome {
            program: ctx.program.clone(),
            changes: Vec::new(),
        });
    }
    check_new_name(new)?;
    let mut program = ctx.program.clone();
    rename_symbols(
        &mut program,
        &ctx.symbols,
        &HashMap::from([(id, new.to_owned())]),
    );
    let collision = |why: String| {
        Diagnostic::precondition(format!(
            "renaming `{}` to `{new}` would collide: {why}",
            sym.name
        ))
    };
    let after = Ctx::new(&program).map_err(|d| collision(d.message))?;
    if after.symbols.binding_shape() != ctx.symbols.binding_shape() {
        return Err(collision(
            "another declaration would capture or be captured".into(),
        ));
    }
    let kind = match sym.kind {
        SymbolKind::Callable => "callable",
        SymbolKind::Parameter => "parameter",
        SymbolKind::LoopVar => "loop variable",
        SymbolKind::QubitBinding => "qubit binding",
        SymbolKind::Variable => "variable",
    };
    Ok(Outcome::new(
        program,
        format!("renamed {kind} `{}` to `{new}`", sym.name),
    ))
}

#[cfg(test)]
mod tests {
    use crate::diagnostic::Code;
    use crate::refactor::{apply, Refactoring, RefactoringRequest};
    use crate::syntax::{parse, print, FileId};

    const FIG1: &str = include_str!("../../tests/corpus/figure1.qs");

    fn rename(src: &str, target: &str, name: &str) -> crate::refactor::EditResult {
        let p = parse(src, FileId(0)).unwrap();
        apply(
            &p,
            &RefactoringRequest::new(Refactoring::Rename, target).arg("name", name),
        )
    }

    #[test]
    fn variable_everywhere_in_scope() {
        let r = rename(FIG1, "MyNamespace.HelloWorld::result", "outcome");
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let text = print(&r.program);
        assert!(text.contains("let outcome = M(qubit);"));
        assert!(text.contains("{outcome}"));
        assert!(text.contains("ResultArrayAsInt([outcome])"));
        assert!(!text.contains("result ="));
    }

    #[test]
    fn same_name_is_identity() {
        let p = parse(FIG1, FileId(0)).unwrap();
        let r = rename(FIG1, "MyNamespace.HelloWorld::result", "result");
        assert!(r.is_ok());
        assert_eq!(print(&r.program), print(&p));
    }

    #[test]
    fn collisions_and_builtins() {
        let r = rename(FIG1, "MyNamespace.HelloWorld::result", "entanglementResult");
        assert_eq!(r.diagnostics[0].code, Code::Precondition);
        assert_eq!(print(&r.program), print(&parse(FIG1, FileId(0)).unwrap()));
        let r = rename(FIG1, "MyNamespace.HelloWorld::result", "M");
        assert_eq!(r.diagnostics[0].code, Code::Precondition);
    }

    #[test]
    fn callables_and_parameters() {
        let r = rename(FIG1, "MyNamespace.MultiplyByTwo", "Twice");
        assert!(r.is_ok(), "{:?}", r.diagnostics);
        let text = print(&r.program);
        assert!(text.contains("function Twice(x : Int)"));
        assert!(text.contains("= Twice(ResultArrayAsInt"));
        let r = rename(FIG1, "MyNamespace.MultiplyByTwo::x", "value");
        assert!(print(&r.program).contains("return 2 * value;"));
    }

    #[test]
    fn capture_by_inner_declaration_is_rejected() {
        let src = "namespace N { operation Main() : Unit { let a = 1; if (true) { let b = 2; Message($\"{a}{b}\"); } } }";
        let r = rename(src, "N.Main::a", "b");
        assert_eq!(r.diagnostics[0].code, Code::Precondition);
    }
}
