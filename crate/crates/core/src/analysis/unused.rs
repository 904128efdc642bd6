//! Unused-symbol detection.

use crate::syntax::ast::{CallableKind, Program};

use super::symbols::{CallableLoc, SymbolId, SymbolKind, SymbolTable};

/// Entry points: every callable named `Main`; when the program has none,
/// every parameterless operation that nothing calls.
pub fn entry_points(program: &Program, symbols: &SymbolTable) -> Vec<CallableLoc> {
    let mains: Vec<CallableLoc> = locs(program)
        .filter(|&l| program.callable(l).name.name == "Main")
        .collect();
    if !mains.is_empty() {
        return mains;
    }
    locs(program)
        .filter(|&l| {
            let c = program.callable(l);
            c.kind == CallableKind::Operation
                && c.params.is_empty()
                && symbols
                    .callable_symbol(l)
                    .is_some_and(|id| symbols.use_count(id) == 0)
        })
        .collect()
}

fn locs(program: &Program) -> impl Iterator<Item = CallableLoc> + '_ {
    program
        .namespaces
        .iter()
        .enumerate()
        .flat_map(|(ni, ns)| (0..ns.callables.len()).map(move |ci| (ni, ci)))
}

/// Variables, parameters and callables that nothing refers to, in
/// declaration order. Loop variables, qubit bindings and entry points are
/// never reported.
pub fn find_unused(program: &Program, symbols: &SymbolTable) -> Vec<SymbolId> {
    let entries = entry_points(program, symbols);
    symbols
        .symbols
        .iter()
        .filter(|s| match s.kind {
            SymbolKind::Variable | SymbolKind::Parameter => true,
            SymbolKind::Callable => !entries.contains(&s.owner),
            SymbolKind::LoopVar | SymbolKind::QubitBinding => false,
        })
        .filter(|s| symbols.use_count(s.id) == 0)
        .map(|s| s.id)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::resolve;
    use crate::syntax::{parse, FileId};

    fn unused(src: &str) -> Vec<String> {
        let p = parse(src, FileId(0)).unwrap();
        let t = resolve(&p).unwrap();
        find_unused(&p, &t)
            .into_iter()
            .map(|id| t.symbol(id).name.clone())
            .collect()
    }

    #[test]
    fn zero_uses() {
        let src =
            "namespace N { operation Main() : Unit { let x = 1; let y = 2; Message($\"{y}\"); } }";
        assert_eq!(unused(src), vec!["x"]);
    }

    #[test]
    fn uncalled_operation() {
        let src = "namespace N { operation Main() : Unit { } operation Helper() : Unit { } }";
        assert_eq!(unused(src), vec!["Helper"]);
    }

    #[test]
    fn parameters_and_loop_vars() {
        let src = "namespace N { operation Main() : Unit { F(1, 2); } operation F(a : Int, b : Int) : Unit { for (i in 1..a) { } } }";
        assert_eq!(unused(src), vec!["b"]);
    }
}
