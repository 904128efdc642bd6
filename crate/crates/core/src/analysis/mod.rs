//! Name resolution, static quantum-safety checks, statement indexing and
//! program dependence graphs.

pub mod calls;
pub mod dups;
pub mod index;
pub mod pdg;
pub mod qubits;
pub mod resolve;
pub mod safety;
pub mod symbols;
pub mod unused;

pub use dups::{find_duplicates, DupPair};
pub use index::{index_statements, Path, StatementIndex};
pub use pdg::{build_pdg, EdgeKind, Pdg};
pub use resolve::{resolve, resolve_partial};
pub use safety::check_quantum_safety;
pub use symbols::{CallableLoc, Symbol, SymbolId, SymbolKind, SymbolTable};
pub use unused::{entry_points, find_unused};

use crate::diagnostic::Diagnostic;
use crate::syntax::ast::Program;

/// Resolves `program` and runs the safety checks.
pub fn analyze(program: &Program) -> Result<SymbolTable, Vec<Diagnostic>> {
    let table = resolve(program)?;
    let diags = check_quantum_safety(program, &table);
    if diags.is_empty() {
        Ok(table)
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostic::Code;
    use crate::syntax::{parse, FileId};

    const FIG1: &str = include_str!("../../tests/corpus/figure1.qs");
    const FIG2: &str = include_str!("../../tests/corpus/figure2_before.qs");
    const FIG1_LITERAL: &str = include_str!("../../tests/paper_literal/figure1.qs");
    const FIG2_LITERAL: &str = include_str!("../../tests/paper_literal/figure2_before.qs");

    #[test]
    fn figure2_resolves_to_the_parameter() {
        let p = parse(FIG2, FileId(0)).unwrap();
        let t = analyze(&p).unwrap();
        let loc = p
            .find_callable("MyNamespace.PerformQuantumSimulation")
            .unwrap();
        let param = t
            .locals_of(loc)
            .find(|s| s.name == "qubits")
            .expect("parameter");
        assert_eq!(param.kind, SymbolKind::Parameter);
        assert!(t.use_count(param.id) >= 5);
    }

    #[test]
    fn figure2_pdg() {
        let p = parse(FIG2, FileId(0)).unwrap();
        let t = analyze(&p).unwrap();
        let loc = p
            .find_callable("MyNamespace.PerformQuantumSimulation")
            .unwrap();
        let g = build_pdg(&p, &t, loc);
        assert_eq!(g.nodes.len(), 9);
        let f = g.node_at(&Path(vec![0])).unwrap().id;
        for k in 0..7 {
            let n = g.node_at(&Path(vec![0, k])).unwrap().id;
            assert!(g.has_edge(f, n, EdgeKind::Control));
        }
        let m = g.node_at(&Path(vec![0, 4])).unwrap().id;
        let r = g.node_at(&Path(vec![0, 5])).unwrap().id;
        let msg = g.node_at(&Path(vec![0, 6])).unwrap().id;
        assert!(g.has_edge(m, r, EdgeKind::Data));
        assert!(g.has_edge(r, msg, EdgeKind::Data));
        assert!(g.has_edge(f, msg, EdgeKind::Data));
    }

    #[test]
    fn figure1_index_and_unused() {
        let p = parse(FIG1, FileId(0)).unwrap();
        let t = analyze(&p).unwrap();
        assert!(find_unused(&p, &t).is_empty());
        let idx = index_statements(&p);
        let hello = "MyNamespace.HelloWorld";
        let using = idx.get(hello, &Path(vec![1])).unwrap();
        assert!(FIG1[using.span.lo as usize..].starts_with("using (qubit"));
        let h = idx.get(hello, &Path(vec![1, 0])).unwrap();
        assert!(FIG1[h.span.lo as usize..].starts_with("H(qubit)"));
    }

    #[test]
    fn paper_literal_fixtures_are_flagged() {
        let p = parse(FIG1_LITERAL, FileId(0)).unwrap();
        let codes: Vec<Code> = resolve(&p)
            .unwrap_err()
            .into_iter()
            .map(|d| d.code)
            .collect();
        assert!(codes.contains(&Code::QubitEscape), "{codes:?}");
        let p = parse(FIG2_LITERAL, FileId(0)).unwrap();
        let codes: Vec<Code> = analyze(&p)
            .unwrap_err()
            .into_iter()
            .map(|d| d.code)
            .collect();
        assert!(codes.contains(&Code::OverlapControl), "{codes:?}");
    }
}
