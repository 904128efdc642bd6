//! Duplicated statement sequences within one callable.

use std::collections::HashMap;

use serde::Serialize;

use crate::syntax::ast::*;
use crate::syntax::printer;
use crate::syntax::visit::{self, VisitMut};

use super::index::Path;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DupPair {
    /// First statement of the earlier sequence.
    pub a: Path,
    /// First statement of the later sequence.
    pub b: Path,
    pub len: usize,
}

pub const DEFAULT_MIN_LEN: usize = 3;

/// Text of `stmts` with comments dropped and every variable declared inside
/// the sequence renamed to a positional name, so alpha-equivalent sequences
/// compare equal.
pub fn canonical(stmts: &[Stmt]) -> String {
    struct Canon {
        map: HashMap<String, String>,
    }
    impl Canon {
        fn declare(&mut self, id: &mut Ident) {
            let fresh = format!("%{}", self.map.len());
            self.map.insert(id.name.clone(), fresh.clone());
            id.name = fresh;
        }
    }
    impl VisitMut for Canon {
        fn visit_comments(&mut self, c: &mut Vec<Comment>) {
            c.clear();
        }
        fn visit_stmt(&mut self, s: &mut Stmt) {
            s.comments.clear();
            s.blank_before = false;
            match &mut s.kind {
                StmtKind::Let { name, value } | StmtKind::Mutable { name, value } => {
                    self.visit_expr(value);
                    self.declare(name);
                }
                StmtKind::Set { name, value } => {
                    self.visit_expr(value);
                    if let Some(n) = self.map.get(&name.name) {
                        name.name = n.clone();
                    }
                }
                StmtKind::Using {
                    binding,
                    alloc,
                    body,
                } => {
                    if let QubitAlloc::Array(n) = alloc {
                        self.visit_expr(n);
                    }
                    self.declare(binding);
                    self.visit_block(body);
                }
                StmtKind::For { var, range, body } => {
                    self.visit_expr(range);
                    self.declare(var);
                    self.visit_block(body);
                }
                _ => visit::walk_stmt_mut(self, s),
            }
        }
        fn visit_expr(&mut self, e: &mut Expr) {
            if let ExprKind::Name(n) = &mut e.kind {
                if let Some(m) = self.map.get(n.as_str()) {
                    *n = m.clone();
                }
            }
            visit::walk_expr_mut(self, e);
        }
    }
    let mut block = Block::new(stmts.to_vec());
    Canon {
        map: HashMap::new(),
    }
    .visit_block(&mut block);
    printer::stmts(&block.stmts)
}

/// Every block of `body` with the path of its first slot.
fn blocks(body: &Block) -> Vec<(Vec<Path>, &[Stmt])> {
    fn go<'a>(b: &'a Block, paths: Vec<Path>, out: &mut Vec<(Vec<Path>, &'a [Stmt])>) {
        out.push((paths.clone(), &b.stmts));
        for (s, p) in b.stmts.iter().zip(&paths) {
            let mut ordinal = 0;
            for inner in s.blocks() {
                let ps = (0..inner.stmts.len())
                    .map(|k| p.child(ordinal + k))
                    .collect();
                ordinal += inner.stmts.len();
                go(inner, ps, out);
            }
        }
    }
    let mut out = Vec::new();
    let paths = (0..body.stmts.len()).map(|i| Path(vec![i])).collect();
    go(body, paths, &mut out);
    out
}

fn overlaps(a: &[Path], b: &[Path]) -> bool {
    a.iter()
        .any(|x| b.iter().any(|y| x.is_prefix_of(y) || y.is_prefix_of(x)))
}

/// Maximal pairs of non-overlapping, alpha-equivalent statement sequences
/// of at least `min_len` statements.
pub fn find_duplicates(callable: &Callable, min_len: usize) -> Vec<DupPair> {
    let min_len = min_len.max(1);
    let blocks = blocks(&callable.body);
    let matches = |x: usize, i: usize, y: usize, j: usize, len: usize| -> bool {
        let (pa, sa) = &blocks[x];
        let (pb, sb) = &blocks[y];
        i + len <= sa.len()
            && j + len <= sb.len()
            && !overlaps(&pa[i..i + len], &pb[j..j + len])
            && canonical(&sa[i..i + len]) == canonical(&sb[j..j + len])
    };
    let mut out = Vec::new();
    for x in 0..blocks.len() {
        for y in x..blocks.len() {
            for i in 0..blocks[x].1.len() {
                let j0 = if x == y { i + 1 } else { 0 };
                for j in j0..blocks[y].1.len() {
                    let mut len = 0;
                    while matches(x, i, y, j, len + 1) {
                        len += 1;
                    }
                    if len < min_len {
                        continue;
                    }
                    if i > 0 && j > 0 && matches(x, i - 1, y, j - 1, len + 1) {
                        continue;
                    }
                    out.push(DupPair {
                        a: blocks[x].0[i].clone(),
                        b: blocks[y].0[j].clone(),
                        len,
                    });
                }
            }
        }
    }
    out.sort_by(|p, q| (&p.a, &p.b).cmp(&(&q.a, &q.b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, FileId};

    fn dups(body: &str, min: usize) -> Vec<DupPair> {
        let src = format!("namespace N {{ operation F(q : Qubit) : Unit {{ {body} }} }}");
        let p = parse(&src, FileId(0)).unwrap();
        find_duplicates(&p.namespaces[0].callables[0], min)
    }

    #[test]
    fn exact_clone() {
        let d = dups("H(q); X(q); Message(\"m\"); H(q); X(q);", 2);
        assert_eq!(
            d,
            vec![DupPair {
                a: Path(vec![0]),
                b: Path(vec![3]),
                len: 2
            }]
        );
    }

    #[test]
    fn no_repetition() {
        assert!(dups("H(q); X(q); Y(q);", 2).is_empty());
    }

    #[test]
    fn rename_consistent_clone() {
        let body = "let a = M(q); Message($\"{a}\"); H(q); let b = M(q); Message($\"{b}\");";
        let d = dups(body, 2);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].len, 2);
    }

    #[test]
    fn free_names_are_not_renamed() {
        let src = "namespace N { operation F(a : Int, b : Int) : Unit { Message($\"{a}\"); Message(\"x\"); Message($\"{b}\"); Message(\"x\"); } }";
        let p = parse(src, FileId(0)).unwrap();
        assert!(find_duplicates(&p.namespaces[0].callables[0], 2).is_empty());
    }
}
