//! Ordinal statement paths.
//!
//! A path is the sequence of child indices from the callable body. The
//! children of a compound statement are the statements of all its blocks
//! concatenated in source order (then, elifs, else).

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::ast::{Block, Program, Stmt};
use crate::syntax::span::Span;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn parse(s: &str) -> Option<Path> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        s.split(['.', ','])
            .map(|p| p.trim().parse().ok())
            .collect::<Option<Vec<_>>>()
            .filter(|v| !v.is_empty())
            .map(Path)
    }

    pub fn parent(&self) -> &[usize] {
        &self.0[..self.0.len() - 1]
    }

    pub fn last(&self) -> usize {
        *self.0.last().expect("paths are non-empty")
    }

    pub fn with_last(&self, last: usize) -> Path {
        let mut v = self.0.clone();
        *v.last_mut().expect("paths are non-empty") = last;
        Path(v)
    }

    pub fn child(&self, i: usize) -> Path {
        let mut v = self.0.clone();
        v.push(i);
        Path(v)
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl serde::Serialize for Path {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

/// Child statements of `stmt`, tagged with (block index, index in block).
pub fn children(stmt: &Stmt) -> Vec<(usize, usize, &Stmt)> {
    let mut out = Vec::new();
    for (bi, b) in stmt.blocks().into_iter().enumerate() {
        for (si, s) in b.stmts.iter().enumerate() {
            out.push((bi, si, s));
        }
    }
    out
}

/// Maps child ordinal `i` of `stmt` to (block index, index in block).
fn child_slot(stmt: &Stmt, mut i: usize) -> Option<(usize, usize)> {
    for (bi, b) in stmt.blocks().into_iter().enumerate() {
        if i < b.stmts.len() {
            return Some((bi, i));
        }
        i -= b.stmts.len();
    }
    None
}

pub fn stmt_at<'a>(body: &'a Block, path: &Path) -> Option<&'a Stmt> {
    let (block, i) = block_of(body, path)?;
    block.stmts.get(i)
}

/// Block containing the statement at `path`, with its position there.
pub fn block_of<'a>(body: &'a Block, path: &Path) -> Option<(&'a Block, usize)> {
    let (first, rest) = path.0.split_first()?;
    let mut block = body;
    let mut idx = *first;
    for &c in rest {
        let s = block.stmts.get(idx)?;
        let (bi, si) = child_slot(s, c)?;
        block = s.blocks()[bi];
        idx = si;
    }
    (idx < block.stmts.len()).then_some((block, idx))
}

pub fn block_of_mut<'a>(body: &'a mut Block, path: &Path) -> Option<(&'a mut Block, usize)> {
    let (first, rest) = path.0.split_first()?;
    let mut block = body;
    let mut idx = *first;
    for &c in rest {
        let s = block.stmts.get_mut(idx)?;
        let (bi, si) = child_slot(s, c)?;
        block = s.blocks_mut().into_iter().nth(bi)?;
        idx = si;
    }
    (idx < block.stmts.len()).then_some((block, idx))
}

/// Whether two sibling paths live in the same block (not just the same
/// parent statement).
pub fn same_block(body: &Block, a: &Path, b: &Path) -> bool {
    if a.parent() != b.parent() {
        return false;
    }
    match (block_of(body, a), block_of(body, b)) {
        (Some((ba, _)), Some((bb, _))) => std::ptr::eq(ba, bb),
        _ => false,
    }
}

/// All statement paths of `body` in pre-order.
pub fn all_paths(body: &Block) -> Vec<(Path, &Stmt)> {
    fn go<'a>(stmts: Vec<&'a Stmt>, prefix: &Path, out: &mut Vec<(Path, &'a Stmt)>) {
        for (i, s) in stmts.into_iter().enumerate() {
            let p = prefix.child(i);
            out.push((p.clone(), s));
            go(children(s).into_iter().map(|c| c.2).collect(), &p, out);
        }
    }
    let mut out = Vec::new();
    go(body.stmts.iter().collect(), &Path::default(), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct IndexEntry {
    /// Pre-order number within the callable.
    pub id: usize,
    pub span: Span,
}

/// Map from (`Ns.Callable`, path) to statement, for every callable.
#[derive(Clone, Debug, Default)]
pub struct StatementIndex {
    pub entries: BTreeMap<(String, Path), IndexEntry>,
}

impl StatementIndex {
    pub fn get(&self, callable: &str, path: &Path) -> Option<&IndexEntry> {
        self.entries.get(&(callable.to_owned(), path.clone()))
    }

    pub fn paths_of<'a>(&'a self, callable: &'a str) -> impl Iterator<Item = &'a Path> {
        self.entries
            .keys()
            .filter(move |(c, _)| c == callable)
            .map(|(_, p)| p)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn index_statements(program: &Program) -> StatementIndex {
    let mut idx = StatementIndex::default();
    for (ns, c) in program.callables() {
        let name = format!("{}.{}", ns.name.name, c.name.name);
        for (id, (path, s)) in all_paths(&c.body).into_iter().enumerate() {
            idx.entries
                .insert((name.clone(), path), IndexEntry { id, span: s.span });
        }
    }
    idx
}
