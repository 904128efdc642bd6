//! Per-callable program dependence graph.
//!
//! Node 0 is the callable entry; statements follow in pre-order. Data
//! edges carry flow dependences from reaching definitions plus the
//! anti/output dependences on mutable variables and the ordering of
//! message-emitting statements, so that any two sibling statements with no
//! edge between their subtrees commute.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write;

use serde::Serialize;

use crate::builtins::Builtin;
use crate::syntax::ast::*;
use crate::syntax::printer;
use crate::syntax::span::Span;

use super::calls::{builtin_callee, emitters, user_callee};
use super::index::Path;
use super::qubits::{may_conflict, qubit_refs, QubitRef};
use super::symbols::{CallableLoc, SymbolId, SymbolKind, SymbolTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Control,
    Data,
    Qubit,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Control => "control",
            EdgeKind::Data => "data",
            EdgeKind::Qubit => "qubit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    /// Variable, qubit reference or `trace` that induces the edge.
    pub label: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Entry,
    Simple,
    For,
    If { has_else: bool },
    Using,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub id: usize,
    /// `None` for the entry node.
    pub path: Option<Path>,
    pub text: String,
    pub span: Span,
    pub parent: Option<usize>,
    /// Ids in `id..subtree_end` are this node and its descendants.
    pub subtree_end: usize,
    pub defs: Vec<SymbolId>,
    pub uses: Vec<SymbolId>,
    pub qubits: Vec<QubitRef>,
    pub trace: bool,
    pub returns: bool,
    shape: Shape,
    blocks: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Pdg {
    pub callable: String,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

/// Why two statements may not be swapped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocking {
    pub kind: EdgeKind,
    pub from: usize,
    pub to: usize,
    pub label: String,
}

pub fn build_pdg(program: &Program, symbols: &SymbolTable, loc: CallableLoc) -> Pdg {
    let emit = emitters(program, symbols);
    let c = program.callable(loc);
    let mut b = Builder {
        symbols,
        emit: &emit,
        nodes: Vec::new(),
    };
    let params: Vec<String> = c
        .params
        .iter()
        .map(|p| format!("{} : {}", p.name.name, p.ty))
        .collect();
    b.nodes.push(Node {
        id: 0,
        path: None,
        text: format!(
            "{} {}({}) : {}",
            c.kind.keyword(),
            c.name.name,
            params.join(", "),
            c.return_type
        ),
        span: c.name.span,
        parent: None,
        subtree_end: 0,
        defs: Vec::new(),
        uses: Vec::new(),
        qubits: Vec::new(),
        trace: false,
        returns: false,
        shape: Shape::Entry,
        blocks: Vec::new(),
    });
    let top: Vec<usize> = c
        .body
        .stmts
        .iter()
        .enumerate()
        .map(|(i, s)| b.add(s, Path(vec![i]), 0))
        .collect();
    b.nodes[0].blocks = vec![top];
    b.nodes[0].subtree_end = b.nodes.len();

    let mut edges = BTreeSet::new();
    for n in &b.nodes {
        for blk in &n.blocks {
            for &ch in blk {
                edges.insert(Edge {
                    from: n.id,
                    to: ch,
                    kind: EdgeKind::Control,
                    label: String::new(),
                });
            }
        }
    }
    let top = b.nodes[0].blocks[0].clone();
    b.rd_seq(&top, Env::new(), &mut edges);
    b.pairwise(&mut edges);

    let ns = &program.namespaces[loc.0];
    Pdg {
        callable: format!("{}.{}", ns.name.name, c.name.name),
        nodes: b.nodes,
        edges: edges.into_iter().collect(),
    }
}

type Env = BTreeMap<SymbolId, BTreeSet<usize>>;

fn union(mut a: Env, b: &Env) -> Env {
    for (k, v) in b {
        a.entry(*k).or_default().extend(v.iter().copied());
    }
    a
}

struct Builder<'a> {
    symbols: &'a SymbolTable,
    emit: &'a HashSet<CallableLoc>,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn add(&mut self, s: &Stmt, path: Path, parent: usize) -> usize {
        let id = self.nodes.len();
        let shape = match &s.kind {
            StmtKind::For { .. } => Shape::For,
            StmtKind::Using { .. } => Shape::Using,
            StmtKind::If { else_block, .. } => Shape::If {
                has_else: else_block.is_some(),
            },
            _ => Shape::Simple,
        };
        let mut defs = Vec::new();
        match &s.kind {
            StmtKind::Let { name, .. }
            | StmtKind::Mutable { name, .. }
            | StmtKind::Set { name, .. }
            | StmtKind::For { var: name, .. } => {
                if let Some(id) = self.symbols.symbol_at(&name.span) {
                    defs.push(id);
                }
            }
            _ => {}
        }
        let mut uses = BTreeSet::new();
        let mut qubits = Vec::new();
        let mut trace = false;
        for e in s.header_exprs() {
            qubit_refs(e, self.symbols, &mut qubits);
            e.walk(&mut |x| {
                if let ExprKind::Name(_) = x.kind {
                    if let Some(sid) = self.symbols.symbol_at(&x.span) {
                        let sym = self.symbols.symbol(sid);
                        if sym.kind != SymbolKind::Callable && !sym.ty.is_quantum() {
                            uses.insert(sid);
                        }
                    }
                }
                if builtin_callee(x, self.symbols) == Some(Builtin::Message) {
                    trace = true;
                }
                if let Some(c) = user_callee(x, self.symbols) {
                    trace |= self.emit.contains(&c);
                }
            });
        }
        self.nodes.push(Node {
            id,
            text: printer::stmt_header(s),
            path: Some(path.clone()),
            span: s.span,
            parent: Some(parent),
            subtree_end: id + 1,
            defs,
            uses: uses.into_iter().collect(),
            qubits,
            trace,
            returns: matches!(s.kind, StmtKind::Return(_)),
            shape,
            blocks: Vec::new(),
        });
        let mut blocks = Vec::new();
        let mut ordinal = 0;
        for blk in s.blocks() {
            let mut ids = Vec::new();
            for st in &blk.stmts {
                ids.push(self.add(st, path.child(ordinal), id));
                ordinal += 1;
            }
            blocks.push(ids);
        }
        self.nodes[id].blocks = blocks;
        self.nodes[id].subtree_end = self.nodes.len();
        id
    }

    fn name(&self, id: SymbolId) -> String {
        self.symbols.symbol(id).name.clone()
    }

    fn rd_seq(&self, ids: &[usize], mut env: Env, edges: &mut BTreeSet<Edge>) -> Env {
        for &id in ids {
            env = self.rd_node(id, env, edges);
        }
        env
    }

    fn rd_node(&self, id: usize, mut env: Env, edges: &mut BTreeSet<Edge>) -> Env {
        let n = &self.nodes[id];
        for u in &n.uses {
            for &d in env.get(u).into_iter().flatten() {
                if d != id {
                    edges.insert(Edge {
                        from: d,
                        to: id,
                        kind: EdgeKind::Data,
                        label: self.name(*u),
                    });
                }
            }
        }
        let gen = |mut env: Env| {
            for d in &n.defs {
                env.insert(*d, BTreeSet::from([id]));
            }
            env
        };
        match n.shape {
            Shape::For => {
                let entry = gen(env);
                let mut head = entry.clone();
                loop {
                    let out = self.rd_seq(&n.blocks[0], head.clone(), edges);
                    let next = union(entry.clone(), &out);
                    if next == head {
                        return next;
                    }
                    head = next;
                }
            }
            Shape::If { has_else } => {
                let mut acc = if has_else { Env::new() } else { env.clone() };
                for b in &n.blocks {
                    let out = self.rd_seq(b, env.clone(), edges);
                    acc = union(acc, &out);
                }
                acc
            }
            Shape::Using => self.rd_seq(&n.blocks[0], env, edges),
            Shape::Simple | Shape::Entry => {
                env = gen(env);
                env
            }
        }
    }

    fn pairwise(&self, edges: &mut BTreeSet<Edge>) {
        for i in 1..self.nodes.len() {
            for j in i + 1..self.nodes.len() {
                let (a, b) = (&self.nodes[i], &self.nodes[j]);
                for ra in &a.qubits {
                    if let Some(rb) = b.qubits.iter().find(|rb| may_conflict(ra, rb)) {
                        edges.insert(Edge {
                            from: i,
                            to: j,
                            kind: EdgeKind::Qubit,
                            label: format!("{} / {}", ra.text, rb.text),
                        });
                        break;
                    }
                }
                if a.trace && b.trace {
                    edges.insert(Edge {
                        from: i,
                        to: j,
                        kind: EdgeKind::Data,
                        label: "trace".into(),
                    });
                }
                if let Some(v) = a.uses.iter().find(|u| b.defs.contains(u)) {
                    edges.insert(Edge {
                        from: i,
                        to: j,
                        kind: EdgeKind::Data,
                        label: format!("{} (anti)", self.name(*v)),
                    });
                }
                if let Some(v) = a.defs.iter().find(|d| b.defs.contains(d)) {
                    edges.insert(Edge {
                        from: i,
                        to: j,
                        kind: EdgeKind::Data,
                        label: format!("{} (output)", self.name(*v)),
                    });
                }
            }
        }
    }
}

impl Pdg {
    pub fn node_at(&self, path: &Path) -> Option<&Node> {
        self.nodes.iter().find(|n| n.path.as_ref() == Some(path))
    }

    pub fn edges_between(&self, from: usize, to: usize) -> impl Iterator<Item = &Edge> {
        self.edges
            .iter()
            .filter(move |e| e.from == from && e.to == to)
    }

    pub fn has_edge(&self, from: usize, to: usize, kind: EdgeKind) -> bool {
        self.edges_between(from, to).any(|e| e.kind == kind)
    }

    fn in_subtree(&self, root: usize, n: usize) -> bool {
        root <= n && n < self.nodes[root].subtree_end
    }

    /// First non-control edge connecting the subtrees of `a` and `b`.
    fn crossing(&self, a: usize, b: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| {
            e.kind != EdgeKind::Control
                && ((self.in_subtree(a, e.from) && self.in_subtree(b, e.to))
                    || (self.in_subtree(b, e.from) && self.in_subtree(a, e.to)))
        })
    }

    fn contains_return(&self, root: usize) -> bool {
        (root..self.nodes[root].subtree_end).any(|i| self.nodes[i].returns)
    }

    /// Checks that the sibling statements at `a` and `b` can exchange
    /// places: neither they nor any statement between them depends on the
    /// other endpoint.
    pub fn can_swap(&self, a: &Path, b: &Path) -> Result<(), Blocking> {
        let na = self.node_at(a).expect("path inside callable");
        let nb = self.node_at(b).expect("path inside callable");
        let (lo, hi) = if na.id <= nb.id { (na, nb) } else { (nb, na) };
        if lo.id == hi.id {
            return Ok(());
        }
        let parent = lo.parent.expect("statement node");
        let between: Vec<usize> = self.nodes[parent]
            .blocks
            .iter()
            .flatten()
            .copied()
            .filter(|&s| lo.id < s && s < hi.id && self.nodes[s].parent == Some(parent))
            .collect();
        for &s in [lo.id, hi.id].iter().chain(&between) {
            if self.contains_return(s) {
                return Err(Blocking {
                    kind: EdgeKind::Control,
                    from: s,
                    to: s,
                    label: "return".into(),
                });
            }
        }
        let mut pairs = vec![(lo.id, hi.id)];
        for &m in &between {
            pairs.push((lo.id, m));
            pairs.push((m, hi.id));
        }
        for (x, y) in pairs {
            if let Some(e) = self.crossing(x, y) {
                return Err(Blocking {
                    kind: e.kind,
                    from: e.from,
                    to: e.to,
                    label: e.label.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for n in &self.nodes {
            let _ = writeln!(s, "n{} \"{}\"", n.id, escape(&n.text));
        }
        for e in self.dedup_edges() {
            let _ = writeln!(s, "e {} {} {}", e.0, e.1, e.2.as_str());
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = format!("digraph \"{}\" {{\n", escape(&self.callable));
        s.push_str("    node [shape=box];\n");
        for n in &self.nodes {
            let _ = writeln!(s, "    n{} [label=\"{}\"];", n.id, escape(&n.text));
        }
        for (from, to, kind) in self.dedup_edges() {
            let style = match kind {
                EdgeKind::Control => "solid",
                EdgeKind::Data => "dashed",
                EdgeKind::Qubit => "bold",
            };
            let _ = writeln!(
                s,
                "    n{from} -> n{to} [label=\"{}\", style={style}];",
                kind.as_str()
            );
        }
        s.push_str("}\n");
        s
    }

    fn dedup_edges(&self) -> BTreeSet<(usize, usize, EdgeKind)> {
        self.edges.iter().map(|e| (e.from, e.to, e.kind)).collect()
    }

    /// Rendered qubit references touched by the node's own header.
    pub fn touched_qubits(&self, id: usize) -> Vec<&str> {
        self.nodes[id]
            .qubits
            .iter()
            .map(|r| r.text.as_str())
            .collect()
    }

    pub fn child_count(&self, id: usize) -> usize {
        self.nodes[id].blocks.iter().map(Vec::len).sum()
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n")
}
