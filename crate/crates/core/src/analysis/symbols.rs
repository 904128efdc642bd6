use std::collections::HashMap;

use serde::Serialize;

use crate::builtins::Builtin;
use crate::syntax::ast::{CallableKind, Type};
use crate::syntax::span::{FileId, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SymbolId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SymbolKind {
    Variable,
    Parameter,
    Callable,
    LoopVar,
    QubitBinding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScopeId(pub u32);

/// Index of a callable: (namespace index, callable index).
pub type CallableLoc = (usize, usize);

#[derive(Clone, Debug)]
pub struct Symbol {
    pub id: SymbolId,
    pub name: String,
    pub kind: SymbolKind,
    pub decl: Span,
    pub ty: Type,
    pub mutable: bool,
    pub scope: ScopeId,
    /// Callable that declares this symbol (for callables: the callable itself).
    pub owner: CallableLoc,
    /// `Ns.Name` for callables, plain name otherwise.
    pub qualified: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolution {
    Symbol(SymbolId),
    Builtin(Builtin),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Decl,
    Use,
    /// Callee position of a call.
    Call,
    /// Target of `set`.
    Assign,
}

#[derive(Clone, Debug)]
pub struct Occurrence {
    pub span: Span,
    pub symbol: SymbolId,
    pub role: Role,
    /// Innermost scope containing the occurrence.
    pub scope: ScopeId,
}

#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub parent: Option<ScopeId>,
    pub names: Vec<(String, SymbolId)>,
}

pub(crate) type SpanKey = (FileId, u32, u32);

pub(crate) fn key(span: &Span) -> SpanKey {
    (span.file, span.lo, span.hi)
}

/// Result of name resolution for one program.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    pub symbols: Vec<Symbol>,
    pub scopes: Vec<Scope>,
    /// Every declaration and reference, in traversal order.
    pub occurrences: Vec<Occurrence>,
    pub(crate) names: HashMap<SpanKey, Resolution>,
    pub(crate) types: HashMap<SpanKey, Type>,
    pub(crate) callables: HashMap<CallableLoc, SymbolId>,
    pub(crate) callable_kinds: HashMap<SymbolId, CallableKind>,
}

impl SymbolTable {
    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.0 as usize]
    }

    /// What the name at `span` (a `Name` expression or a declaring ident)
    /// resolves to.
    pub fn resolution(&self, span: &Span) -> Option<Resolution> {
        self.names.get(&key(span)).copied()
    }

    pub fn symbol_at(&self, span: &Span) -> Option<SymbolId> {
        match self.resolution(span)? {
            Resolution::Symbol(id) => Some(id),
            Resolution::Builtin(_) => None,
        }
    }

    /// Static type of the expression with this span, when it type-checked.
    pub fn type_at(&self, span: &Span) -> Option<&Type> {
        self.types.get(&key(span))
    }

    pub fn callable_kind(&self, id: SymbolId) -> Option<CallableKind> {
        self.callable_kinds.get(&id).copied()
    }

    pub fn callable_symbol(&self, loc: CallableLoc) -> Option<SymbolId> {
        self.callables.get(&loc).copied()
    }

    pub fn callable_by_name(&self, qualified: &str) -> Option<&Symbol> {
        self.symbols
            .iter()
            .find(|s| s.kind == SymbolKind::Callable && s.qualified == qualified)
    }

    pub fn occurrences_of(&self, id: SymbolId) -> impl Iterator<Item = &Occurrence> {
        self.occurrences.iter().filter(move |o| o.symbol == id)
    }

    /// Number of non-declaring occurrences.
    pub fn use_count(&self, id: SymbolId) -> usize {
        self.occurrences_of(id)
            .filter(|o| o.role != Role::Decl)
            .count()
    }

    /// Symbols declared in `owner`, excluding the callable itself.
    pub fn locals_of(&self, owner: CallableLoc) -> impl Iterator<Item = &Symbol> {
        self.symbols
            .iter()
            .filter(move |s| s.owner == owner && s.kind != SymbolKind::Callable)
    }

    /// Resolves `name` as seen from `scope` at byte offset `at`, considering
    /// only local symbols (declared before `at` in the same file).
    pub fn lookup_local(&self, scope: ScopeId, name: &str, at: u32) -> Option<SymbolId> {
        let mut cur = Some(scope);
        while let Some(s) = cur {
            let sc = &self.scopes[s.0 as usize];
            for (n, id) in sc.names.iter().rev() {
                if n == name {
                    let sym = self.symbol(*id);
                    if sym.kind == SymbolKind::Callable || sym.decl.lo <= at {
                        return Some(*id);
                    }
                }
            }
            cur = sc.parent;
        }
        None
    }

    /// Names declared anywhere inside `owner`, including parameters.
    pub fn local_names(&self, owner: CallableLoc) -> Vec<&str> {
        self.locals_of(owner).map(|s| s.name.as_str()).collect()
    }

    /// Sequence of symbol ids for every occurrence, used to compare the
    /// binding structure of two programs.
    pub fn binding_shape(&self) -> Vec<(SymbolId, SymbolKind)> {
        self.occurrences
            .iter()
            .map(|o| (o.symbol, self.symbol(o.symbol).kind))
            .collect()
    }
}
