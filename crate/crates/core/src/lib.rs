//! Refactoring toolkit for a bounded subset of Q#.
//!
//! The pipeline is parse ([`syntax`]) → resolve and build dependence graphs
//! ([`analysis`]) → transform ([`refactor`]) → verify behavior preservation
//! with an exact branching statevector simulator ([`sim`]).

pub mod analysis;
pub mod builtins;
pub mod diagnostic;
pub mod refactor;
pub mod sim;
pub mod syntax;

pub use diagnostic::{Code, Diagnostic, Severity};
pub use syntax::ast::{ast_equal, Program};
pub use syntax::{parse, print, FileId, SourceMap, Span};
