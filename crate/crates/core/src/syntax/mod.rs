//! Lexing, parsing and canonical printing of the supported Q# subset.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod span;
pub mod visit;

pub use ast::{ast_equal, Program};
pub use parser::{parse, parse_expr, parse_type};
pub use printer::print;
pub use span::{FileId, LineCol, SourceMap, Span};
