//! LaTeX front end: tokenizer, presentation parser, printer and macro
//! registry.

mod parser;
mod printer;
pub mod registry;
mod strip;
pub mod symbols;
pub mod token;

use thiserror::Error;

pub use parser::{parse, parse_latex};
pub use printer::print;
pub use registry::{register_table1_macros, ArgKind, MacroDef, MacroRegistry, MacroSemantics};
pub use strip::strip_formatting;
pub use token::{tokenize, Token, TokenKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatexError {
    #[error("unbalanced group opened or closed at byte {pos}")]
    UnbalancedGroup { pos: usize },
    #[error("illegal character {ch:?} at byte {pos}")]
    IllegalCharacter { ch: char, pos: usize },
    #[error("unknown macro `{name}` at byte {pos}")]
    UnknownMacro { name: String, pos: usize },
    #[error("`{name}` at byte {pos} is missing an argument")]
    Arity { name: String, pos: usize },
    #[error("double sub- or superscript at byte {pos}")]
    DoubleScript { pos: usize },
    #[error("unexpected `{lexeme}` at byte {pos}")]
    Unexpected { lexeme: String, pos: usize },
    #[error("unsupported or mismatched environment `{name}` at byte {pos}")]
    Environment { name: String, pos: usize },
    #[error("macro `{0}` is already defined")]
    DuplicateMacro(String),
    #[error("macro table line {line}: {message}")]
    Registry { line: usize, message: String },
}
