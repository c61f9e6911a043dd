//! Text mini-language for 1-D nonlinear evolution equations.
//!
//! ```text
//! equation := ["-"] term (("+"|"-") term)* "=" "0"
//! term     := [number "*"] [identifier "*"] factor ("*" factor)*
//! factor   := ("sin"|"cos") "(" "u" ")" | pow
//! pow      := base ["^" integer]
//! base     := "u" ["_" subscript] | "(" pow ("*" pow)* ")" ["_" subscript]
//! ```
//!
//! Numbers may be integers, decimals or ratios (`3/4`).

mod aliases;
mod ast;
mod parser;
pub(crate) mod validate;

pub use aliases::{expand_alias, ALIAS_HELP};
pub use ast::{format_ratio, Atom, Coefficient, EquationAst, Term, Transcendental};
pub use parser::ParseOptions;
pub use validate::{validate, Family, ValidationReport};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared parameter '{name}' at byte {offset}")]
    UndeclaredParameter { offset: usize, name: String },
    #[error("unsupported construct at byte {offset}: {message}")]
    Unsupported { offset: usize, message: String },
    #[error("derivative order {order} at byte {offset} exceeds the maximum {max}")]
    OrderTooHigh { offset: usize, order: u32, max: u32 },
    #[error("unknown equation alias '{0}'")]
    UnknownAlias(String),
}

impl DslError {
    /// Byte offset of the problem in the source text, when it has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            DslError::Syntax { offset, .. }
            | DslError::UndeclaredParameter { offset, .. }
            | DslError::Unsupported { offset, .. }
            | DslError::OrderTooHigh { offset, .. } => Some(*offset),
            DslError::UnknownAlias(_) => None,
        }
    }
}

/// Parse with default options: symbolic parameters, maximum order 6.
pub fn parse_equation(text: &str) -> Result<EquationAst, DslError> {
    parse_with(text, &ParseOptions::default())
}

pub fn parse_with(text: &str, opts: &ParseOptions) -> Result<EquationAst, DslError> {
    parser::parse(text, opts)
}
