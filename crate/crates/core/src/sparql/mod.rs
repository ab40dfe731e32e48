//! SPARQL 1.1 SELECT subset: parser, expression evaluator and a join engine
//! over [`QuadStore`].
//!
//! Supported: PREFIX, SELECT [DISTINCT] with `(expr AS ?v)`, basic graph
//! patterns, OPTIONAL, GRAPH, nested groups, BIND, FILTER, [NOT] IN, the
//! builtins in [`ast::Builtin`], ORDER BY, LIMIT and OFFSET. Everything else
//! is rejected with [`QueryError::Unsupported`].

pub mod ast;
mod eval;
pub mod expr;
pub mod feature;
mod parser;
mod results;

use thiserror::Error;

use crate::store::QuadStore;

pub use ast::Query;
pub use eval::evaluate;
pub use expr::{eval_expression, Bindings, SparqlValue};
pub use parser::parse_query;
pub use results::{ResultTable, TablePreview};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unsupported construct {construct} at byte {offset}")]
    Unsupported { construct: String, offset: usize },
    #[error("unknown prefix '{prefix}:' at byte {offset}")]
    UnknownPrefix { prefix: String, offset: usize },
    #[error("scope error: {0}")]
    Scope(String),
}

impl QueryError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            QueryError::Syntax { offset, .. }
            | QueryError::Unsupported { offset, .. }
            | QueryError::UnknownPrefix { offset, .. } => Some(*offset),
            QueryError::Scope(_) => None,
        }
    }
}

/// Parses and evaluates `text` against `store`.
pub fn query(text: &str, store: &QuadStore) -> Result<ResultTable, QueryError> {
    Ok(evaluate(&parse_query(text)?, store))
}
