//! RDF terms, quads, prefix maps and the N-Quads / Turtle codecs.

use indexmap::IndexMap;
use thiserror::Error;

mod lex;
pub mod nquads;
pub mod term;
pub mod turtle;

pub use nquads::{parse_nquads, serialize_nquads, write_nquads, NQuadsReader};
pub use term::{format_decimal, rdf_ns, xsd, BlankNode, GraphName, Iri, Literal, Quad, Subject, Term};
pub use turtle::{parse_turtle, serialize_turtle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("invalid blank node label {0:?}")]
    InvalidBlankNode(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("literal {0} cannot be a subject")]
    LiteralSubject(String),
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("duplicate prefix label {0:?}")]
    DuplicatePrefix(String),
    #[error("named graph {0} cannot be written as Turtle")]
    NamedGraphInTurtle(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
}

/// Ordered prefix label → namespace map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    map: IndexMap<String, String>,
}

fn is_valid_prefix_label(label: &str) -> bool {
    label.is_empty()
        || (label.starts_with(|c: char| c.is_ascii_alphabetic())
            && label.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-')))
}

fn is_simple_local(local: &str) -> bool {
    !local.is_empty()
        && local.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_')
        && local.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-'))
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a prefix. Re-declaring a label with a different namespace is an
    /// error; re-declaring it identically is a no-op.
    pub fn insert(&mut self, label: &str, namespace: &str) -> Result<(), RdfError> {
        if !is_valid_prefix_label(label) {
            return Err(RdfError::InvalidIri(format!("{label}:")));
        }
        Iri::new(namespace)?;
        match self.map.get(label) {
            Some(existing) if existing != namespace => Err(RdfError::DuplicatePrefix(label.to_string())),
            Some(_) => Ok(()),
            None => {
                self.map.insert(label.to_string(), namespace.to_string());
                Ok(())
            }
        }
    }

    pub fn get(&self, label: &str) -> Option<&str> {
        self.map.get(label).map(String::as_str)
    }

    pub fn expand(&self, label: &str, local: &str) -> Result<Iri, RdfError> {
        let ns = self.get(label).ok_or_else(|| RdfError::UnknownPrefix(label.to_string()))?;
        Iri::new(format!("{ns}{local}"))
    }

    /// Longest-namespace abbreviation whose local part needs no escaping.
    pub fn compact<'a>(&'a self, iri: &'a str) -> Option<(&'a str, &'a str)> {
        self.map
            .iter()
            .filter_map(|(label, ns)| {
                let local = iri.strip_prefix(ns.as_str())?;
                is_simple_local(local).then_some((label.as_str(), local, ns.len()))
            })
            .max_by_key(|(_, _, len)| *len)
            .map(|(l, local, _)| (l, local))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
