use std::collections::HashMap;

use crate::rdf::Term;

pub type TermId = u32;

/// Sentinel id of the default graph; never assigned to a term.
pub const DEFAULT_GRAPH: TermId = TermId::MAX;

/// Bijective `Term` ↔ `TermId` map with ids assigned densely in first-seen order.
#[derive(Debug, Clone, Default)]
pub struct TermDictionary {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    capacity: Option<usize>,
}

impl TermDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// A dictionary that refuses to grow beyond `capacity` terms.
    pub fn with_capacity_limit(capacity: usize) -> Self {
        TermDictionary { capacity: Some(capacity), ..Self::default() }
    }

    fn limit(&self) -> usize {
        self.capacity.unwrap_or(DEFAULT_GRAPH as usize).min(DEFAULT_GRAPH as usize)
    }

    /// Id of `term`, assigning the next free one if unseen. `None` when full.
    pub fn encode(&mut self, term: &Term) -> Option<TermId> {
        if let Some(&id) = self.ids.get(term) {
            return Some(id);
        }
        if self.terms.len() >= self.limit() {
            return None;
        }
        let id = self.terms.len() as TermId;
        self.terms.push(term.clone());
        self.ids.insert(term.clone(), id);
        Some(id)
    }

    pub fn lookup(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn decode(&self, id: TermId) -> Option<&Term> {
        self.terms.get(id as usize)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        for t in self.terms.drain(len..) {
            self.ids.remove(&t);
        }
    }
}
