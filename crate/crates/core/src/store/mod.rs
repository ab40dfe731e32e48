//! In-memory, dictionary-encoded quad store.
//!
//! Terms are interned into dense `u32` ids; quads are kept sorted under the
//! GSPO, GPOS, GOSP and SPOG orderings. The default graph is encoded with the
//! [`DEFAULT_GRAPH`] sentinel.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binio::{self, ContainerError, Decoder, Encoder};
use crate::rdf::{self, BlankNode, GraphName, Iri, Literal, NQuadsReader, Quad, RdfError, Subject, Term};

mod dict;
mod index;

pub use dict::{TermDictionary, TermId, DEFAULT_GRAPH};
pub use index::{EncodedQuad, IdPattern, Ordering, QuadIndex};

const SNAPSHOT_MAGIC: &[u8; 8] = b"VKGSTORE";
const SNAPSHOT_VERSION: u32 = 1;
const LOAD_BATCH: usize = 1 << 18;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("term dictionary full after loading {loaded} quads")]
    Capacity { loaded: usize },
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error("snapshot: {0}")]
    Snapshot(#[from] ContainerError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreStats {
    pub quad_count: usize,
    /// Named graphs only.
    pub graph_count: usize,
    pub term_count: usize,
}

/// Term-level match pattern; `None` is a wildcard.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuadPattern {
    pub subject: Option<Term>,
    pub predicate: Option<Term>,
    pub object: Option<Term>,
    pub graph: Option<GraphName>,
}

#[derive(Debug, Clone, Default)]
pub struct QuadStore {
    dict: TermDictionary,
    index: QuadIndex,
}

impl QuadStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// A store whose dictionary holds at most `terms` entries.
    pub fn with_term_capacity(terms: usize) -> Self {
        QuadStore { dict: TermDictionary::with_capacity_limit(terms), index: QuadIndex::new() }
    }

    pub fn stats(&self) -> StoreStats {
        let named = self.index.graph_ids().iter().filter(|&&g| g != DEFAULT_GRAPH).count();
        StoreStats { quad_count: self.index.len(), graph_count: named, term_count: self.dict.len() }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn dictionary(&self) -> &TermDictionary {
        &self.dict
    }

    pub fn index(&self) -> &QuadIndex {
        &self.index
    }

    pub fn term(&self, id: TermId) -> Option<&Term> {
        self.dict.decode(id)
    }

    pub fn lookup(&self, term: &Term) -> Option<TermId> {
        self.dict.lookup(term)
    }

    pub fn lookup_graph(&self, graph: &GraphName) -> Option<TermId> {
        match graph {
            GraphName::Default => Some(DEFAULT_GRAPH),
            GraphName::Named(iri) => self.dict.lookup(&Term::Iri(iri.clone())),
        }
    }

    fn encode(&mut self, q: &Quad) -> Option<EncodedQuad> {
        let s = self.dict.encode(&q.subject.to_term())?;
        let p = self.dict.encode(&Term::Iri(q.predicate.clone()))?;
        let o = self.dict.encode(&q.object)?;
        let g = match &q.graph {
            GraphName::Default => DEFAULT_GRAPH,
            GraphName::Named(iri) => self.dict.encode(&Term::Iri(iri.clone()))?,
        };
        Some([s, p, o, g])
    }

    /// Loads quads, discarding duplicates. On dictionary exhaustion the quads
    /// encoded so far are kept and the error reports how many were added.
    pub fn bulk_load<I>(&mut self, quads: I) -> Result<StoreStats, StoreError>
    where
        I: IntoIterator<Item = Quad>,
    {
        let mut batch = Vec::with_capacity(LOAD_BATCH);
        let mut added = 0;
        for q in quads {
            let dict_len = self.dict.len();
            match self.encode(&q) {
                Some(e) => batch.push(e),
                None => {
                    self.dict.truncate(dict_len);
                    added += self.index.insert_batch(&batch);
                    return Err(StoreError::Capacity { loaded: added });
                }
            }
            if batch.len() == LOAD_BATCH {
                added += self.index.insert_batch(&batch);
                batch.clear();
            }
        }
        self.index.insert_batch(&batch);
        Ok(self.stats())
    }

    pub fn insert(&mut self, quad: Quad) -> Result<bool, StoreError> {
        let before = self.len();
        self.bulk_load([quad])?;
        Ok(self.len() > before)
    }

    /// Streams an N-Quads document into the store.
    pub fn load_nquads(&mut self, input: impl BufRead) -> Result<StoreStats, StoreError> {
        let mut err = None;
        let quads = NQuadsReader::new(input).map_while(|r| match r {
            Ok(q) => Some(q),
            Err(e) => {
                err = Some(e);
                None
            }
        });
        let stats = self.bulk_load(quads)?;
        match err {
            Some(e) => Err(e.into()),
            None => Ok(stats),
        }
    }

    pub fn load_turtle(&mut self, text: &str) -> Result<StoreStats, StoreError> {
        let quads = rdf::parse_turtle(text)?;
        self.bulk_load(quads)
    }

    /// Id-level pattern for a term-level one; `None` if some bound term is
    /// absent from the dictionary (and so nothing can match).
    pub fn encode_pattern(&self, pat: &QuadPattern) -> Option<IdPattern> {
        let term = |t: &Option<Term>| match t {
            None => Some(None),
            Some(t) => self.dict.lookup(t).map(Some),
        };
        let g = match &pat.graph {
            None => None,
            Some(g) => Some(self.lookup_graph(g)?),
        };
        Some([term(&pat.subject)?, term(&pat.predicate)?, term(&pat.object)?, g])
    }

    pub fn decode(&self, q: &EncodedQuad) -> Quad {
        let term = |id: TermId| self.dict.decode(id).expect("dangling term id").clone();
        let subject = Subject::try_from(term(q[0])).expect("subjects are never literals");
        let predicate = match term(q[1]) {
            Term::Iri(i) => i,
            other => panic!("predicate {other} is not an IRI"),
        };
        let graph = match q[3] {
            DEFAULT_GRAPH => GraphName::Default,
            g => match term(g) {
                Term::Iri(i) => GraphName::Named(i),
                other => panic!("graph {other} is not an IRI"),
            },
        };
        Quad { subject, predicate, object: term(q[2]), graph }
    }

    pub fn match_ids(&self, pat: &IdPattern) -> Vec<EncodedQuad> {
        self.index.matches(pat)
    }

    pub fn for_each_match(&self, pat: &IdPattern, f: impl FnMut(EncodedQuad)) {
        self.index.for_each_match(pat, f)
    }

    /// Quads matching every bound position of `pat`.
    pub fn match_pattern(&self, pat: &QuadPattern) -> Vec<Quad> {
        match self.encode_pattern(pat) {
            Some(ids) => self.index.matches(&ids).iter().map(|q| self.decode(q)).collect(),
            None => Vec::new(),
        }
    }

    /// All quads in GSPO id order.
    pub fn quads(&self) -> impl Iterator<Item = Quad> + '_ {
        self.index.iter().map(|q| self.decode(&q))
    }

    /// Named graphs, sorted by IRI.
    pub fn list_graphs(&self) -> Vec<Iri> {
        let mut out: Vec<Iri> = self
            .index
            .graph_ids()
            .iter()
            .filter(|&&g| g != DEFAULT_GRAPH)
            .filter_map(|&g| self.dict.decode(g).and_then(Term::as_iri).cloned())
            .collect();
        out.sort();
        out
    }

    /// Writes a checksummed snapshot: dictionary, then GSPO-sorted quads.
    pub fn snapshot(&self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        let mut enc = Encoder::new();
        enc.u64(self.dict.len() as u64);
        for t in self.dict.terms() {
            encode_term(&mut enc, t);
        }
        enc.u64(self.index.len() as u64);
        for q in self.index.iter() {
            for id in q {
                enc.u32(id);
            }
        }
        let file = BufWriter::new(File::create(path)?);
        binio::write_container(file, SNAPSHOT_MAGIC, SNAPSHOT_VERSION, &enc.into_bytes())?;
        Ok(())
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let payload = binio::read_container(BufReader::new(File::open(path)?), SNAPSHOT_MAGIC, SNAPSHOT_VERSION)?;
        let mut dec = Decoder::new(&payload);
        let n_terms = dec.len_prefix(2)?;
        let mut dict = TermDictionary::new();
        for i in 0..n_terms {
            let t = decode_term(&mut dec)?;
            if dict.encode(&t) != Some(i as TermId) {
                return Err(ContainerError::Malformed(format!("duplicate term {t}")).into());
            }
        }
        let n_quads = dec.len_prefix(16)?;
        let mut quads = Vec::with_capacity(n_quads);
        for _ in 0..n_quads {
            let q = [dec.u32()?, dec.u32()?, dec.u32()?, dec.u32()?];
            let ok = q[..3].iter().all(|&id| (id as usize) < n_terms)
                && (q[3] == DEFAULT_GRAPH || (q[3] as usize) < n_terms);
            if !ok {
                return Err(ContainerError::Malformed("quad references unknown term".into()).into());
            }
            quads.push(q);
        }
        dec.finish()?;
        let mut index = QuadIndex::new();
        index.insert_batch(&quads);
        Ok(QuadStore { dict, index })
    }
}

pub(crate) fn encode_term(enc: &mut Encoder, t: &Term) {
    match t {
        Term::Iri(i) => {
            enc.u8(0);
            enc.str(i.as_str());
        }
        Term::Literal(l) => {
            enc.u8(1);
            enc.str(l.lexical());
            enc.str(l.datatype().as_str());
            enc.bool(l.language().is_some());
            if let Some(lang) = l.language() {
                enc.str(lang);
            }
        }
        Term::BlankNode(b) => {
            enc.u8(2);
            enc.str(b.label());
        }
    }
}

pub(crate) fn decode_term(dec: &mut Decoder<'_>) -> Result<Term, ContainerError> {
    let bad = |e: RdfError| ContainerError::Malformed(e.to_string());
    Ok(match dec.u8()? {
        0 => Term::Iri(Iri::new(dec.str()?).map_err(bad)?),
        1 => {
            let lexical = dec.str()?;
            let datatype = Iri::new(dec.str()?).map_err(bad)?;
            if dec.bool()? {
                Term::Literal(Literal::lang(lexical, dec.str()?).map_err(bad)?)
            } else {
                Term::Literal(Literal::typed(lexical, datatype))
            }
        }
        2 => Term::BlankNode(BlankNode::new(dec.str()?).map_err(bad)?),
        tag => return Err(ContainerError::Malformed(format!("unknown term tag {tag}"))),
    })
}
