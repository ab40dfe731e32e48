//! N-Quads reader and canonical writer.

use std::io::{BufRead, Write};

use super::lex::Cursor;
use super::{BlankNode, GraphName, Literal, Quad, RdfError, Subject, Term};

/// Sort key: serialized (graph, subject, predicate, object). The default
/// graph sorts before every named graph.
fn canonical_key(q: &Quad) -> (String, String, String, String) {
    let g = match &q.graph {
        GraphName::Default => String::new(),
        GraphName::Named(i) => i.to_string(),
    };
    (g, q.subject.to_string(), q.predicate.to_string(), q.object.to_string())
}

/// Serializes quads in canonical order, one statement per line. Exact
/// duplicates are written once.
pub fn serialize_nquads<'a>(quads: impl IntoIterator<Item = &'a Quad>) -> String {
    let mut keyed: Vec<_> = quads.into_iter().map(canonical_key).collect();
    keyed.sort_unstable();
    keyed.dedup();
    let mut out = String::new();
    for (g, s, p, o) in keyed {
        out.push_str(&s);
        out.push(' ');
        out.push_str(&p);
        out.push(' ');
        out.push_str(&o);
        if !g.is_empty() {
            out.push(' ');
            out.push_str(&g);
        }
        out.push_str(" .\n");
    }
    out
}

/// Writes quads in input order without sorting; for large streams.
pub fn write_nquads<'a, W: Write>(mut out: W, quads: impl IntoIterator<Item = &'a Quad>) -> std::io::Result<()> {
    for q in quads {
        writeln!(out, "{q}")?;
    }
    Ok(())
}

fn read_term(cur: &mut Cursor<'_>) -> Result<Term, RdfError> {
    match cur.peek() {
        Some('<') => Ok(Term::Iri(cur.read_iriref()?)),
        Some('_') => {
            if !cur.eat_str("_:") {
                return Err(cur.err("expected '_:'"));
            }
            let label = cur.read_bnode_label();
            BlankNode::new(label).map(Term::BlankNode).map_err(|e| cur.err(e.to_string()))
        }
        Some('"') => {
            let lexical = cur.read_quoted()?;
            if cur.eat('@') {
                let tag = cur.read_langtag();
                Literal::lang(lexical, tag).map(Term::Literal).map_err(|e| cur.err(e.to_string()))
            } else if cur.eat_str("^^") {
                let dt = cur.read_iriref()?;
                Ok(Term::Literal(Literal::typed(lexical, dt)))
            } else {
                Ok(Term::Literal(Literal::string(lexical)))
            }
        }
        Some(c) => Err(cur.err(format!("unexpected character {c:?}"))),
        None => Err(cur.err("unexpected end of statement")),
    }
}

/// Parses a single N-Quads line. `Ok(None)` for blank and comment lines.
pub fn parse_nquads_line(line: &str, line_no: usize) -> Result<Option<Quad>, RdfError> {
    let mut cur = Cursor::new(line, line_no);
    cur.skip_ws();
    if cur.at_end() {
        return Ok(None);
    }
    let subject = Subject::try_from(read_term(&mut cur)?).map_err(|e| cur.err(e.to_string()))?;
    cur.skip_ws();
    let predicate = match read_term(&mut cur)? {
        Term::Iri(i) => i,
        t => return Err(cur.err(format!("predicate must be an IRI, found {t}"))),
    };
    cur.skip_ws();
    let object = read_term(&mut cur)?;
    cur.skip_ws();
    let graph = match cur.peek() {
        Some('<') => GraphName::Named(cur.read_iriref()?),
        Some('_') => return Err(cur.err("blank-node graph names are not supported")),
        _ => GraphName::Default,
    };
    cur.skip_ws();
    if !cur.eat('.') {
        return Err(cur.err("missing final '.'"));
    }
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.err("trailing content after '.'"));
    }
    Ok(Some(Quad { subject, predicate, object, graph }))
}

pub fn parse_nquads(text: &str) -> Result<Vec<Quad>, RdfError> {
    text.lines().enumerate().filter_map(|(i, line)| parse_nquads_line(line, i + 1).transpose()).collect()
}

/// Streaming reader over a buffered source.
pub struct NQuadsReader<R> {
    input: R,
    buf: String,
    line_no: usize,
}

impl<R: BufRead> NQuadsReader<R> {
    pub fn new(input: R) -> Self {
        Self { input, buf: String::new(), line_no: 0 }
    }
}

impl<R: BufRead> Iterator for NQuadsReader<R> {
    type Item = Result<Quad, RdfError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(RdfError::Io(e.to_string()))),
            }
            self.line_no += 1;
            match parse_nquads_line(&self.buf, self.line_no) {
                Ok(None) => continue,
                Ok(Some(q)) => return Some(Ok(q)),
                Err(e) => return Some(Err(e)),
            }
        }
    }
}
