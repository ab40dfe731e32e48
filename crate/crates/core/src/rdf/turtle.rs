//! The Turtle subset produced for CADD score triples: prefix directives,
//! subject blocks with `;` predicate lists and `,` object lists, `a` for
//! `rdf:type`, and bare integers. Collections, nested blank nodes and
//! long strings are not supported.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::lex::Cursor;
use super::term::{rdf_ns, write_escaped, xsd};
use super::{BlankNode, GraphName, Iri, Literal, PrefixMap, Quad, RdfError, Subject, Term};

fn is_bare_integer(lexical: &str) -> bool {
    let digits = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn write_iri(out: &mut String, iri: &Iri, prefixes: &PrefixMap) {
    match prefixes.compact(iri.as_str()) {
        Some((prefix, local)) => {
            let _ = write!(out, "{prefix}:{local}");
        }
        None => {
            let _ = write!(out, "{iri}");
        }
    }
}

fn write_object(out: &mut String, term: &Term, prefixes: &PrefixMap) {
    match term {
        Term::Iri(i) => write_iri(out, i, prefixes),
        Term::BlankNode(b) => {
            let _ = write!(out, "{b}");
        }
        Term::Literal(l) => {
            if l.datatype().as_str() == xsd::INTEGER && is_bare_integer(l.lexical()) {
                out.push_str(l.lexical());
                return;
            }
            out.push('"');
            let _ = write_escaped(out, l.lexical());
            out.push('"');
            if let Some(lang) = l.language() {
                let _ = write!(out, "@{lang}");
            } else if !l.is_plain_string() {
                out.push_str("^^");
                write_iri(out, l.datatype(), prefixes);
            }
        }
    }
}

/// Serializes default-graph triples grouped by subject. Subjects and objects
/// are ordered by their N-Triples form; `rdf:type` comes first in each block.
pub fn serialize_turtle<'a>(
    triples: impl IntoIterator<Item = &'a Quad>,
    prefixes: &PrefixMap,
) -> Result<String, RdfError> {
    // subject -> predicate -> objects, all keyed by serialized form
    let mut blocks: BTreeMap<String, (&Subject, BTreeMap<(bool, String), (&Iri, BTreeMap<String, &Term>)>)> =
        BTreeMap::new();
    for q in triples {
        if let GraphName::Named(g) = &q.graph {
            return Err(RdfError::NamedGraphInTurtle(g.as_str().to_string()));
        }
        let (_, preds) = blocks.entry(q.subject.to_string()).or_insert_with(|| (&q.subject, BTreeMap::new()));
        let is_type = q.predicate.as_str() == rdf_ns::TYPE;
        let (_, objects) = preds
            .entry((!is_type, q.predicate.as_str().to_string()))
            .or_insert_with(|| (&q.predicate, BTreeMap::new()));
        objects.insert(q.object.to_string(), &q.object);
    }

    let mut out = String::new();
    for (label, ns) in prefixes.iter() {
        let _ = writeln!(out, "@prefix {label}: <{ns}> .");
    }
    for (subject, preds) in blocks.values() {
        if !out.is_empty() {
            out.push('\n');
        }
        match subject {
            Subject::Iri(i) => write_iri(&mut out, i, prefixes),
            Subject::BlankNode(b) => {
                let _ = write!(out, "{b}");
            }
        }
        let n = preds.len();
        for (idx, ((not_type, _), (pred, objects))) in preds.iter().enumerate() {
            out.push_str(if idx == 0 { " " } else { "    " });
            if !*not_type {
                out.push('a');
            } else {
                write_iri(&mut out, pred, prefixes);
            }
            out.push(' ');
            for (j, obj) in objects.values().enumerate() {
                if j > 0 {
                    out.push_str(" , ");
                }
                write_object(&mut out, obj, prefixes);
            }
            out.push_str(if idx + 1 == n { " .\n" } else { " ;\n" });
        }
    }
    Ok(out)
}

struct TurtleParser<'a> {
    cur: Cursor<'a>,
    prefixes: PrefixMap,
    out: Vec<Quad>,
}

fn is_pn_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

impl<'a> TurtleParser<'a> {
    fn pname(&mut self) -> Result<Iri, RdfError> {
        let mut prefix = String::new();
        while let Some(c) = self.cur.peek() {
            if c == ':' {
                break;
            }
            if !is_pn_char(c) {
                return Err(self.cur.err(format!("unexpected character {c:?}")));
            }
            prefix.push(c);
            self.cur.bump();
        }
        if !self.cur.eat(':') {
            return Err(self.cur.err("expected prefixed name"));
        }
        let mut local = String::new();
        while let Some(c) = self.cur.peek() {
            if c == '.' && !self.cur.peek_nth(1).is_some_and(is_pn_char) {
                break;
            }
            if !is_pn_char(c) {
                break;
            }
            local.push(c);
            self.cur.bump();
        }
        self.prefixes.expand(&prefix, &local).map_err(|e| self.cur.err(e.to_string()))
    }

    fn iri(&mut self) -> Result<Iri, RdfError> {
        if self.cur.peek() == Some('<') {
            self.cur.read_iriref()
        } else {
            self.pname()
        }
    }

    fn bnode(&mut self) -> Result<BlankNode, RdfError> {
        self.cur.eat_str("_:");
        let label = self.cur.read_bnode_label();
        BlankNode::new(label).map_err(|e| self.cur.err(e.to_string()))
    }

    fn number(&mut self) -> Result<Literal, RdfError> {
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.cur.peek() {
            text.push(c);
            self.cur.bump();
        }
        let mut dt = xsd::INTEGER;
        while let Some(c) = self.cur.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.cur.bump();
            } else if c == '.' && dt == xsd::INTEGER && self.cur.peek_nth(1).is_some_and(|n| n.is_ascii_digit()) {
                dt = xsd::DECIMAL;
                text.push(c);
                self.cur.bump();
            } else if matches!(c, 'e' | 'E') && dt != xsd::DOUBLE {
                dt = xsd::DOUBLE;
                text.push(c);
                self.cur.bump();
                if let Some(s @ ('+' | '-')) = self.cur.peek() {
                    text.push(s);
                    self.cur.bump();
                }
            } else {
                break;
            }
        }
        if !text.bytes().any(|b| b.is_ascii_digit()) {
            return Err(self.cur.err("malformed number"));
        }
        Ok(Literal::typed(text, Iri::from_static(dt)))
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        match self.cur.peek() {
            Some('<') => Ok(Term::Iri(self.cur.read_iriref()?)),
            Some('_') if self.cur.peek_nth(1) == Some(':') => Ok(Term::BlankNode(self.bnode()?)),
            Some('"' | '\'') => {
                let lexical = self.cur.read_quoted()?;
                if self.cur.eat('@') {
                    let tag = self.cur.read_langtag();
                    Literal::lang(lexical, tag).map(Term::Literal).map_err(|e| self.cur.err(e.to_string()))
                } else if self.cur.eat_str("^^") {
                    let dt = self.iri()?;
                    Ok(Term::Literal(Literal::typed(lexical, dt)))
                } else {
                    Ok(Term::Literal(Literal::string(lexical)))
                }
            }
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => Ok(Term::Literal(self.number()?)),
            Some(_) if self.keyword("true") => Ok(Literal::boolean(true).into()),
            Some(_) if self.keyword("false") => Ok(Literal::boolean(false).into()),
            Some('[' | '(') => Err(self.cur.err("collections and anonymous nodes are not supported")),
            Some(_) => Ok(Term::Iri(self.pname()?)),
            None => Err(self.cur.err("unexpected end of input")),
        }
    }

    /// Consumes `word` when it is not followed by a name character.
    fn keyword(&mut self, word: &str) -> bool {
        let rest = self.cur.rest();
        if rest.starts_with(word) && !rest[word.len()..].chars().next().is_some_and(|c| is_pn_char(c) || c == ':') {
            self.cur.eat_str(word)
        } else {
            false
        }
    }

    /// Case-insensitive keyword followed by whitespace.
    fn keyword_ci(&mut self, word: &str) -> bool {
        let rest = self.cur.rest();
        let matches = rest.get(..word.len()).is_some_and(|w| w.eq_ignore_ascii_case(word))
            && rest[word.len()..].starts_with(char::is_whitespace);
        if matches {
            for _ in 0..word.len() {
                self.cur.bump();
            }
        }
        matches
    }

    fn directive(&mut self, sparql_style: bool) -> Result<(), RdfError> {
        self.cur.skip_ws();
        let mut label = String::new();
        while let Some(c) = self.cur.peek() {
            if c == ':' {
                break;
            }
            label.push(c);
            self.cur.bump();
        }
        if !self.cur.eat(':') {
            return Err(self.cur.err("expected ':' in prefix declaration"));
        }
        self.cur.skip_ws();
        let ns = self.cur.read_iriref()?;
        self.prefixes.insert(label.trim(), ns.as_str()).map_err(|e| self.cur.err(e.to_string()))?;
        if !sparql_style {
            self.cur.skip_ws();
            if !self.cur.eat('.') {
                return Err(self.cur.err("missing '.' after @prefix"));
            }
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<(), RdfError> {
        if self.cur.eat_str("@prefix") {
            return self.directive(false);
        }
        if self.keyword_ci("PREFIX") {
            return self.directive(true);
        }
        if self.cur.rest().starts_with("@base") || self.keyword_ci("BASE") {
            return Err(self.cur.err("base declarations are not supported"));
        }
        let subject: Subject = match self.cur.peek() {
            Some('_') if self.cur.peek_nth(1) == Some(':') => self.bnode()?.into(),
            Some('[' | '(') => return Err(self.cur.err("collections and anonymous nodes are not supported")),
            _ => self.iri()?.into(),
        };
        loop {
            self.cur.skip_ws();
            let predicate = if self.keyword("a") { Iri::from_static(rdf_ns::TYPE) } else { self.iri()? };
            loop {
                self.cur.skip_ws();
                let object = self.object()?;
                self.out.push(Quad::triple(subject.clone(), predicate.clone(), object));
                self.cur.skip_ws();
                if !self.cur.eat(',') {
                    break;
                }
            }
            if self.cur.eat(';') {
                self.cur.skip_ws();
                // trailing ';' before '.' is allowed
                if self.cur.peek() == Some('.') {
                    self.cur.bump();
                    return Ok(());
                }
                continue;
            }
            if self.cur.eat('.') {
                return Ok(());
            }
            return Err(self.cur.err("expected ';', ',' or '.'"));
        }
    }
}

/// Parses the supported Turtle subset into default-graph quads.
pub fn parse_turtle(text: &str) -> Result<Vec<Quad>, RdfError> {
    parse_turtle_with_prefixes(text).map(|(q, _)| q)
}

/// Like [`parse_turtle`], also returning the declared prefixes.
pub fn parse_turtle_with_prefixes(text: &str) -> Result<(Vec<Quad>, PrefixMap), RdfError> {
    let mut p = TurtleParser { cur: Cursor::new(text, 1), prefixes: PrefixMap::new(), out: Vec::new() };
    loop {
        p.cur.skip_ws();
        if p.cur.at_end() {
            break;
        }
        p.statement()?;
    }
    Ok((p.out, p.prefixes))
}
