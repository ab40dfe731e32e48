use crate::rdf::{rdf_ns, xsd, Iri, Literal, PrefixMap, Term};

use super::ast::*;
use super::QueryError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Iri(String),
    PName(String, String),
    Var(String),
    Str(String),
    LangTag(String),
    Integer(String),
    Decimal(String),
    Double(String),
    Word(String),
    Punct(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Iri(i) => format!("<{i}>"),
            Tok::PName(p, l) => format!("{p}:{l}"),
            Tok::Var(v) => format!("?{v}"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::LangTag(l) => format!("@{l}"),
            Tok::Integer(n) | Tok::Decimal(n) | Tok::Double(n) => n.clone(),
            Tok::Word(w) => w.clone(),
            Tok::Punct(p) => p.to_string(),
            Tok::Eof => "end of input".into(),
        }
    }
}

const PUNCT: &[&str] =
    &["^^", "!=", "<=", ">=", "&&", "||", "{", "}", "(", ")", ".", ",", ";", "*", "=", "<", ">", "!", "+", "-", "/"];

const UNSUPPORTED: &[&str] = &[
    "UNION",
    "MINUS",
    "SERVICE",
    "VALUES",
    "GROUP",
    "HAVING",
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "FROM",
    "EXISTS",
    "BASE",
    "REDUCED",
    "INSERT",
    "DELETE",
    "LOAD",
    "CLEAR",
    "COUNT",
    "SUM",
    "MIN",
    "MAX",
    "AVG",
    "SAMPLE",
    "GROUP_CONCAT",
    "REGEX",
    "LANG",
    "DATATYPE",
    "NOW",
    "RAND",
];

fn is_iri_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn syntax(&self, offset: usize, message: impl Into<String>) -> QueryError {
        QueryError::Syntax { offset, message: message.into() }
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let rest = self.rest();
        let n = rest.find(|c: char| !f(c)).unwrap_or(rest.len());
        self.pos += n;
        &rest[..n]
    }

    fn read_string(&mut self, quote: char) -> Result<String, QueryError> {
        let start = self.pos;
        self.pos += 1;
        let mut out = String::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(self.syntax(start, "unterminated string"));
            };
            self.pos += c.len_utf8();
            match c {
                c if c == quote => return Ok(out),
                '\n' | '\r' => return Err(self.syntax(start, "newline in string")),
                '\\' => {
                    let esc_at = self.pos - 1;
                    let Some(e) = self.peek() else {
                        return Err(self.syntax(start, "unterminated string"));
                    };
                    self.pos += e.len_utf8();
                    match e {
                        't' => out.push('\t'),
                        'b' => out.push('\u{8}'),
                        'n' => out.push('\n'),
                        'r' => out.push('\r'),
                        'f' => out.push('\u{c}'),
                        '"' | '\'' | '\\' => out.push(e),
                        'u' | 'U' => {
                            let n = if e == 'u' { 4 } else { 8 };
                            let hex = self.rest().get(..n).unwrap_or("");
                            let ch = u32::from_str_radix(hex, 16)
                                .ok()
                                .filter(|_| hex.len() == n)
                                .and_then(char::from_u32)
                                .ok_or_else(|| self.syntax(esc_at, "bad unicode escape"))?;
                            self.pos += n;
                            out.push(ch);
                        }
                        _ => return Err(self.syntax(esc_at, format!("unknown escape \\{e}"))),
                    }
                }
                c => out.push(c),
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), QueryError> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, start));
        };
        let tok = match c {
            '<' => {
                let body = &self.rest()[1..];
                let end = body.find(|ch: char| !is_iri_char(ch));
                match end {
                    Some(n) if body[n..].starts_with('>') => {
                        self.pos += n + 2;
                        Tok::Iri(body[..n].to_string())
                    }
                    _ => self.punct(start)?,
                }
            }
            '?' | '$' => {
                self.pos += 1;
                let name = self.take_while(|ch| ch.is_ascii_alphanumeric() || ch == '_');
                if name.is_empty() {
                    return Err(self.syntax(start, "empty variable name"));
                }
                Tok::Var(name.to_string())
            }
            '"' | '\'' => {
                if self.rest().starts_with("\"\"\"") || self.rest().starts_with("'''") {
                    return Err(QueryError::Unsupported { construct: "long string literal".into(), offset: start });
                }
                Tok::Str(self.read_string(c)?)
            }
            '@' => {
                self.pos += 1;
                let tag = self.take_while(|ch| ch.is_ascii_alphanumeric() || ch == '-');
                if tag.is_empty() || !tag.starts_with(|ch: char| ch.is_ascii_alphabetic()) {
                    return Err(self.syntax(start, "bad language tag"));
                }
                Tok::LangTag(tag.to_string())
            }
            '0'..='9' => self.number(),
            '_' if self.rest().starts_with("_:") => {
                return Err(QueryError::Unsupported { construct: "blank node".into(), offset: start })
            }
            '[' => return Err(QueryError::Unsupported { construct: "blank node".into(), offset: start }),
            c if c.is_ascii_alphabetic() || c == '_' || c == ':' => {
                let prefix_len =
                    self.rest().find(|ch: char| !(ch.is_ascii_alphanumeric() || matches!(ch, '_' | '-' | '.')));
                let prefix_len = prefix_len.unwrap_or(self.rest().len());
                let candidate = &self.rest()[..prefix_len];
                if self.rest()[prefix_len..].starts_with(':') && !candidate.ends_with('.') {
                    let label = candidate.to_string();
                    self.pos += prefix_len + 1;
                    let local =
                        self.take_while(|ch| ch.is_ascii_alphanumeric() || matches!(ch, '_' | '-' | '.' | ':' | '%'));
                    let trimmed = local.trim_end_matches('.');
                    self.pos -= local.len() - trimmed.len();
                    Tok::PName(label, trimmed.to_string())
                } else {
                    let w = self.take_while(|ch| ch.is_ascii_alphanumeric() || ch == '_');
                    if w.is_empty() {
                        return Err(self.syntax(start, format!("unexpected character {c:?}")));
                    }
                    Tok::Word(w.to_string())
                }
            }
            _ => self.punct(start)?,
        };
        Ok((tok, start))
    }

    fn punct(&mut self, start: usize) -> Result<Tok, QueryError> {
        let rest = self.rest();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                self.pos += p.len();
                Ok(Tok::Punct(p))
            }
            None => {
                let c = rest.chars().next().unwrap_or(' ');
                if matches!(c, '|' | '^') {
                    Err(QueryError::Unsupported { construct: "property path".into(), offset: start })
                } else {
                    Err(self.syntax(start, format!("unexpected character {c:?}")))
                }
            }
        }
    }

    fn number(&mut self) -> Tok {
        let start = self.pos;
        self.take_while(|c| c.is_ascii_digit());
        let mut decimal = false;
        if self.rest().starts_with('.') && self.rest()[1..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
            self.take_while(|c| c.is_ascii_digit());
            decimal = true;
        }
        let mut double = false;
        let rest = self.rest();
        if rest.starts_with(['e', 'E']) {
            let digits_at = if rest[1..].starts_with(['+', '-']) { 2 } else { 1 };
            if rest[digits_at..].starts_with(|c: char| c.is_ascii_digit()) {
                self.pos += digits_at;
                self.take_while(|c| c.is_ascii_digit());
                double = true;
            }
        }
        let text = self.src[start..self.pos].to_string();
        if double {
            Tok::Double(text)
        } else if decimal {
            Tok::Decimal(text)
        } else {
            Tok::Integer(text)
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
    prefixes: PrefixMap,
}

fn lower(t: &Tok) -> Option<String> {
    match t {
        Tok::Word(w) => Some(w.to_ascii_uppercase()),
        _ => None,
    }
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, QueryError> {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok, at) = lexer.next()?;
        Ok(Parser { lexer, tok, at, prefixes: PrefixMap::new() })
    }

    fn advance(&mut self) -> Result<Tok, QueryError> {
        let (next, at) = self.lexer.next()?;
        self.at = at;
        Ok(std::mem::replace(&mut self.tok, next))
    }

    fn error(&self, message: impl Into<String>) -> QueryError {
        if let Some(kw) = lower(&self.tok) {
            if UNSUPPORTED.contains(&kw.as_str()) {
                return QueryError::Unsupported { construct: kw, offset: self.at };
            }
        }
        QueryError::Syntax { offset: self.at, message: message.into() }
    }

    fn expected(&self, what: &str) -> QueryError {
        self.error(format!("expected {what}, found {}", self.tok.describe()))
    }

    fn is_kw(&self, kw: &str) -> bool {
        lower(&self.tok).is_some_and(|w| w == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> Result<bool, QueryError> {
        if self.is_kw(kw) {
            self.advance()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), QueryError> {
        if self.eat_kw(kw)? {
            Ok(())
        } else {
            Err(self.expected(kw))
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(&self.tok, Tok::Punct(q) if *q == p)
    }

    fn eat_punct(&mut self, p: &str) -> Result<bool, QueryError> {
        if self.is_punct(p) {
            self.advance()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), QueryError> {
        if self.eat_punct(p)? {
            Ok(())
        } else {
            Err(self.expected(&format!("'{p}'")))
        }
    }

    fn expect_var(&mut self) -> Result<String, QueryError> {
        match &self.tok {
            Tok::Var(v) => {
                let v = v.clone();
                self.advance()?;
                Ok(v)
            }
            _ => Err(self.expected("a variable")),
        }
    }

    fn iri(&self, text: &str) -> Result<Iri, QueryError> {
        Iri::new(text).map_err(|e| QueryError::Syntax { offset: self.at, message: e.to_string() })
    }

    fn resolve(&self, label: &str, local: &str) -> Result<Iri, QueryError> {
        let ns = self
            .prefixes
            .get(label)
            .ok_or_else(|| QueryError::UnknownPrefix { prefix: label.to_string(), offset: self.at })?;
        self.iri(&format!("{ns}{local}"))
    }

    fn query(mut self) -> Result<Query, QueryError> {
        while self.eat_kw("PREFIX")? {
            let Tok::PName(label, local) = self.tok.clone() else {
                return Err(self.expected("a prefix label"));
            };
            if !local.is_empty() {
                return Err(self.expected("a prefix label ending in ':'"));
            }
            self.advance()?;
            let Tok::Iri(ns) = self.tok.clone() else {
                return Err(self.expected("a namespace IRI"));
            };
            let at = self.at;
            self.prefixes.insert(&label, &ns).map_err(|e| QueryError::Syntax { offset: at, message: e.to_string() })?;
            self.advance()?;
        }
        self.expect_kw("SELECT")?;
        let distinct = self.eat_kw("DISTINCT")?;
        let projection = if self.eat_punct("*")? {
            Projection::All
        } else {
            let mut items = Vec::new();
            loop {
                match &self.tok {
                    Tok::Var(_) => items.push(SelectItem::Var(self.expect_var()?)),
                    Tok::Punct("(") => {
                        self.advance()?;
                        let e = self.expression()?;
                        self.expect_kw("AS")?;
                        let v = self.expect_var()?;
                        self.expect_punct(")")?;
                        items.push(SelectItem::Expr(e, v));
                    }
                    _ => break,
                }
            }
            if items.is_empty() {
                return Err(self.expected("a projection"));
            }
            Projection::Items(items)
        };
        self.eat_kw("WHERE")?;
        let where_clause = self.group()?;
        let mut order_by = Vec::new();
        if self.eat_kw("ORDER")? {
            self.expect_kw("BY")?;
            loop {
                if let Tok::Var(_) = self.tok {
                    order_by.push(OrderKey { var: self.expect_var()?, descending: false });
                } else if self.is_kw("ASC") || self.is_kw("DESC") {
                    let descending = self.is_kw("DESC");
                    self.advance()?;
                    self.expect_punct("(")?;
                    let var = self.expect_var()?;
                    self.expect_punct(")")?;
                    order_by.push(OrderKey { var, descending });
                } else {
                    break;
                }
            }
            if order_by.is_empty() {
                return Err(self.expected("an ORDER BY variable"));
            }
        }
        let mut limit = None;
        let mut offset = None;
        loop {
            if limit.is_none() && self.eat_kw("LIMIT")? {
                limit = Some(self.count()?);
            } else if offset.is_none() && self.eat_kw("OFFSET")? {
                offset = Some(self.count()?);
            } else {
                break;
            }
        }
        if self.tok != Tok::Eof {
            return Err(self.expected("end of query"));
        }
        let q = Query { prefixes: self.prefixes, distinct, projection, where_clause, order_by, limit, offset };
        check_scope(&q)?;
        Ok(q)
    }

    fn count(&mut self) -> Result<usize, QueryError> {
        match &self.tok {
            Tok::Integer(n) => {
                let n = n.parse().map_err(|_| self.expected("a count"))?;
                self.advance()?;
                Ok(n)
            }
            _ => Err(self.expected("an integer")),
        }
    }

    fn group(&mut self) -> Result<GroupPattern, QueryError> {
        self.expect_punct("{")?;
        let mut elements = Vec::new();
        loop {
            if self.eat_punct("}")? {
                break;
            }
            if self.eat_punct(".")? {
                continue;
            }
            if self.eat_kw("OPTIONAL")? {
                elements.push(GroupElement::Optional(self.group()?));
            } else if self.eat_kw("GRAPH")? {
                let name = match self.tok.clone() {
                    Tok::Var(v) => {
                        self.advance()?;
                        TermPattern::Var(v)
                    }
                    Tok::Iri(_) | Tok::PName(..) => TermPattern::Term(Term::Iri(self.iri_term()?)),
                    _ => return Err(self.expected("a graph variable or IRI")),
                };
                elements.push(GroupElement::Graph(name, self.group()?));
            } else if self.eat_kw("BIND")? {
                self.expect_punct("(")?;
                let e = self.expression()?;
                self.expect_kw("AS")?;
                let v = self.expect_var()?;
                self.expect_punct(")")?;
                elements.push(GroupElement::Bind(e, v));
            } else if self.eat_kw("FILTER")? {
                let e = if self.is_punct("(") {
                    self.advance()?;
                    let e = self.expression()?;
                    self.expect_punct(")")?;
                    e
                } else {
                    self.primary()?
                };
                elements.push(GroupElement::Filter(e));
            } else if self.is_punct("{") {
                elements.push(GroupElement::Group(self.group()?));
            } else if self.starts_term() {
                let mut triples = Vec::new();
                self.triples_same_subject(&mut triples)?;
                while self.eat_punct(".")? {
                    if !self.starts_term() {
                        break;
                    }
                    self.triples_same_subject(&mut triples)?;
                }
                match elements.last_mut() {
                    Some(GroupElement::Triples(prev)) => prev.extend(triples),
                    _ => elements.push(GroupElement::Triples(triples)),
                }
            } else {
                return Err(self.expected("a graph pattern"));
            }
        }
        Ok(GroupPattern { elements })
    }

    fn starts_term(&self) -> bool {
        match &self.tok {
            Tok::Var(_)
            | Tok::Iri(_)
            | Tok::PName(..)
            | Tok::Str(_)
            | Tok::Integer(_)
            | Tok::Decimal(_)
            | Tok::Double(_) => true,
            Tok::Word(w) => w == "true" || w == "false",
            Tok::Punct("-") | Tok::Punct("+") => true,
            _ => false,
        }
    }

    fn triples_same_subject(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), QueryError> {
        let subject = self.term_pattern()?;
        if let TermPattern::Term(Term::Literal(_)) = subject {
            return Err(self.error("a literal cannot be a subject"));
        }
        loop {
            let predicate = if self.is_kw("A") && matches!(&self.tok, Tok::Word(w) if w == "a") {
                self.advance()?;
                TermPattern::Term(Term::Iri(Iri::from_static(rdf_ns::TYPE)))
            } else {
                match self.term_pattern()? {
                    p @ (TermPattern::Var(_) | TermPattern::Term(Term::Iri(_))) => p,
                    _ => return Err(self.error("a predicate must be an IRI or variable")),
                }
            };
            if self.is_punct("/") {
                return Err(QueryError::Unsupported { construct: "property path".into(), offset: self.at });
            }
            loop {
                let object = self.term_pattern()?;
                out.push(TriplePattern { subject: subject.clone(), predicate: predicate.clone(), object });
                if !self.eat_punct(",")? {
                    break;
                }
            }
            if !self.eat_punct(";")? {
                return Ok(());
            }
            while self.eat_punct(";")? {}
            if self.is_punct(".") || self.is_punct("}") {
                return Ok(());
            }
        }
    }

    fn iri_term(&mut self) -> Result<Iri, QueryError> {
        let iri = match &self.tok {
            Tok::Iri(i) => self.iri(i)?,
            Tok::PName(p, l) => self.resolve(p, l)?,
            _ => return Err(self.expected("an IRI")),
        };
        self.advance()?;
        Ok(iri)
    }

    fn term_pattern(&mut self) -> Result<TermPattern, QueryError> {
        if let Tok::Var(_) = self.tok {
            return Ok(TermPattern::Var(self.expect_var()?));
        }
        Ok(TermPattern::Term(self.rdf_term()?))
    }

    fn rdf_term(&mut self) -> Result<Term, QueryError> {
        match self.tok.clone() {
            Tok::Iri(_) | Tok::PName(..) => Ok(Term::Iri(self.iri_term()?)),
            Tok::Str(s) => {
                self.advance()?;
                match self.tok.clone() {
                    Tok::LangTag(tag) => {
                        let lit = Literal::lang(s, tag).map_err(|e| self.error(e.to_string()))?;
                        self.advance()?;
                        Ok(lit.into())
                    }
                    Tok::Punct("^^") => {
                        self.advance()?;
                        let dt = self.iri_term()?;
                        Ok(Literal::typed(s, dt).into())
                    }
                    _ => Ok(Literal::string(s).into()),
                }
            }
            Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_) => self.numeric(""),
            Tok::Punct(sign @ ("-" | "+")) => {
                self.advance()?;
                match self.tok {
                    Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_) => {
                        self.numeric(if sign == "-" { "-" } else { "" })
                    }
                    _ => Err(self.expected("a number")),
                }
            }
            Tok::Word(w) if w == "true" || w == "false" => {
                self.advance()?;
                Ok(Literal::boolean(w == "true").into())
            }
            _ => Err(self.expected("an RDF term")),
        }
    }

    fn numeric(&mut self, sign: &str) -> Result<Term, QueryError> {
        let (text, dt) = match &self.tok {
            Tok::Integer(n) => (n, xsd::INTEGER),
            Tok::Decimal(n) => (n, xsd::DECIMAL),
            Tok::Double(n) => (n, xsd::DOUBLE),
            _ => return Err(self.expected("a number")),
        };
        let lit = Literal::typed(format!("{sign}{text}"), Iri::from_static(dt));
        self.advance()?;
        Ok(lit.into())
    }

    fn expression(&mut self) -> Result<Expression, QueryError> {
        let mut lhs = self.and_expr()?;
        while self.eat_punct("||")? {
            lhs = Expression::Or(Box::new(lhs), Box::new(self.and_expr()?));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expression, QueryError> {
        let mut lhs = self.relational()?;
        while self.eat_punct("&&")? {
            lhs = Expression::And(Box::new(lhs), Box::new(self.relational()?));
        }
        Ok(lhs)
    }

    fn relational(&mut self) -> Result<Expression, QueryError> {
        let lhs = self.additive()?;
        let op = match &self.tok {
            Tok::Punct("=") => Some(CompareOp::Eq),
            Tok::Punct("!=") => Some(CompareOp::Ne),
            Tok::Punct("<") => Some(CompareOp::Lt),
            Tok::Punct("<=") => Some(CompareOp::Le),
            Tok::Punct(">") => Some(CompareOp::Gt),
            Tok::Punct(">=") => Some(CompareOp::Ge),
            _ => None,
        };
        if let Some(op) = op {
            self.advance()?;
            return Ok(Expression::Compare(op, Box::new(lhs), Box::new(self.additive()?)));
        }
        let negated = if self.is_kw("NOT") {
            self.advance()?;
            if !self.is_kw("IN") {
                return Err(self.expected("IN"));
            }
            true
        } else {
            false
        };
        if self.eat_kw("IN")? {
            self.expect_punct("(")?;
            let mut list = Vec::new();
            if !self.is_punct(")") {
                list.push(self.expression()?);
                while self.eat_punct(",")? {
                    list.push(self.expression()?);
                }
            }
            self.expect_punct(")")?;
            return Ok(Expression::In { needle: Box::new(lhs), list, negated });
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Expression, QueryError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.tok {
                Tok::Punct("+") => ArithOp::Add,
                Tok::Punct("-") => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            lhs = Expression::Arith(op, Box::new(lhs), Box::new(self.multiplicative()?));
        }
    }

    fn multiplicative(&mut self) -> Result<Expression, QueryError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Punct("*") => ArithOp::Mul,
                Tok::Punct("/") => ArithOp::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            lhs = Expression::Arith(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expression, QueryError> {
        if self.eat_punct("!")? {
            return Ok(Expression::Not(Box::new(self.unary()?)));
        }
        if self.eat_punct("-")? {
            return Ok(Expression::Neg(Box::new(self.unary()?)));
        }
        if self.eat_punct("+")? {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expression, QueryError> {
        match self.tok.clone() {
            Tok::Punct("(") => {
                self.advance()?;
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Var(v) => {
                self.advance()?;
                Ok(Expression::Var(v))
            }
            Tok::Word(w) if w != "true" && w != "false" => {
                let at = self.at;
                let Some(builtin) = Builtin::from_name(&w) else {
                    return Err(QueryError::Unsupported { construct: w.to_ascii_uppercase(), offset: at });
                };
                self.advance()?;
                self.expect_punct("(")?;
                let mut args = Vec::new();
                if !self.is_punct(")") {
                    args.push(self.expression()?);
                    while self.eat_punct(",")? {
                        args.push(self.expression()?);
                    }
                }
                self.expect_punct(")")?;
                let (lo, hi) = builtin.arity();
                if args.len() < lo || args.len() > hi {
                    return Err(QueryError::Syntax {
                        offset: at,
                        message: format!(
                            "{} takes {} argument(s), got {}",
                            builtin.name(),
                            arity_text(lo, hi),
                            args.len()
                        ),
                    });
                }
                if builtin == Builtin::Bound && !matches!(args[0], Expression::Var(_)) {
                    return Err(QueryError::Syntax { offset: at, message: "BOUND expects a variable".into() });
                }
                Ok(Expression::Call(builtin, args))
            }
            _ => Ok(Expression::Term(self.rdf_term()?)),
        }
    }
}

fn arity_text(lo: usize, hi: usize) -> String {
    if lo == hi {
        lo.to_string()
    } else if hi == usize::MAX {
        format!("at least {lo}")
    } else {
        format!("{lo} to {hi}")
    }
}

/// Every projected variable must be bindable in WHERE or assigned by an
/// earlier projection expression.
fn check_scope(q: &Query) -> Result<(), QueryError> {
    let Projection::Items(items) = &q.projection else {
        return Ok(());
    };
    let mut known = q.where_clause.vars();
    for item in items {
        match item {
            SelectItem::Var(v) if !known.contains(v) => {
                return Err(QueryError::Scope(format!("?{v} is projected but never bound")));
            }
            SelectItem::Expr(_, v) => known.push(v.clone()),
            _ => {}
        }
    }
    Ok(())
}

pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    Parser::new(text)?.query()
}
