//! Expression evaluation. Errors and unbound variables both evaluate to
//! `None`; FILTER treats that as false.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;

use regex::Regex;

use crate::rdf::{format_decimal, xsd, Iri, Literal, Term};

use super::ast::{ArithOp, Builtin, CompareOp, Expression};

/// Runtime value of an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum SparqlValue {
    Unbound,
    Term(Term),
    Boolean(bool),
    Integer(i64),
    Decimal(f64),
    String(String),
}

impl SparqlValue {
    pub fn from_term(term: Option<Term>) -> Self {
        let Some(term) = term else {
            return SparqlValue::Unbound;
        };
        if let Term::Literal(l) = &term {
            match l.datatype().as_str() {
                xsd::BOOLEAN => {
                    if let Some(b) = parse_bool(l.lexical()) {
                        return SparqlValue::Boolean(b);
                    }
                }
                xsd::INTEGER => {
                    if let Ok(i) = l.lexical().parse() {
                        return SparqlValue::Integer(i);
                    }
                }
                xsd::DECIMAL => {
                    if let Ok(f) = l.lexical().parse() {
                        return SparqlValue::Decimal(f);
                    }
                }
                xsd::STRING => return SparqlValue::String(l.lexical().to_string()),
                _ => {}
            }
        }
        SparqlValue::Term(term)
    }

    pub fn is_bound(&self) -> bool {
        !matches!(self, SparqlValue::Unbound)
    }
}

/// Variable lookup for expression evaluation.
pub trait Bindings {
    fn get(&self, var: &str) -> Option<Term>;
}

impl Bindings for HashMap<String, Term> {
    fn get(&self, var: &str) -> Option<Term> {
        HashMap::get(self, var).cloned()
    }
}

/// Evaluates `expr` under `row`.
pub fn eval_expression(expr: &Expression, row: &impl Bindings) -> SparqlValue {
    SparqlValue::from_term(eval_term(expr, row))
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy)]
enum Num {
    Int(i64),
    Dec(f64),
    Dbl(f64),
}

impl Num {
    fn f64(self) -> f64 {
        match self {
            Num::Int(i) => i as f64,
            Num::Dec(f) | Num::Dbl(f) => f,
        }
    }
}

fn numeric(t: &Term) -> Option<Num> {
    let l = t.as_literal()?;
    let lex = l.lexical().trim();
    match l.datatype().as_str() {
        xsd::INTEGER | xsd::INT | xsd::LONG => lex.parse().ok().map(Num::Int),
        xsd::DECIMAL => lex.parse().ok().map(Num::Dec),
        xsd::FLOAT | xsd::DOUBLE => lex.parse().ok().map(Num::Dbl),
        _ => None,
    }
}

fn num_term(n: Num) -> Option<Term> {
    let lit = match n {
        Num::Int(i) => Literal::integer(i),
        Num::Dec(f) if f.is_finite() => Literal::typed(format_decimal(f), Iri::from_static(xsd::DECIMAL)),
        Num::Dbl(f) if f.is_finite() => Literal::typed(format_decimal(f), Iri::from_static(xsd::DOUBLE)),
        _ => return None,
    };
    Some(lit.into())
}

fn bool_term(b: bool) -> Option<Term> {
    Some(Literal::boolean(b).into())
}

fn string_lit(t: &Term) -> Option<&Literal> {
    t.as_literal().filter(|l| l.language().is_some() || l.datatype().as_str() == xsd::STRING)
}

/// A literal of the same kind (language tag kept) as `like`.
fn same_kind(like: &Literal, value: String) -> Term {
    match like.language() {
        Some(tag) => Literal::lang(value, tag).expect("tag was already valid").into(),
        None => Literal::string(value).into(),
    }
}

/// Effective boolean value.
pub fn ebv(t: &Term) -> Option<bool> {
    let l = t.as_literal()?;
    if l.datatype().as_str() == xsd::BOOLEAN {
        return Some(parse_bool(l.lexical()).unwrap_or(false));
    }
    if let Some(n) = numeric(t) {
        let f = n.f64();
        return Some(f != 0.0 && !f.is_nan());
    }
    if l.is_numeric() {
        return Some(false);
    }
    string_lit(t).map(|s| !s.lexical().is_empty())
}

fn boolean(t: &Term) -> Option<bool> {
    let l = t.as_literal()?;
    (l.datatype().as_str() == xsd::BOOLEAN).then(|| parse_bool(l.lexical())).flatten()
}

fn order(a: &Term, b: &Term) -> Option<Ordering> {
    if let (Some(x), Some(y)) = (numeric(a), numeric(b)) {
        return match (x, y) {
            (Num::Int(i), Num::Int(j)) => Some(i.cmp(&j)),
            _ => x.f64().partial_cmp(&y.f64()),
        };
    }
    if let (Some(x), Some(y)) = (boolean(a), boolean(b)) {
        return Some(x.cmp(&y));
    }
    match (string_lit(a), string_lit(b)) {
        (Some(x), Some(y)) if x.language() == y.language() => Some(x.lexical().cmp(y.lexical())),
        _ => None,
    }
}

fn compare(op: CompareOp, a: &Term, b: &Term) -> Option<bool> {
    match op {
        CompareOp::Eq => equal(a, b),
        CompareOp::Ne => equal(a, b).map(|e| !e),
        _ => {
            let ord = order(a, b)?;
            Some(match op {
                CompareOp::Lt => ord == Ordering::Less,
                CompareOp::Le => ord != Ordering::Greater,
                CompareOp::Gt => ord == Ordering::Greater,
                CompareOp::Ge => ord != Ordering::Less,
                CompareOp::Eq | CompareOp::Ne => unreachable!(),
            })
        }
    }
}

fn equal(a: &Term, b: &Term) -> Option<bool> {
    if let (Some(x), Some(y)) = (numeric(a), numeric(b)) {
        return Some(match (x, y) {
            (Num::Int(i), Num::Int(j)) => i == j,
            _ => x.f64() == y.f64(),
        });
    }
    if let (Some(x), Some(y)) = (boolean(a), boolean(b)) {
        return Some(x == y);
    }
    Some(a == b)
}

fn arith(op: ArithOp, a: Num, b: Num) -> Option<Num> {
    if let (Num::Int(x), Num::Int(y), false) = (a, b, op == ArithOp::Div) {
        return match op {
            ArithOp::Add => x.checked_add(y),
            ArithOp::Sub => x.checked_sub(y),
            ArithOp::Mul => x.checked_mul(y),
            ArithOp::Div => unreachable!(),
        }
        .map(Num::Int);
    }
    let (x, y) = (a.f64(), b.f64());
    let v = match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => {
            if y == 0.0 {
                return None;
            }
            x / y
        }
    };
    Some(if matches!(a, Num::Dbl(_)) || matches!(b, Num::Dbl(_)) { Num::Dbl(v) } else { Num::Dec(v) })
}

const REGEX_CACHE_LIMIT: usize = 256;

thread_local! {
    static REGEX_CACHE: RefCell<HashMap<(String, String), Option<Regex>>> = RefCell::new(HashMap::new());
}

fn compiled(pattern: &str, flags: &str) -> Option<Regex> {
    REGEX_CACHE.with(|cache| {
        let key = (pattern.to_string(), flags.to_string());
        if let Some(r) = cache.borrow().get(&key) {
            return r.clone();
        }
        let re = if flags.chars().all(|c| matches!(c, 'i' | 's' | 'm' | 'x')) {
            let prefix = if flags.is_empty() { String::new() } else { format!("(?{flags})") };
            Regex::new(&format!("{prefix}{pattern}")).ok()
        } else {
            None
        };
        let mut cache = cache.borrow_mut();
        if cache.len() >= REGEX_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, re.clone());
        re
    })
}

/// Like [`eval_expression`] but keeps the result as an RDF term.
pub fn eval_term(expr: &Expression, row: &impl Bindings) -> Option<Term> {
    match expr {
        Expression::Var(v) => row.get(v),
        Expression::Term(t) => Some(t.clone()),
        Expression::Or(a, b) => {
            let x = eval_term(a, row).as_ref().and_then(ebv);
            let y = eval_term(b, row).as_ref().and_then(ebv);
            match (x, y) {
                (Some(true), _) | (_, Some(true)) => bool_term(true),
                (Some(false), Some(false)) => bool_term(false),
                _ => None,
            }
        }
        Expression::And(a, b) => {
            let x = eval_term(a, row).as_ref().and_then(ebv);
            let y = eval_term(b, row).as_ref().and_then(ebv);
            match (x, y) {
                (Some(false), _) | (_, Some(false)) => bool_term(false),
                (Some(true), Some(true)) => bool_term(true),
                _ => None,
            }
        }
        Expression::Not(a) => bool_term(!ebv(&eval_term(a, row)?)?),
        Expression::Neg(a) => match numeric(&eval_term(a, row)?)? {
            Num::Int(i) => num_term(Num::Int(i.checked_neg()?)),
            Num::Dec(f) => num_term(Num::Dec(-f)),
            Num::Dbl(f) => num_term(Num::Dbl(-f)),
        },
        Expression::Compare(op, a, b) => bool_term(compare(*op, &eval_term(a, row)?, &eval_term(b, row)?)?),
        Expression::Arith(op, a, b) => {
            let x = numeric(&eval_term(a, row)?)?;
            let y = numeric(&eval_term(b, row)?)?;
            num_term(arith(*op, x, y)?)
        }
        Expression::In { needle, list, negated } => {
            let n = eval_term(needle, row)?;
            let mut errored = false;
            for item in list {
                match eval_term(item, row).and_then(|t| equal(&n, &t)) {
                    Some(true) => return bool_term(!negated),
                    Some(false) => {}
                    None => errored = true,
                }
            }
            if errored {
                None
            } else {
                bool_term(*negated)
            }
        }
        Expression::Call(f, args) => call(*f, args, row),
    }
}

fn call(f: Builtin, args: &[Expression], row: &impl Bindings) -> Option<Term> {
    let arg = |i: usize| eval_term(&args[i], row);
    match f {
        Builtin::Coalesce => args.iter().find_map(|a| eval_term(a, row)),
        Builtin::If => {
            if ebv(&arg(0)?)? {
                arg(1)
            } else {
                arg(2)
            }
        }
        Builtin::Bound => match &args[0] {
            Expression::Var(v) => bool_term(row.get(v).is_some()),
            _ => None,
        },
        Builtin::IsIri => bool_term(matches!(arg(0)?, Term::Iri(_))),
        Builtin::IsLiteral => bool_term(matches!(arg(0)?, Term::Literal(_))),
        Builtin::Str => match arg(0)? {
            Term::Iri(i) => Some(Literal::string(i.as_str()).into()),
            Term::Literal(l) => Some(Literal::string(l.lexical()).into()),
            Term::BlankNode(_) => None,
        },
        Builtin::Strlen => {
            let s = arg(0)?;
            let n = string_lit(&s)?.lexical().chars().count();
            Some(Literal::integer(n as i64).into())
        }
        Builtin::Lcase | Builtin::Ucase => {
            let s = arg(0)?;
            let l = string_lit(&s)?;
            let v = if f == Builtin::Lcase { l.lexical().to_lowercase() } else { l.lexical().to_uppercase() };
            Some(same_kind(l, v))
        }
        Builtin::Contains | Builtin::StrStarts | Builtin::StrBefore | Builtin::StrAfter => {
            let (a, b) = (arg(0)?, arg(1)?);
            let (a, b) = (string_lit(&a)?, string_lit(&b)?);
            if b.language().is_some() && b.language() != a.language() {
                return None;
            }
            let (hay, needle) = (a.lexical(), b.lexical());
            match f {
                Builtin::Contains => bool_term(hay.contains(needle)),
                Builtin::StrStarts => bool_term(hay.starts_with(needle)),
                Builtin::StrBefore => Some(match hay.find(needle) {
                    Some(i) => same_kind(a, hay[..i].to_string()),
                    None => Literal::string("").into(),
                }),
                _ => Some(match hay.find(needle) {
                    Some(i) => same_kind(a, hay[i + needle.len()..].to_string()),
                    None => Literal::string("").into(),
                }),
            }
        }
        Builtin::Replace => {
            let input = arg(0)?;
            let input = string_lit(&input)?;
            let pattern = arg(1)?;
            let replacement = arg(2)?;
            let flags = if args.len() == 4 { string_lit(&arg(3)?)?.lexical().to_string() } else { String::new() };
            let re = compiled(string_lit(&pattern)?.lexical(), &flags)?;
            let out = re.replace_all(input.lexical(), string_lit(&replacement)?.lexical());
            Some(same_kind(input, out.into_owned()))
        }
    }
}

/// Total order used by ORDER BY: unbound, blank nodes, IRIs, then literals;
/// numeric literals compare by value.
pub fn order_terms(a: Option<&Term>, b: Option<&Term>) -> Ordering {
    fn rank(t: &Term) -> u8 {
        match t {
            Term::BlankNode(_) => 0,
            Term::Iri(_) => 1,
            Term::Literal(_) => 2,
        }
    }
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => rank(x).cmp(&rank(y)).then_with(|| match (x, y) {
            (Term::Literal(l), Term::Literal(m)) => {
                let by_value = match (numeric(x), numeric(y)) {
                    (Some(p), Some(q)) => p.f64().partial_cmp(&q.f64()).unwrap_or(Ordering::Equal),
                    _ => Ordering::Equal,
                };
                by_value
                    .then_with(|| l.lexical().cmp(m.lexical()))
                    .then_with(|| l.datatype().cmp(m.datatype()))
                    .then_with(|| l.language().cmp(&m.language()))
            }
            _ => x.value().cmp(y.value()),
        }),
    }
}
