//! Query syntax tree and its canonical text form.
//!
//! `Display` prints every IRI in full and every compound expression in
//! parentheses, so printing then re-parsing yields an identical tree.

use std::fmt::{self, Write as _};

use crate::rdf::{rdf_ns, PrefixMap, Term};

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub prefixes: PrefixMap,
    pub distinct: bool,
    pub projection: Projection,
    pub where_clause: GroupPattern,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    All,
    Items(Vec<SelectItem>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectItem {
    Var(String),
    Expr(Expression, String),
}

impl SelectItem {
    pub fn var(&self) -> &str {
        match self {
            SelectItem::Var(v) | SelectItem::Expr(_, v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderKey {
    pub var: String,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermPattern {
    Var(String),
    Term(Term),
}

impl TermPattern {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            TermPattern::Var(v) => Some(v),
            TermPattern::Term(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: TermPattern,
    pub predicate: TermPattern,
    pub object: TermPattern,
}

impl TriplePattern {
    pub fn positions(&self) -> [&TermPattern; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroupPattern {
    pub elements: Vec<GroupElement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Triples(Vec<TriplePattern>),
    Optional(GroupPattern),
    Graph(TermPattern, GroupPattern),
    Group(GroupPattern),
    Bind(Expression, String),
    Filter(Expression),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Coalesce,
    If,
    Strlen,
    Replace,
    StrBefore,
    StrAfter,
    Contains,
    StrStarts,
    Str,
    Lcase,
    Ucase,
    Bound,
    IsIri,
    IsLiteral,
}

impl Builtin {
    pub const ALL: [Builtin; 14] = [
        Builtin::Coalesce,
        Builtin::If,
        Builtin::Strlen,
        Builtin::Replace,
        Builtin::StrBefore,
        Builtin::StrAfter,
        Builtin::Contains,
        Builtin::StrStarts,
        Builtin::Str,
        Builtin::Lcase,
        Builtin::Ucase,
        Builtin::Bound,
        Builtin::IsIri,
        Builtin::IsLiteral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Coalesce => "COALESCE",
            Builtin::If => "IF",
            Builtin::Strlen => "STRLEN",
            Builtin::Replace => "REPLACE",
            Builtin::StrBefore => "STRBEFORE",
            Builtin::StrAfter => "STRAFTER",
            Builtin::Contains => "CONTAINS",
            Builtin::StrStarts => "STRSTARTS",
            Builtin::Str => "STR",
            Builtin::Lcase => "LCASE",
            Builtin::Ucase => "UCASE",
            Builtin::Bound => "BOUND",
            Builtin::IsIri => "ISIRI",
            Builtin::IsLiteral => "ISLITERAL",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        let upper = name.to_ascii_uppercase();
        if upper == "ISURI" {
            return Some(Builtin::IsIri);
        }
        Builtin::ALL.into_iter().find(|b| b.name() == upper)
    }

    /// Accepted argument counts, inclusive.
    pub fn arity(self) -> (usize, usize) {
        match self {
            Builtin::Coalesce => (1, usize::MAX),
            Builtin::If => (3, 3),
            Builtin::Replace => (3, 4),
            Builtin::StrBefore | Builtin::StrAfter | Builtin::Contains | Builtin::StrStarts => (2, 2),
            _ => (1, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Var(String),
    Term(Term),
    Or(Box<Expression>, Box<Expression>),
    And(Box<Expression>, Box<Expression>),
    Not(Box<Expression>),
    Neg(Box<Expression>),
    Compare(CompareOp, Box<Expression>, Box<Expression>),
    Arith(ArithOp, Box<Expression>, Box<Expression>),
    In { needle: Box<Expression>, list: Vec<Expression>, negated: bool },
    Call(Builtin, Vec<Expression>),
}

impl Expression {
    /// Variables mentioned anywhere in the expression.
    pub fn vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expression::Var(v) => out.push(v),
            Expression::Term(_) => {}
            Expression::Or(a, b)
            | Expression::And(a, b)
            | Expression::Compare(_, a, b)
            | Expression::Arith(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Expression::Not(a) | Expression::Neg(a) => a.vars(out),
            Expression::In { needle, list, .. } => {
                needle.vars(out);
                list.iter().for_each(|e| e.vars(out));
            }
            Expression::Call(_, args) => args.iter().for_each(|e| e.vars(out)),
        }
    }
}

impl GroupPattern {
    /// Variables that may be bound by solutions of this pattern, in first-seen order.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        let mut add = |v: &str| {
            if !out.iter().any(|o| o == v) {
                out.push(v.to_string());
            }
        };
        for el in &self.elements {
            match el {
                GroupElement::Triples(ts) => {
                    for t in ts {
                        t.positions().iter().filter_map(|p| p.as_var()).for_each(&mut add);
                    }
                }
                GroupElement::Bind(_, v) => add(v),
                GroupElement::Filter(_) => {}
                GroupElement::Graph(g, inner) => {
                    if let Some(v) = g.as_var() {
                        add(v);
                    }
                    let mut nested = Vec::new();
                    inner.collect_vars(&mut nested);
                    nested.iter().for_each(|v| add(v));
                }
                GroupElement::Optional(inner) | GroupElement::Group(inner) => {
                    let mut nested = Vec::new();
                    inner.collect_vars(&mut nested);
                    nested.iter().for_each(|v| add(v));
                }
            }
        }
    }

    /// Counts elements of each kind recursively: (GRAPH, OPTIONAL, BIND, FILTER).
    pub fn census(&self) -> Census {
        let mut c = Census::default();
        self.census_into(&mut c);
        c
    }

    fn census_into(&self, c: &mut Census) {
        for el in &self.elements {
            match el {
                GroupElement::Triples(ts) => c.triple_patterns += ts.len(),
                GroupElement::Optional(g) => {
                    c.optionals += 1;
                    g.census_into(c);
                }
                GroupElement::Graph(_, g) => {
                    c.graphs += 1;
                    g.census_into(c);
                }
                GroupElement::Group(g) => g.census_into(c),
                GroupElement::Bind(..) => c.binds += 1,
                GroupElement::Filter(e) => {
                    c.filters += 1;
                    if matches!(e, Expression::In { .. }) {
                        c.filter_ins += 1;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Census {
    pub triple_patterns: usize,
    pub graphs: usize,
    pub optionals: usize,
    pub binds: usize,
    pub filters: usize,
    pub filter_ins: usize,
}

impl fmt::Display for TermPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermPattern::Var(v) => write!(f, "?{v}"),
            TermPattern::Term(t) => t.fmt(f),
        }
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pred = match &self.predicate {
            TermPattern::Term(Term::Iri(i)) if i.as_str() == rdf_ns::TYPE => "a".to_string(),
            p => p.to_string(),
        };
        write!(f, "{} {} {} .", self.subject, pred, self.object)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Var(v) => write!(f, "?{v}"),
            Expression::Term(t) => t.fmt(f),
            Expression::Or(a, b) => write!(f, "({a} || {b})"),
            Expression::And(a, b) => write!(f, "({a} && {b})"),
            Expression::Not(a) => write!(f, "(!{a})"),
            Expression::Neg(a) => write!(f, "(-{a})"),
            Expression::Compare(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expression::Arith(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expression::In { needle, list, negated } => {
                write!(f, "({needle} {}IN (", if *negated { "NOT " } else { "" })?;
                write_list(f, list)?;
                f.write_str("))")
            }
            Expression::Call(b, args) => {
                write!(f, "{}(", b.name())?;
                write_list(f, args)?;
                f.write_char(')')
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[Expression]) -> fmt::Result {
    for (i, e) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

fn indent(f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
    for _ in 0..depth {
        f.write_str("  ")?;
    }
    Ok(())
}

impl GroupPattern {
    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        f.write_str("{\n")?;
        for el in &self.elements {
            match el {
                GroupElement::Triples(ts) => {
                    for t in ts {
                        indent(f, depth + 1)?;
                        writeln!(f, "{t}")?;
                    }
                }
                GroupElement::Optional(g) => {
                    indent(f, depth + 1)?;
                    f.write_str("OPTIONAL ")?;
                    g.write(f, depth + 1)?;
                    f.write_char('\n')?;
                }
                GroupElement::Graph(name, g) => {
                    indent(f, depth + 1)?;
                    write!(f, "GRAPH {name} ")?;
                    g.write(f, depth + 1)?;
                    f.write_char('\n')?;
                }
                GroupElement::Group(g) => {
                    indent(f, depth + 1)?;
                    g.write(f, depth + 1)?;
                    f.write_char('\n')?;
                }
                GroupElement::Bind(e, v) => {
                    indent(f, depth + 1)?;
                    writeln!(f, "BIND ({e} AS ?{v})")?;
                }
                GroupElement::Filter(e) => {
                    indent(f, depth + 1)?;
                    writeln!(f, "FILTER ({e})")?;
                }
            }
        }
        indent(f, depth)?;
        f.write_char('}')
    }
}

impl fmt::Display for GroupPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, ns) in self.prefixes.iter() {
            writeln!(f, "PREFIX {label}: <{ns}>")?;
        }
        f.write_str("SELECT ")?;
        if self.distinct {
            f.write_str("DISTINCT ")?;
        }
        match &self.projection {
            Projection::All => f.write_char('*')?,
            Projection::Items(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_char(' ')?;
                    }
                    match item {
                        SelectItem::Var(v) => write!(f, "?{v}")?,
                        SelectItem::Expr(e, v) => write!(f, "({e} AS ?{v})")?,
                    }
                }
            }
        }
        f.write_str("\nWHERE ")?;
        self.where_clause.write(f, 0)?;
        if !self.order_by.is_empty() {
            f.write_str("\nORDER BY")?;
            for k in &self.order_by {
                if k.descending {
                    write!(f, " DESC(?{})", k.var)?;
                } else {
                    write!(f, " ?{}", k.var)?;
                }
            }
        }
        if let Some(n) = self.limit {
            write!(f, "\nLIMIT {n}")?;
        }
        if let Some(n) = self.offset {
            write!(f, "\nOFFSET {n}")?;
        }
        f.write_char('\n')
    }
}
