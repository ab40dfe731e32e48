//! Reference evaluator: every triple pattern is matched by scanning the
//! full quad list, solutions are hash maps, and every group member is
//! evaluated on its own and joined. Slow but obviously correct.

use std::collections::{HashMap, HashSet};

use variantkg_core::rdf::{GraphName, Quad, Term};
use variantkg_core::sparql::ast::{
    Expression, GroupElement, GroupPattern, Projection, Query, SelectItem, TermPattern, TriplePattern,
};
use variantkg_core::sparql::expr::{ebv, eval_term, order_terms};
use variantkg_core::sparql::{evaluate, parse_query};
use variantkg_core::store::QuadStore;

use super::multiset;
use super::random::{query_store, rng, QueryGen};

pub type Solution = HashMap<String, Term>;

#[derive(Clone, Copy, PartialEq)]
enum Scope<'a> {
    Union,
    Graph(&'a Term),
}

pub struct NaiveEngine {
    /// (s, p, o, graph); graph `None` is the default graph.
    quads: Vec<(Term, Term, Term, Option<Term>)>,
    union: Vec<(Term, Term, Term)>,
    named: Vec<Term>,
}

fn compatible(a: &Solution, b: &Solution) -> Option<Solution> {
    let mut out = a.clone();
    for (k, v) in b {
        match out.get(k) {
            Some(x) if x != v => return None,
            Some(_) => {}
            None => {
                out.insert(k.clone(), v.clone());
            }
        }
    }
    Some(out)
}

fn holds(e: &Expression, row: &Solution) -> bool {
    eval_term(e, row).as_ref().and_then(ebv).unwrap_or(false)
}

fn bind_pos(p: &TermPattern, t: &Term, row: &mut Solution) -> bool {
    match p {
        TermPattern::Term(c) => c == t,
        TermPattern::Var(v) => match row.get(v) {
            Some(x) => x == t,
            None => {
                row.insert(v.clone(), t.clone());
                true
            }
        },
    }
}

impl NaiveEngine {
    pub fn new(quads: &[Quad]) -> Self {
        let quads: Vec<_> = quads
            .iter()
            .map(|q| {
                let g = match &q.graph {
                    GraphName::Default => None,
                    GraphName::Named(i) => Some(Term::Iri(i.clone())),
                };
                (Term::from(q.subject.clone()), Term::Iri(q.predicate.clone()), q.object.clone(), g)
            })
            .collect();
        let mut seen = HashSet::new();
        let mut union = Vec::new();
        let mut named = Vec::new();
        let mut seen_g = HashSet::new();
        for (s, p, o, g) in &quads {
            if seen.insert((s.clone(), p.clone(), o.clone())) {
                union.push((s.clone(), p.clone(), o.clone()));
            }
            if let Some(g) = g {
                if seen_g.insert(g.clone()) {
                    named.push(g.clone());
                }
            }
        }
        NaiveEngine { quads, union, named }
    }

    fn triples<'a>(&'a self, scope: Scope<'a>) -> Box<dyn Iterator<Item = (&'a Term, &'a Term, &'a Term)> + 'a> {
        match scope {
            Scope::Union => Box::new(self.union.iter().map(|(s, p, o)| (s, p, o))),
            Scope::Graph(g) => {
                Box::new(self.quads.iter().filter(move |q| q.3.as_ref() == Some(g)).map(|(s, p, o, _)| (s, p, o)))
            }
        }
    }

    fn triple(&self, tp: &TriplePattern, scope: Scope<'_>) -> Vec<Solution> {
        let mut out = Vec::new();
        for (s, p, o) in self.triples(scope) {
            let mut row = Solution::new();
            if bind_pos(&tp.subject, s, &mut row)
                && bind_pos(&tp.predicate, p, &mut row)
                && bind_pos(&tp.object, o, &mut row)
            {
                out.push(row);
            }
        }
        out
    }

    fn join(left: Vec<Solution>, right: &[Solution]) -> Vec<Solution> {
        let mut out = Vec::new();
        for l in &left {
            for r in right {
                if let Some(m) = compatible(l, r) {
                    out.push(m);
                }
            }
        }
        out
    }

    fn group(&self, g: &GroupPattern, scope: Scope<'_>) -> Vec<Solution> {
        let mut rows = vec![Solution::new()];
        let mut filters = Vec::new();
        for el in &g.elements {
            rows = match el {
                GroupElement::Triples(ts) => {
                    let mut rows = rows;
                    for tp in ts {
                        rows = Self::join(rows, &self.triple(tp, scope));
                    }
                    rows
                }
                GroupElement::Group(inner) => Self::join(rows, &self.group(inner, scope)),
                GroupElement::Graph(name, inner) => {
                    let right: Vec<Solution> = match name {
                        TermPattern::Term(t) => {
                            if self.named.contains(t) {
                                self.group(inner, Scope::Graph(t))
                            } else {
                                Vec::new()
                            }
                        }
                        TermPattern::Var(v) => {
                            let mut out = Vec::new();
                            for gname in &self.named {
                                let tag: Solution = [(v.clone(), gname.clone())].into_iter().collect();
                                for r in self.group(inner, Scope::Graph(gname)) {
                                    if let Some(m) = compatible(&r, &tag) {
                                        out.push(m);
                                    }
                                }
                            }
                            out
                        }
                    };
                    Self::join(rows, &right)
                }
                GroupElement::Optional(inner) => {
                    let conds: Vec<&Expression> = inner
                        .elements
                        .iter()
                        .filter_map(|e| if let GroupElement::Filter(f) = e { Some(f) } else { None })
                        .collect();
                    let body = GroupPattern {
                        elements: inner
                            .elements
                            .iter()
                            .filter(|e| !matches!(e, GroupElement::Filter(_)))
                            .cloned()
                            .collect(),
                    };
                    let right = self.group(&body, scope);
                    let mut out = Vec::new();
                    for l in rows {
                        let mut any = false;
                        for r in &right {
                            if let Some(m) = compatible(&l, r) {
                                if conds.iter().all(|c| holds(c, &m)) {
                                    out.push(m);
                                    any = true;
                                }
                            }
                        }
                        if !any {
                            out.push(l);
                        }
                    }
                    out
                }
                GroupElement::Bind(e, v) => rows.into_iter().filter_map(|r| extend(r, e, v)).collect(),
                GroupElement::Filter(e) => {
                    filters.push(e);
                    rows
                }
            };
        }
        rows.retain(|r| filters.iter().all(|f| holds(f, r)));
        rows
    }

    /// Result columns and rows, in the order the query defines.
    pub fn run(&self, q: &Query) -> (Vec<String>, Vec<Vec<Option<Term>>>) {
        let mut rows = self.group(&q.where_clause, Scope::Union);
        let columns: Vec<String> = match &q.projection {
            Projection::All => q.where_clause.vars(),
            Projection::Items(items) => {
                for it in items {
                    if let SelectItem::Expr(e, v) = it {
                        rows = rows.into_iter().filter_map(|r| extend(r, e, v)).collect();
                    }
                }
                items.iter().map(|i| i.var().to_string()).collect()
            }
        };
        rows.sort_by(|a, b| {
            for k in &q.order_by {
                let o = order_terms(a.get(&k.var), b.get(&k.var));
                let o = if k.descending { o.reverse() } else { o };
                if o.is_ne() {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        });
        let mut out: Vec<Vec<Option<Term>>> =
            rows.iter().map(|r| columns.iter().map(|c| r.get(c).cloned()).collect()).collect();
        if q.distinct {
            let mut seen = HashSet::new();
            out.retain(|r| seen.insert(r.clone()));
        }
        let out = out.into_iter().skip(q.offset.unwrap_or(0)).take(q.limit.unwrap_or(usize::MAX)).collect();
        (columns, out)
    }
}

fn extend(mut row: Solution, e: &Expression, v: &str) -> Option<Solution> {
    let Some(value) = eval_term(e, &row) else {
        return Some(row);
    };
    match row.get(v) {
        Some(x) => (x == &value).then_some(row),
        None => {
            row.insert(v.to_string(), value);
            Some(row)
        }
    }
}

/// Runs `count` random queries and returns how many produced at least one row.
pub fn check_random_queries(seed: u64, count: usize) -> usize {
    let mut r = rng(seed);
    let mut non_empty = 0;
    for i in 0..count {
        let size = [150, 400, 900, 2000][i % 4];
        let quads = query_store(&mut r, size);
        let mut store = QuadStore::new();
        store.bulk_load(quads.iter().cloned()).unwrap();
        let naive = NaiveEngine::new(&quads);
        let (text, ordered) = QueryGen::new(&mut r).query();
        let q = parse_query(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        let got = evaluate(&q, &store);
        let (cols, want) = naive.run(&q);
        assert_eq!(got.columns, cols, "{text}");
        if ordered {
            assert_eq!(got.rows, want, "{text}");
        } else {
            assert_eq!(multiset(got.rows.clone()), multiset(want.clone()), "{text}");
        }
        non_empty += usize::from(!want.is_empty());
    }
    non_empty
}
