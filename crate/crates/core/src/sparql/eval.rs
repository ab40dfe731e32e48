//! Query evaluation over a [`QuadStore`].
//!
//! Solutions are rows of term ids. Triple patterns are matched by index
//! lookups with the left-hand row substituted in; other group members are
//! evaluated on their own and joined. Patterns outside any GRAPH block match
//! the union of all graphs.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};

use crate::rdf::Term;
use crate::store::{QuadStore, TermId, DEFAULT_GRAPH};

use super::ast::*;
use super::expr::{ebv, eval_term, order_terms, Bindings};
use super::results::ResultTable;

const UNBOUND: TermId = TermId::MAX;

type Row = Vec<TermId>;

#[derive(Clone, Copy)]
enum Active {
    Union,
    Graph(TermId),
}

#[derive(Clone, Copy)]
enum Slot {
    Var(usize),
    Const(TermId),
    Missing,
}

struct Ctx<'s> {
    store: &'s QuadStore,
    slots: HashMap<String, usize>,
    base: TermId,
    ext: RefCell<(Vec<Term>, HashMap<Term, TermId>)>,
}

struct RowView<'c, 's> {
    ctx: &'c Ctx<'s>,
    row: &'c [TermId],
}

impl Bindings for RowView<'_, '_> {
    fn get(&self, var: &str) -> Option<Term> {
        let &slot = self.ctx.slots.get(var)?;
        match self.row[slot] {
            UNBOUND => None,
            id => Some(self.ctx.term(id)),
        }
    }
}

fn merge(a: &[TermId], b: &[TermId]) -> Option<Row> {
    let mut out = a.to_vec();
    for (x, &y) in out.iter_mut().zip(b) {
        if y == UNBOUND {
            continue;
        }
        if *x == UNBOUND {
            *x = y;
        } else if *x != y {
            return None;
        }
    }
    Some(out)
}

fn only_triples(g: &GroupPattern) -> Option<Vec<&TriplePattern>> {
    let mut out = Vec::new();
    for el in &g.elements {
        match el {
            GroupElement::Triples(ts) => out.extend(ts),
            _ => return None,
        }
    }
    Some(out)
}

impl<'s> Ctx<'s> {
    fn new(store: &'s QuadStore, vars: &[String]) -> Self {
        let slots = vars.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        Ctx { store, slots, base: store.dictionary().len() as TermId, ext: RefCell::default() }
    }

    fn width(&self) -> usize {
        self.slots.len()
    }

    fn term(&self, id: TermId) -> Term {
        if id < self.base {
            self.store.term(id).expect("store id").clone()
        } else {
            self.ext.borrow().0[(id - self.base) as usize].clone()
        }
    }

    fn intern(&self, t: Term) -> TermId {
        if let Some(id) = self.store.lookup(&t) {
            return id;
        }
        let mut ext = self.ext.borrow_mut();
        if let Some(&id) = ext.1.get(&t) {
            return id;
        }
        let id = self.base + ext.0.len() as TermId;
        ext.0.push(t.clone());
        ext.1.insert(t, id);
        id
    }

    fn eval(&self, e: &Expression, row: &[TermId]) -> Option<Term> {
        eval_term(e, &RowView { ctx: self, row })
    }

    fn holds(&self, e: &Expression, row: &[TermId]) -> bool {
        self.eval(e, row).as_ref().and_then(ebv).unwrap_or(false)
    }

    fn slot(&self, p: &TermPattern) -> Slot {
        match p {
            TermPattern::Var(v) => Slot::Var(self.slots[v.as_str()]),
            TermPattern::Term(t) => self.store.lookup(t).map_or(Slot::Missing, Slot::Const),
        }
    }

    fn zero(&self) -> Vec<Row> {
        vec![vec![UNBOUND; self.width()]]
    }

    fn group(&self, g: &GroupPattern, active: Active) -> Vec<Row> {
        self.apply(g, active, self.zero())
    }

    fn apply(&self, g: &GroupPattern, active: Active, mut rows: Vec<Row>) -> Vec<Row> {
        let mut filters = Vec::new();
        for el in &g.elements {
            if rows.is_empty() {
                break;
            }
            rows = match el {
                GroupElement::Triples(ts) => self.bgp(rows, ts.iter(), active),
                GroupElement::Optional(inner) => self.left_join(rows, inner, active),
                GroupElement::Graph(name, inner) => {
                    let right = self.graph(name, inner);
                    self.join(rows, right)
                }
                GroupElement::Group(inner) => match only_triples(inner) {
                    Some(ts) => self.bgp(rows, ts.into_iter(), active),
                    None => {
                        let right = self.group(inner, active);
                        self.join(rows, right)
                    }
                },
                GroupElement::Bind(e, v) => self.extend(rows, e, v),
                GroupElement::Filter(e) => {
                    filters.push(e);
                    rows
                }
            };
        }
        rows.retain(|r| filters.iter().all(|f| self.holds(f, r)));
        rows
    }

    fn graph(&self, name: &TermPattern, inner: &GroupPattern) -> Vec<Row> {
        match name {
            TermPattern::Term(t) => match self.store.lookup(t) {
                Some(g) => self.group(inner, Active::Graph(g)),
                None => Vec::new(),
            },
            TermPattern::Var(v) => {
                let slot = self.slots[v.as_str()];
                let mut out = Vec::new();
                for &g in self.store.index().graph_ids() {
                    if g == DEFAULT_GRAPH {
                        continue;
                    }
                    for mut row in self.group(inner, Active::Graph(g)) {
                        if row[slot] == UNBOUND {
                            row[slot] = g;
                        } else if row[slot] != g {
                            continue;
                        }
                        out.push(row);
                    }
                }
                out
            }
        }
    }

    fn bgp<'p>(
        &self,
        mut rows: Vec<Row>,
        patterns: impl Iterator<Item = &'p TriplePattern>,
        active: Active,
    ) -> Vec<Row> {
        for tp in patterns {
            let slots = [self.slot(&tp.subject), self.slot(&tp.predicate), self.slot(&tp.object)];
            let mut next = Vec::new();
            for row in &rows {
                self.match_triple(row, &slots, active, &mut next);
            }
            rows = next;
            if rows.is_empty() {
                break;
            }
        }
        rows
    }

    fn match_triple(&self, row: &Row, slots: &[Slot; 3], active: Active, out: &mut Vec<Row>) {
        let mut pat = [None; 4];
        for (i, s) in slots.iter().enumerate() {
            pat[i] = match *s {
                Slot::Missing => return,
                Slot::Const(id) => Some(id),
                Slot::Var(v) if row[v] == UNBOUND => None,
                Slot::Var(v) if row[v] >= self.base => return,
                Slot::Var(v) => Some(row[v]),
            };
        }
        let mut emit = |spo: [TermId; 3]| {
            let mut r = row.clone();
            for (i, s) in slots.iter().enumerate() {
                if let Slot::Var(v) = *s {
                    if r[v] == UNBOUND {
                        r[v] = spo[i];
                    } else if r[v] != spo[i] {
                        return;
                    }
                }
            }
            out.push(r);
        };
        match active {
            Active::Graph(g) => {
                pat[3] = Some(g);
                self.store.for_each_match(&pat, |q| emit([q[0], q[1], q[2]]));
            }
            Active::Union => {
                let mut found = Vec::new();
                self.store.for_each_match(&pat, |q| found.push([q[0], q[1], q[2]]));
                found.sort_unstable();
                found.dedup();
                found.into_iter().for_each(emit);
            }
        }
    }

    fn left_join(&self, rows: Vec<Row>, inner: &GroupPattern, active: Active) -> Vec<Row> {
        let filters: Vec<&Expression> = inner
            .elements
            .iter()
            .filter_map(|e| match e {
                GroupElement::Filter(f) => Some(f),
                _ => None,
            })
            .collect();
        let body = GroupPattern {
            elements: inner.elements.iter().filter(|e| !matches!(e, GroupElement::Filter(_))).cloned().collect(),
        };
        let keep = |r: &Row| filters.iter().all(|f| self.holds(f, r));
        let mut out = Vec::with_capacity(rows.len());
        if let Some(ts) = only_triples(&body) {
            for row in rows {
                let mut ext = self.bgp(vec![row.clone()], ts.iter().copied(), active);
                ext.retain(|r| keep(r));
                if ext.is_empty() {
                    out.push(row);
                } else {
                    out.extend(ext);
                }
            }
            return out;
        }
        let right = self.group(&body, active);
        for row in rows {
            let before = out.len();
            for r in &right {
                if let Some(m) = merge(&row, r) {
                    if keep(&m) {
                        out.push(m);
                    }
                }
            }
            if out.len() == before {
                out.push(row);
            }
        }
        out
    }

    fn join(&self, left: Vec<Row>, right: Vec<Row>) -> Vec<Row> {
        if left.is_empty() || right.is_empty() {
            return Vec::new();
        }
        let key: Vec<usize> = (0..self.width())
            .filter(|&i| left.iter().all(|r| r[i] != UNBOUND) && right.iter().all(|r| r[i] != UNBOUND))
            .collect();
        let mut out = Vec::new();
        if key.is_empty() {
            for l in &left {
                out.extend(right.iter().filter_map(|r| merge(l, r)));
            }
            return out;
        }
        let mut table: HashMap<Vec<TermId>, Vec<usize>> = HashMap::new();
        for (i, r) in right.iter().enumerate() {
            table.entry(key.iter().map(|&k| r[k]).collect()).or_default().push(i);
        }
        for l in &left {
            let k: Vec<TermId> = key.iter().map(|&k| l[k]).collect();
            if let Some(idx) = table.get(&k) {
                out.extend(idx.iter().filter_map(|&i| merge(l, &right[i])));
            }
        }
        out
    }

    /// BIND / projection assignment. Assigning to an already-bound variable
    /// keeps the row only when the values agree.
    fn extend(&self, rows: Vec<Row>, e: &Expression, var: &str) -> Vec<Row> {
        let slot = self.slots[var];
        rows.into_iter()
            .filter_map(|mut row| {
                let Some(value) = self.eval(e, &row) else {
                    return Some(row);
                };
                let id = self.intern(value);
                if row[slot] == UNBOUND {
                    row[slot] = id;
                    Some(row)
                } else {
                    (row[slot] == id).then_some(row)
                }
            })
            .collect()
    }
}

fn all_vars(q: &Query) -> Vec<String> {
    let mut vars = q.where_clause.vars();
    let mut add = |v: &str| {
        if !vars.iter().any(|x| x == v) {
            vars.push(v.to_string());
        }
    };
    if let Projection::Items(items) = &q.projection {
        for it in items {
            add(it.var());
            if let SelectItem::Expr(e, _) = it {
                let mut used = Vec::new();
                e.vars(&mut used);
                used.into_iter().for_each(&mut add);
            }
        }
    }
    for k in &q.order_by {
        add(&k.var);
    }
    fn filter_vars(g: &GroupPattern, add: &mut dyn FnMut(&str)) {
        for el in &g.elements {
            match el {
                GroupElement::Filter(e) | GroupElement::Bind(e, _) => {
                    let mut used = Vec::new();
                    e.vars(&mut used);
                    used.into_iter().for_each(&mut *add);
                }
                GroupElement::Optional(inner) | GroupElement::Group(inner) | GroupElement::Graph(_, inner) => {
                    filter_vars(inner, add)
                }
                GroupElement::Triples(_) => {}
            }
        }
    }
    filter_vars(&q.where_clause, &mut add);
    vars
}

/// Evaluates a parsed query. Never fails on data.
pub fn evaluate(q: &Query, store: &QuadStore) -> ResultTable {
    let vars = all_vars(q);
    let ctx = Ctx::new(store, &vars);
    let mut rows = ctx.group(&q.where_clause, Active::Union);

    let columns: Vec<String> = match &q.projection {
        Projection::All => q.where_clause.vars(),
        Projection::Items(items) => {
            for it in items {
                if let SelectItem::Expr(e, v) = it {
                    rows = ctx.extend(rows, e, v);
                }
            }
            items.iter().map(|i| i.var().to_string()).collect()
        }
    };

    if !q.order_by.is_empty() {
        let keys: Vec<(usize, bool)> = q.order_by.iter().map(|k| (ctx.slots[k.var.as_str()], k.descending)).collect();
        let mut decoded: Vec<(Vec<Option<Term>>, Row)> = rows
            .into_iter()
            .map(|r| {
                let k = keys.iter().map(|&(s, _)| (r[s] != UNBOUND).then(|| ctx.term(r[s]))).collect();
                (k, r)
            })
            .collect();
        decoded.sort_by(|(a, _), (b, _)| {
            keys.iter()
                .enumerate()
                .map(|(i, &(_, desc))| {
                    let o = order_terms(a[i].as_ref(), b[i].as_ref());
                    if desc {
                        o.reverse()
                    } else {
                        o
                    }
                })
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        rows = decoded.into_iter().map(|(_, r)| r).collect();
    }

    let col_slots: Vec<usize> = columns.iter().map(|c| ctx.slots[c.as_str()]).collect();
    let mut projected: Vec<Row> = rows.iter().map(|r| col_slots.iter().map(|&s| r[s]).collect()).collect();
    if q.distinct {
        let mut seen = HashSet::new();
        projected.retain(|r| seen.insert(r.clone()));
    }
    let offset = q.offset.unwrap_or(0);
    let limit = q.limit.unwrap_or(usize::MAX);
    let rows = projected
        .into_iter()
        .skip(offset)
        .take(limit)
        .map(|r| r.into_iter().map(|id| (id != UNBOUND).then(|| ctx.term(id))).collect())
        .collect();
    ResultTable { columns, rows }
}
