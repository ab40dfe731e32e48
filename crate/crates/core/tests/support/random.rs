//! Seeded random quads, stores and queries.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use variantkg_core::rdf::{BlankNode, GraphName, Iri, Literal, Quad, Subject, Term};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const TRICKY_STRINGS: &[&str] = &[
    "",
    "plain",
    "with \"quotes\"",
    "back\\slash",
    "line\nbreak",
    "carriage\rreturn",
    "tab\there",
    "caf\u{e9}",
    "\u{1F9EC} helix",
    "<not an iri>",
    "semi;colon,comma|pipe",
    "trailing space ",
    "\u{0}nul",
    "# not a comment",
    "_:b0",
];

pub const LANGS: &[&str] = &["en", "fr", "en-US", "de-CH-1996"];

pub fn random_iri(rng: &mut impl Rng, pool: usize) -> Iri {
    match rng.random_range(0..4) {
        0 => Iri::new(format!("http://example.org/s/{}", rng.random_range(0..pool))).unwrap(),
        1 => Iri::new(format!("urn:uuid:{:08x}-{}", rng.random_range(0..pool as u32), rng.random_range(0..3))).unwrap(),
        2 => {
            Iri::new(format!("https://www.ncbi.nlm.nih.gov/sra/?term=SRR{}", 100 + rng.random_range(0..pool))).unwrap()
        }
        _ => Iri::new(format!("http://example.org/caf\u{e9}/{}#frag", rng.random_range(0..pool))).unwrap(),
    }
}

pub fn random_literal(rng: &mut impl Rng) -> Literal {
    match rng.random_range(0..7) {
        0 | 1 => Literal::string(*TRICKY_STRINGS.choose(rng).unwrap()),
        2 => Literal::lang(*TRICKY_STRINGS.choose(rng).unwrap(), *LANGS.choose(rng).unwrap()).unwrap(),
        3 => Literal::integer(rng.random_range(-1_000_000..1_000_000)),
        4 => Literal::double(rng.random_range(-1e6..1e6)),
        5 => Literal::boolean(rng.random()),
        _ => Literal::typed(
            format!("{}", rng.random_range(0.0..100.0f32)),
            Iri::new("http://www.w3.org/2001/XMLSchema#float").unwrap(),
        ),
    }
}

/// Quads with tricky strings, language tags, blank nodes and several graphs.
pub fn random_quad(rng: &mut impl Rng, pool: usize) -> Quad {
    let subject: Subject = if rng.random_bool(0.2) {
        BlankNode::new(format!("b{}", rng.random_range(0..pool))).unwrap().into()
    } else {
        random_iri(rng, pool).into()
    };
    let predicate = Iri::new(format!("http://example.org/p/{}", rng.random_range(0..8))).unwrap();
    let object: Term = match rng.random_range(0..4) {
        0 => random_iri(rng, pool).into(),
        1 => BlankNode::new(format!("b{}", rng.random_range(0..pool))).unwrap().into(),
        _ => random_literal(rng).into(),
    };
    let graph = match rng.random_range(0..5) {
        0 => GraphName::Default,
        g => GraphName::Named(Iri::new(format!("sg://SRR{}", 13_112_990 + g)).unwrap()),
    };
    Quad::new(subject, predicate, object, graph)
}

pub fn random_quads(rng: &mut impl Rng, n: usize, pool: usize) -> Vec<Quad> {
    (0..n).map(|_| random_quad(rng, pool)).collect()
}

const P: &str = "http://q.example/p";
const G: &str = "http://q.example/g";

fn s_iri(i: usize) -> String {
    format!("http://q.example/s{i}")
}

/// A small, densely connected store for query testing: few subjects,
/// predicates and graphs so joins and optionals actually hit.
pub fn query_store(rng: &mut impl Rng, n: usize) -> Vec<Quad> {
    let subjects = 12;
    (0..n)
        .map(|_| {
            let subject: Subject = if rng.random_bool(0.1) {
                BlankNode::new(format!("n{}", rng.random_range(0..3))).unwrap().into()
            } else {
                Iri::new(s_iri(rng.random_range(0..subjects))).unwrap().into()
            };
            let p = rng.random_range(0..5);
            let predicate = Iri::new(format!("{P}{p}")).unwrap();
            let object: Term = match p {
                0 => Iri::new(s_iri(rng.random_range(0..subjects))).unwrap().into(),
                1 => Literal::integer(rng.random_range(0..10)).into(),
                2 => Literal::string(["alpha", "beta", "gamma", "Alpha", "s1"][rng.random_range(0..5)]).into(),
                3 => Literal::lang(["red", "rouge"][rng.random_range(0..2)], ["en", "fr"][rng.random_range(0..2)])
                    .unwrap()
                    .into(),
                _ => Literal::double([0.5, 1.0, 2.5, 10.0][rng.random_range(0..4)]).into(),
            };
            let graph = match rng.random_range(0..4) {
                0 => GraphName::Default,
                g => GraphName::Named(Iri::new(format!("{G}{g}")).unwrap()),
            };
            Quad::new(subject, predicate, object, graph)
        })
        .collect()
}

/// Random query text over the vocabulary of [`query_store`].
pub struct QueryGen<'r, R: Rng> {
    rng: &'r mut R,
    bound: Vec<String>,
    fresh: usize,
}

impl<'r, R: Rng> QueryGen<'r, R> {
    pub fn new(rng: &'r mut R) -> Self {
        QueryGen { rng, bound: Vec::new(), fresh: 0 }
    }

    fn var(&mut self) -> String {
        self.bound.choose(self.rng).cloned().unwrap_or_else(|| "a".into())
    }

    fn new_var(&mut self) -> String {
        let v = ["a", "b", "c", "d", "e"][self.rng.random_range(0..5)].to_string();
        if !self.bound.contains(&v) {
            self.bound.push(v.clone());
        }
        v
    }

    fn object(&mut self, p: usize) -> String {
        if self.rng.random_bool(0.75) {
            return format!("?{}", self.new_var());
        }
        match p {
            0 => format!("<{}>", s_iri(self.rng.random_range(0..12))),
            1 => format!("{}", self.rng.random_range(0..10)),
            2 => "\"alpha\"".into(),
            3 => "\"red\"@en".into(),
            _ => "2.5e0".into(),
        }
    }

    /// A triple pattern whose subject is already bound, keeping joins connected.
    fn triple(&mut self) -> String {
        let s = if self.bound.is_empty() || self.rng.random_bool(0.1) {
            if !self.bound.is_empty() && self.rng.random_bool(0.2) {
                format!("<{}>", s_iri(self.rng.random_range(0..12)))
            } else {
                format!("?{}", self.new_var())
            }
        } else {
            format!("?{}", self.var())
        };
        let p = self.rng.random_range(0..5);
        let pred = if self.rng.random_bool(0.05) { format!("?{}", self.new_var()) } else { format!("<{P}{p}>") };
        let o = self.object(p);
        format!("{s} {pred} {o} .")
    }

    fn constant(&mut self) -> String {
        match self.rng.random_range(0..7) {
            0 => format!("{}", self.rng.random_range(0..10)),
            1 => "\"alpha\"".into(),
            2 => format!("<{}>", s_iri(self.rng.random_range(0..12))),
            3 => "\"red\"@en".into(),
            4 => "2.5".into(),
            5 => "true".into(),
            _ => "\"s\"".into(),
        }
    }

    pub fn expr(&mut self, depth: usize) -> String {
        let v = self.var();
        let pick = if depth == 0 { self.rng.random_range(0..9) } else { self.rng.random_range(0..14) };
        match pick {
            0 => format!("?{v} {} {}", ["=", "!=", "<", ">=", "<=", ">"][self.rng.random_range(0..6)], self.constant()),
            1 => format!("BOUND(?{v})"),
            2 => format!("isIRI(?{v})"),
            3 => format!("isLiteral(?{v})"),
            4 => format!("STRSTARTS(STR(?{v}), \"{}\")", ["http", "a", "s1", "r"][self.rng.random_range(0..4)]),
            5 => format!("?{v} IN ({}, {})", self.constant(), self.constant()),
            6 => format!("?{v} NOT IN ({})", self.constant()),
            7 => format!("(?{v} + {}) > {}", self.rng.random_range(0..3), self.rng.random_range(0..10)),
            8 => format!("CONTAINS(LCASE(STR(?{v})), \"a\")"),
            9 => format!("({}) && ({})", self.expr(depth - 1), self.expr(depth - 1)),
            10 => format!("({}) || ({})", self.expr(depth - 1), self.expr(depth - 1)),
            11 => format!("!({})", self.expr(depth - 1)),
            12 => format!("IF({}, true, false)", self.expr(depth - 1)),
            _ => format!("COALESCE(?{v}, {}) = {}", self.constant(), self.constant()),
        }
    }

    fn value_expr(&mut self) -> String {
        let v = self.var();
        match self.rng.random_range(0..6) {
            0 => format!("STRLEN(STR(?{v}))"),
            1 => format!("UCASE(STR(?{v}))"),
            2 => format!("COALESCE(?{v}, \"none\")"),
            3 => format!("?{v} * 2"),
            4 => format!("STRAFTER(STR(?{v}), \"s\")"),
            _ => format!("REPLACE(STR(?{v}), \"[aeiou]\", \"_\")"),
        }
    }

    fn group(&mut self, depth: usize) -> String {
        let mut parts = vec![self.triple()];
        for _ in 0..self.rng.random_range(0..4) {
            let kind = self.rng.random_range(0..if depth == 0 { 4 } else { 7 });
            let part = match kind {
                0 | 1 => self.triple(),
                2 => format!("FILTER ({})", self.expr(1)),
                3 => {
                    let e = self.value_expr();
                    let name = if self.rng.random_bool(0.15) {
                        self.var()
                    } else {
                        self.fresh += 1;
                        format!("x{}", self.fresh)
                    };
                    if !self.bound.contains(&name) {
                        self.bound.push(name.clone());
                    }
                    format!("BIND ({e} AS ?{name})")
                }
                4 => {
                    let inner = self.group(depth - 1);
                    let cond =
                        if self.rng.random_bool(0.3) { format!(" FILTER ({})", self.expr(0)) } else { String::new() };
                    format!("OPTIONAL {{ {inner}{cond} }}")
                }
                5 => {
                    let g = if self.rng.random_bool(0.6) {
                        "?g".to_string()
                    } else {
                        format!("<{G}{}>", self.rng.random_range(1..5))
                    };
                    if g == "?g" && !self.bound.contains(&"g".to_string()) {
                        self.bound.push("g".into());
                    }
                    format!("GRAPH {g} {{ {} }}", self.group(depth - 1))
                }
                _ => format!("{{ {} }}", self.group(depth - 1)),
            };
            parts.push(part);
        }
        parts.join("\n")
    }

    /// Returns the query text and whether its row order is fully determined.
    pub fn query(mut self) -> (String, bool) {
        let body = self.group(2);
        let all = self.bound.clone();
        let distinct = if self.rng.random_bool(0.3) { "DISTINCT " } else { "" };
        let (projection, cols): (String, Vec<String>) = if self.rng.random_bool(0.2) {
            ("*".into(), all.clone())
        } else {
            let k = self.rng.random_range(1..=all.len());
            let mut cols: Vec<String> = all.choose_multiple(self.rng, k).cloned().collect();
            let mut text: Vec<String> = cols.iter().map(|c| format!("?{c}")).collect();
            if self.rng.random_bool(0.3) {
                let e = self.value_expr();
                text.push(format!("({e} AS ?out)"));
                cols.push("out".into());
            }
            (text.join(" "), cols)
        };
        let mut tail = String::new();
        let ordered = self.rng.random_bool(0.5);
        if ordered {
            let keys: Vec<String> = cols
                .iter()
                .map(|c| if self.rng.random_bool(0.3) { format!("DESC(?{c})") } else { format!("?{c}") })
                .collect();
            tail = format!("\nORDER BY {}", keys.join(" "));
            if self.rng.random_bool(0.5) {
                tail += &format!(" LIMIT {}", self.rng.random_range(0..20));
            }
            if self.rng.random_bool(0.3) {
                tail += &format!(" OFFSET {}", self.rng.random_range(0..5));
            }
        }
        (format!("SELECT {distinct}{projection}\nWHERE {{\n{body}\n}}{tail}"), ordered)
    }
}
