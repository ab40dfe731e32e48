use std::collections::HashMap;

use crate::rdf::{GraphName, Iri, Quad, Subject, Term};
use crate::store::{QuadPattern, QuadStore};

use super::vocab;

type Key = (String, String, u64, String, String);

fn object_of(store: &QuadStore, subject: &Subject, predicate: &str, graph: &GraphName) -> Option<Term> {
    let pat = QuadPattern {
        subject: Some(subject.to_term()),
        predicate: Some(Term::Iri(vocab::iri(predicate))),
        object: None,
        graph: Some(graph.clone()),
    };
    store.match_pattern(&pat).into_iter().next().map(|q| q.object)
}

fn iri_suffix<'t>(term: &'t Term, ns: &str) -> Option<&'t str> {
    term.as_iri()?.as_str().strip_prefix(ns)
}

/// Materializes `(origin, has_cadd_scores, cadd-node)` in the accession's
/// graph for every VCF origin and CADD variant of the same accession that
/// agree on chromosome, position, REF and ALT.
pub fn link_cadd_to_origins(store: &QuadStore) -> Vec<Quad> {
    let position = QuadPattern { predicate: Some(Term::Iri(vocab::iri(vocab::FALDO_POSITION))), ..Default::default() };
    let mut origins: HashMap<Key, Vec<(Subject, Iri)>> = HashMap::new();
    for q in store.match_pattern(&position) {
        let GraphName::Named(g) = &q.graph else { continue };
        let Some(acc) = vocab::accession_of_graph(g.as_str()) else { continue };
        let Some(pos) = q.object.as_literal().and_then(|l| l.lexical().parse().ok()) else { continue };
        let chrom = object_of(store, &q.subject, vocab::FALDO_REFERENCE, &q.graph);
        let reference = object_of(store, &q.subject, vocab::VCF_REF, &q.graph);
        let alt = object_of(store, &q.subject, vocab::VCF_ALT, &q.graph);
        let (Some(chrom), Some(reference), Some(alt)) = (chrom, reference, alt) else { continue };
        let (Some(chrom), Some(reference), Some(alt)) = (
            iri_suffix(&chrom, vocab::VCF_CHROMOSOME_NS),
            iri_suffix(&reference, vocab::VCF_SEQUENCE_NS),
            iri_suffix(&alt, vocab::VCF_SEQUENCE_NS),
        ) else {
            continue;
        };
        origins
            .entry((acc.to_string(), chrom.to_string(), pos, reference.to_string(), alt.to_string()))
            .or_default()
            .push((q.subject.clone(), g.clone()));
    }

    let has_pos = QuadPattern {
        predicate: Some(Term::Iri(vocab::iri(vocab::HAS_POS))),
        graph: Some(GraphName::Default),
        ..Default::default()
    };
    let mut out = Vec::new();
    for q in store.match_pattern(&has_pos) {
        let Subject::Iri(variant) = &q.subject else { continue };
        let Some(path) = variant.as_str().strip_prefix(vocab::SG_NS) else { continue };
        let mut parts = path.splitn(3, '/');
        let (Some(acc), Some(chrom)) = (parts.next(), parts.next()) else { continue };
        let Some(pos) = q.object.as_literal().and_then(|l| l.lexical().parse::<u64>().ok()) else { continue };
        let g = GraphName::Default;
        let lit = |p| object_of(store, &q.subject, p, &g).and_then(|t| t.as_literal().map(|l| l.lexical().to_string()));
        let (Some(reference), Some(alt)) = (lit(vocab::HAS_REF_GENOME), lit(vocab::HAS_ALT_GENOME)) else {
            continue;
        };
        let Some(cadd) = object_of(store, &q.subject, vocab::HAS_CADD_SCORES, &g) else { continue };
        let key = (acc.to_string(), chrom.to_string(), pos, reference, alt);
        for (origin, graph) in origins.get(&key).into_iter().flatten() {
            out.push(Quad::new(
                origin.clone(),
                vocab::iri(vocab::HAS_CADD_SCORES),
                cadd.clone(),
                GraphName::Named(graph.clone()),
            ));
        }
    }
    out.sort_by_key(|q| q.to_string());
    out
}
