//! Whole acceptance checks. Each panics on the first violated expectation.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use sha2::{Digest, Sha256};
use variantkg_core::convert::VcfConvertOptions;
use variantkg_core::gnn::compute_metrics;
use variantkg_core::graph::{assemble_graph, assign_masks, EdgePolicy, GraphRecipe, Split};
use variantkg_core::pipeline::{convert_cadd, convert_vcf};
use variantkg_core::rdf::{
    parse_nquads, parse_turtle, serialize_nquads, serialize_turtle, write_nquads, xsd, GraphName, Iri, NQuadsReader,
    PrefixMap, Quad, Term,
};
use variantkg_core::sparql::feature::{feature_columns, feature_query};
use variantkg_core::sparql::{evaluate, parse_query};
use variantkg_core::store::{QuadPattern, QuadStore};

use super::cohort::{cohort_quads, Cohort, CohortSpec, CADD_TRIPLES_PER_ROW};
use super::fixtures::{SAMPLE_CADD, SAMPLE_VCF};
use super::graph_oracle::{phred, random_table};
use super::naive_sparql::NaiveEngine;
use super::random::{random_quads, rng};
use super::{multiset, split_sizes};

fn hex128(key: &str) -> String {
    Sha256::digest(key.as_bytes())[..16].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn golden_vcf() {
    let quads =
        convert_vcf(SAMPLE_VCF.as_bytes(), "SRR13112995.vcf", "SRR13112995", &VcfConvertOptions::default()).unwrap();
    let origin = format!("origin://{}@0", hex128("SRR13112995\t1\t16963\tG\tA\t0"));
    let text = serialize_nquads(&quads);
    let position = format!(
        "<{origin}> <http://biohackathon.org/resource/faldo#position> \"16963\"^^<http://www.w3.org/2001/XMLSchema#integer> <sg://SRR13112995> .\n"
    );
    let reference = format!(
        "<{origin}> <sg://0.99.11/vcf2rdf/variant/REF> <sg://0.99.11/vcf2rdf/sequence/G> <sg://SRR13112995> .\n"
    );
    assert!(text.contains(&position), "{text}");
    assert!(text.contains(&reference), "{text}");
    // chromosome, position, REF, ALT, QUAL, FILTER_STATUS and 14 INFO keys
    assert_eq!(quads.len(), 4 + 1 + 1 + 14);
    let info = |local: &str| {
        quads
            .iter()
            .find(|q| q.predicate.as_str() == format!("sg://0.99.11/vcf2rdf/info/{local}"))
            .map(|q| q.object.to_string())
    };
    assert_eq!(info("DEPTH").unwrap(), "\"8\"^^<http://www.w3.org/2001/XMLSchema#integer>");
    assert_eq!(info("RMS_MAPPING_QUALITY").unwrap(), "\"60.00\"^^<http://www.w3.org/2001/XMLSchema#float>");
    assert_eq!(info("READPOSRANKSUM").unwrap(), "\"-0.366\"^^<http://www.w3.org/2001/XMLSchema#float>");
    assert!(info("COMBINED_DEPTH").is_none());
    let with_format =
        convert_vcf(SAMPLE_VCF.as_bytes(), "SRR13112995.vcf", "SRR13112995", &VcfConvertOptions { emit_format: true })
            .unwrap();
    assert_eq!(with_format.len(), quads.len() + 5);
}

pub fn golden_cadd() {
    let triples = convert_cadd(SAMPLE_CADD.as_bytes(), "SRR13112995_cadd.tsv", "SRR13112995").unwrap();
    assert_eq!(triples.len(), CADD_TRIPLES_PER_ROW);
    let mut prefixes = PrefixMap::new();
    prefixes.insert("ns1", "http://sg.org/").unwrap();
    prefixes.insert("xsd", xsd::NS).unwrap();
    let ttl = serialize_turtle(&triples, &prefixes).unwrap();
    let listing = "<http://sg.org/SRR13112995/1/variant1> a ns1:variant ;
    ns1:has_alt_genome \"A\" ;
    ns1:has_cadd_scores <http://sg.org/SRR13112995/1/variant1/cadd> ;
    ns1:has_pos 16963 ;
    ns1:has_ref_genome \"G\" .
";
    assert!(ttl.contains(listing), "{ttl}");
    let back: HashSet<_> = parse_turtle(&ttl).unwrap().into_iter().collect();
    assert_eq!(back, triples.into_iter().collect());
}

pub fn as_triples(quads: &[Quad]) -> Vec<Quad> {
    quads.iter().map(|q| Quad { graph: GraphName::Default, ..q.clone() }).collect()
}

pub fn test_prefixes() -> PrefixMap {
    let mut p = PrefixMap::new();
    p.insert("ex", "http://example.org/s/").unwrap();
    p.insert("p", "http://example.org/p/").unwrap();
    p.insert("xsd", xsd::NS).unwrap();
    p
}

pub fn nquads_round_trip(n: usize, seed: u64) {
    let quads = random_quads(&mut rng(seed), n, 500);
    let text = serialize_nquads(&quads);
    let back = parse_nquads(&text).unwrap();
    assert_eq!(back.iter().collect::<HashSet<_>>(), quads.iter().collect::<HashSet<_>>());

    let mut buf = Vec::new();
    write_nquads(&mut buf, &quads).unwrap();
    let streamed: Vec<Quad> = NQuadsReader::new(buf.as_slice()).map(Result::unwrap).collect();
    assert_eq!(streamed, quads);
}

pub fn turtle_round_trip(n: usize, seed: u64) {
    let triples = as_triples(&random_quads(&mut rng(seed), n, 500));
    for p in [PrefixMap::new(), test_prefixes()] {
        let text = serialize_turtle(&triples, &p).unwrap();
        let back = parse_turtle(&text).unwrap();
        assert_eq!(back.into_iter().collect::<HashSet<_>>(), triples.iter().cloned().collect::<HashSet<_>>());
    }
}

fn scan(quads: &[Quad], pat: &QuadPattern) -> Vec<Quad> {
    quads
        .iter()
        .filter(|q| {
            pat.subject.as_ref().is_none_or(|s| *s == q.subject.to_term())
                && pat.predicate.as_ref().is_none_or(|p| *p == Term::Iri(q.predicate.clone()))
                && pat.object.as_ref().is_none_or(|o| *o == q.object)
                && pat.graph.as_ref().is_none_or(|g| *g == q.graph)
        })
        .cloned()
        .collect()
}

fn random_pattern(r: &mut impl Rng, quads: &[Quad]) -> QuadPattern {
    let q = quads.choose(r).unwrap();
    let other = quads.choose(r).unwrap();
    let missing = Term::Iri(Iri::new("http://example.org/absent").unwrap());
    let mut pick = |t: Term, alt: Term| match r.random_range(0..10) {
        0..=4 => None,
        5..=7 => Some(t),
        8 => Some(alt),
        _ => Some(missing.clone()),
    };
    let subject = pick(q.subject.to_term(), other.subject.to_term());
    let predicate = pick(Term::Iri(q.predicate.clone()), Term::Iri(other.predicate.clone()));
    let object = pick(q.object.clone(), other.object.clone());
    let graph = match r.random_range(0..4) {
        0 | 1 => None,
        2 => Some(q.graph.clone()),
        _ => Some(GraphName::Default),
    };
    QuadPattern { subject, predicate, object, graph }
}

pub fn unique(quads: Vec<Quad>) -> Vec<Quad> {
    let mut seen = HashSet::new();
    quads.into_iter().filter(|q| seen.insert(q.clone())).collect()
}

/// Random match() patterns against a linear scan, before and after a
/// snapshot/open cycle.
pub fn store_matches_linear_scan(n: usize, patterns: usize) {
    let quads = unique(random_quads(&mut rng(11), n, 300));
    let mut store = QuadStore::new();
    let stats = store.bulk_load(quads.clone()).unwrap();
    assert_eq!(stats.quad_count, quads.len());
    let graphs: HashSet<_> = quads.iter().filter_map(|q| q.graph.named().cloned()).collect();
    assert_eq!(stats.graph_count, graphs.len());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.snap");
    store.snapshot(&path).unwrap();
    let reopened = QuadStore::open(&path).unwrap();
    assert_eq!(reopened.stats(), store.stats());

    let mut r = rng(12);
    for _ in 0..patterns {
        let pat = random_pattern(&mut r, &quads);
        let want = multiset(scan(&quads, &pat));
        assert_eq!(multiset(store.match_pattern(&pat)), want, "{pat:?}");
        assert_eq!(multiset(reopened.match_pattern(&pat)), want, "{pat:?}");
    }
    assert_eq!(multiset(store.match_pattern(&QuadPattern::default())), multiset(quads.clone()));
}

/// Bulk-loads `n` distinct generated quads and returns the load time in
/// seconds. Generation is not timed.
pub fn bulk_load_seconds(n: usize) -> f64 {
    let iri = |s: String| Iri::new(s).unwrap();
    let preds: Vec<Iri> = (0..50).map(|i| iri(format!("http://example.org/p/{i}"))).collect();
    let graphs: Vec<GraphName> = (0..20).map(|i| GraphName::Named(iri(format!("sg://SRR{i}")))).collect();
    let quads: Vec<Quad> = (0..n)
        .map(|i| Quad {
            subject: variantkg_core::rdf::Subject::Iri(iri(format!("http://example.org/s/{}", i / 10))),
            predicate: preds[i % preds.len()].clone(),
            object: Term::Literal(variantkg_core::rdf::Literal::integer(i as i64)),
            graph: graphs[i % graphs.len()].clone(),
        })
        .collect();
    let started = std::time::Instant::now();
    let mut store = QuadStore::new();
    let stats = store.bulk_load(quads).unwrap();
    let secs = started.elapsed().as_secs_f64();
    assert_eq!(stats.quad_count, n);
    secs
}

fn cell<'a>(row: &'a [Option<Term>], cols: &[String], name: &str) -> Option<&'a Term> {
    row[cols.iter().position(|c| c == name).unwrap()].as_ref()
}

/// The listed feature query on a two-accession store: equal to the naive
/// evaluator and to the generator's ground truth.
pub fn feature_query_on_two_accessions() {
    let cohort =
        Cohort::generate(&CohortSpec { accessions: 2, variants_per_accession: 30, seed: 5, ..Default::default() });
    let quads = cohort_quads(&cohort);
    let mut store = QuadStore::new();
    store.bulk_load(quads.iter().cloned()).unwrap();
    let text = feature_query(&cohort.accession_ids());
    let q = parse_query(&text).unwrap();
    let got = evaluate(&q, &store);
    assert_eq!(got.columns, feature_columns());

    let (_, naive) = NaiveEngine::new(&quads).run(&q);
    assert_eq!(multiset(got.rows.clone()), multiset(naive));

    // Expected rows straight from the generator's ground truth.
    type Key = (String, String, String, String, Option<String>, Option<String>, Option<String>, String);
    let mut want: Vec<Key> = Vec::new();
    for a in &cohort.accessions {
        for v in &a.variants {
            want.push((
                format!("sg://{}", a.accession),
                v.pos.to_string(),
                v.id.clone().unwrap_or_else(|| "None".into()),
                v.first_annotation().to_string(),
                v.info_value("BaseQRankSum").map(str::to_string),
                v.info_value("ReadPosRankSum").map(str::to_string),
                v.filter.clone(),
                v.cadd.as_ref().unwrap().1.clone(),
            ));
        }
    }
    let cols = &got.columns;
    let val = |row: &[Option<Term>], name: &str| cell(row, cols, name).map(|t| t.value().to_string());
    let have: Vec<Key> = got
        .rows
        .iter()
        .map(|row| {
            let phred = cell(row, cols, "phred_score").and_then(|t| t.as_literal()).and_then(|l| l.as_f64()).unwrap();
            (
                val(row, "accession_id").unwrap(),
                val(row, "position").unwrap(),
                val(row, "variant_id").unwrap(),
                val(row, "ann_split_1").unwrap(),
                val(row, "baseqranksum"),
                val(row, "readposranksum"),
                val(row, "filter_status"),
                format!("{phred:.2}"),
            )
        })
        .collect();
    assert_eq!(multiset(have), multiset(want));
    for row in &got.rows {
        for absent in ["combined_depth", "conditional_genotype_quality", "genotype"] {
            assert!(cell(row, cols, absent).is_none());
        }
        assert!(cell(row, cols, "raw_score").is_some());
    }
    let ids: Vec<_> = got.rows.iter().map(|r| cell(r, cols, "variant_id").unwrap().clone()).collect();
    let mut sorted = ids.clone();
    sorted.sort_by(|a, b| variantkg_core::sparql::expr::order_terms(Some(a), Some(b)));
    assert_eq!(ids, sorted);
}

/// n(n-1) edges when fully connected and bidirectional, half that otherwise.
pub fn fully_connected_counts() {
    for n in [2usize, 3, 17, 100] {
        let mut r = rng(n as u64);
        let mut table = random_table(&mut r, n, 3);
        for (i, row) in table.rows.iter_mut().enumerate() {
            row[4] = phred(if i % 2 == 0 { 5.0 } else { 15.0 });
        }
        let mut recipe = GraphRecipe::new(vec!["quality".into()], "phred_score");
        recipe.edge_policy = EdgePolicy::FullyConnected;
        let (g, _) = assemble_graph(&table, &recipe).unwrap();
        assert_eq!(g.edges.len(), n * (n - 1));
        recipe.bidirectional = false;
        let (g, _) = assemble_graph(&table, &recipe).unwrap();
        assert_eq!(g.edges.len(), n * (n - 1) / 2);
    }
}

pub fn mask_sizes(cases: usize) {
    let mut r = rng(5);
    for _ in 0..cases {
        let n = r.random_range(0..3000);
        let train = r.random_range(0..=100);
        let val = r.random_range(0..=100 - train);
        let seed = r.random();
        let m = assign_masks(n, Split { train, val }, seed);
        m.check(n).unwrap();
        assert_eq!((m.train_count(), m.val_count(), m.test_count()), split_sizes(n, train as usize, val as usize));
        assert_eq!(m, assign_masks(n, Split { train, val }, seed));
    }
}

pub fn fixed_metrics_case() {
    let m = compute_metrics(&[0, 0, 1, 1, 2, 2], &[0, 1, 1, 1, 2, 0], 3, &[]);
    assert!((m.accuracy - 4.0 / 6.0).abs() < 1e-12);
    let macro_precision = (0.5 + 2.0 / 3.0 + 1.0) / 3.0;
    assert!((m.macro_avg.precision - macro_precision).abs() < 1e-12);
    assert!((m.macro_avg.precision - 0.7222).abs() < 5e-5);
    assert_eq!(m.per_class.iter().map(|c| c.support).collect::<Vec<_>>(), vec![2, 2, 2]);
}
