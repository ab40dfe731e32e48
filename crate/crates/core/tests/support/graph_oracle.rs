//! Randomized result tables and the counting rules a built graph must obey.

use std::collections::{HashMap, HashSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use variantkg_core::graph::{
    assemble_graph, graph_from_bytes, graph_to_bytes, EdgePolicy, GraphRecipe, Split, NULL_CATEGORY,
};
use variantkg_core::rdf::{Literal, Term};
use variantkg_core::sparql::ResultTable;

use super::{clique_edge_count, split_sizes};

pub const COLUMNS: &[&str] = &["quality", "ref_genome", "ann_split_1", "gene", "phred_score"];
const BASES: &[&str] = &["A", "C", "G", "T", "AT", "GC"];

fn ann(gene: &str, rng: &mut impl Rng) -> String {
    let seg = |g: &str| format!("A|missense_variant|MODERATE|{g}|ID{g}|transcript|T1|protein_coding|1/2|c.1A>G|p.K1E");
    if rng.random_bool(0.3) {
        format!("{},{}", seg(gene), seg("OTHER"))
    } else {
        seg(gene)
    }
}

/// A table of `n` rows with some null cells. Genes are drawn from a pool of
/// `genes` names; a few rows have no gene at all.
pub fn random_table(rng: &mut impl Rng, n: usize, genes: usize) -> ResultTable {
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let gene = (!rng.random_bool(0.05)).then(|| format!("GENE{}", rng.random_range(0..genes)));
        let quality = (!rng.random_bool(0.1)).then(|| Literal::double(rng.random_range(0.0..500.0)).into());
        let base = (!rng.random_bool(0.1)).then(|| Literal::string(*BASES.choose(rng).unwrap()).into());
        let ann_cell = match &gene {
            Some(g) => Some(Literal::string(ann(g, rng)).into()),
            None if rng.random_bool(0.5) => Some(Literal::string("A|x|LOW").into()),
            None => None,
        };
        let gene_cell = gene.as_ref().map(|g| Literal::string(g.as_str()).into());
        let phred = (!rng.random_bool(0.05)).then(|| Literal::double(rng.random_range(0.0..45.0)).into());
        rows.push(vec![quality, base, ann_cell, gene_cell, phred]);
    }
    ResultTable { columns: COLUMNS.iter().map(|c| c.to_string()).collect(), rows }
}

fn col(t: &ResultTable, name: &str) -> usize {
    t.columns.iter().position(|c| c == name).unwrap()
}

fn class_of(v: f64) -> usize {
    match v {
        v if v < 10.0 => 0,
        v if v < 20.0 => 1,
        v if v < 30.0 => 2,
        _ => 3,
    }
}

/// Builds a graph from a random table and recipe and checks it against the
/// counting rules. Returns (nodes, edges).
pub fn check_random_graph(rng: &mut impl Rng) -> (usize, usize) {
    let n_rows = rng.random_range(20..400);
    let genes = rng.random_range(1..12);
    let table = random_table(rng, n_rows, genes);
    let mut recipe = GraphRecipe::new(vec!["quality".into(), "ref_genome".into()], "phred_score");
    recipe.edge_policy = if rng.random_bool(0.3) { EdgePolicy::FullyConnected } else { EdgePolicy::GeneName };
    recipe.bidirectional = rng.random_bool(0.7);
    recipe.gene_column = rng.random_bool(0.5).then(|| "gene".to_string());
    let train = rng.random_range(10..=90);
    recipe.split = Split { train, val: rng.random_range(0..=100 - train) };
    recipe.seed = rng.random();

    let (g, summary) = assemble_graph(&table, &recipe).unwrap();
    let label = col(&table, "phred_score");
    let kept: Vec<usize> = (0..table.rows.len()).filter(|&r| table.rows[r][label].is_some()).collect();
    let n = kept.len();
    assert_eq!(g.num_nodes, n);
    assert_eq!(g.source_rows, kept);
    assert_eq!(summary.dropped_rows, n_rows - n);

    // Labels follow the default phred bins.
    for (i, &r) in kept.iter().enumerate() {
        let v = table.rows[r][label].as_ref().unwrap().as_literal().unwrap().as_f64().unwrap();
        assert_eq!(g.labels[i], class_of(v));
    }

    // Edge counts.
    let gene_of_row = |r: usize| -> Option<String> {
        let cell = match &recipe.gene_column {
            Some(c) => table.rows[r][col(&table, c)].as_ref()?.value().to_string(),
            None => {
                let raw = table.rows[r][col(&table, "ann_split_1")].as_ref()?.value().to_string();
                let first = raw.split(',').next().unwrap().to_string();
                let fields: Vec<&str> = first.split('|').collect();
                if fields.len() < 5 {
                    return None;
                }
                fields[3].to_string()
            }
        };
        (!cell.is_empty()).then_some(cell)
    };
    let expected_edges = match recipe.edge_policy {
        EdgePolicy::FullyConnected => clique_edge_count([n], recipe.bidirectional),
        EdgePolicy::GeneName => {
            let mut sizes: HashMap<String, usize> = HashMap::new();
            for &r in &kept {
                if let Some(gene) = gene_of_row(r) {
                    *sizes.entry(gene).or_default() += 1;
                }
            }
            clique_edge_count(sizes.into_values(), recipe.bidirectional)
        }
    };
    assert_eq!(g.edges.len(), expected_edges);
    assert_eq!(summary.num_edges, expected_edges);
    let unique: HashSet<_> = g.edges.iter().collect();
    assert_eq!(unique.len(), g.edges.len());
    for &(u, v) in &g.edges {
        assert_ne!(u, v);
        if !recipe.bidirectional {
            assert!(u < v);
        }
        if recipe.edge_policy == EdgePolicy::GeneName {
            let gu = gene_of_row(kept[u as usize]);
            assert!(gu.is_some() && gu == gene_of_row(kept[v as usize]));
        }
    }
    assert!(g.edge_weights.iter().all(|&w| w == 1.0));

    // Masks.
    let (a, b, c) = split_sizes(n, train as usize, recipe.split.val as usize);
    assert_eq!((g.masks.train_count(), g.masks.val_count(), g.masks.test_count()), (a, b, c));
    g.masks.check(n).unwrap();
    assert_eq!((summary.train_nodes, summary.val_nodes, summary.test_nodes), (a, b, c));

    // Features and the dictionary.
    let q = col(&table, "quality");
    let base = col(&table, "ref_genome");
    let dict = g.dictionary("ref_genome").unwrap();
    let qi = g.feature_names.iter().position(|f| f == "quality").unwrap();
    let bi = g.feature_names.iter().position(|f| f == "ref_genome").unwrap();
    let present = g.feature_names.iter().position(|f| f == "quality__present");
    assert_eq!(present.is_some(), kept.iter().any(|&r| table.rows[r][q].is_none()));
    let mut first_seen = Vec::new();
    for (i, &r) in kept.iter().enumerate() {
        match &table.rows[r][q] {
            Some(t) => assert_eq!(g.features[[i, qi]], t.as_literal().unwrap().as_f64().unwrap()),
            None => assert_eq!(g.features[[i, qi]], 0.0),
        }
        if let Some(p) = present {
            assert_eq!(g.features[[i, p]], if table.rows[r][q].is_some() { 1.0 } else { 0.0 });
        }
        let code = g.features[[i, bi]];
        match &table.rows[r][base] {
            Some(t) => {
                assert_eq!(dict.decode(code as usize), Some(t.value()));
                assert_eq!(dict.code(t.value()), Some(code as usize));
                if !first_seen.contains(&t.value().to_string()) {
                    first_seen.push(t.value().to_string());
                }
            }
            None => assert_eq!(code, NULL_CATEGORY),
        }
    }
    assert_eq!(dict.values().collect::<Vec<_>>(), first_seen);

    // Serialization keeps everything.
    let back = graph_from_bytes(&graph_to_bytes(&g)).unwrap();
    assert_eq!(back.edges, g.edges);
    assert_eq!(back.labels, g.labels);
    assert_eq!(back.features, g.features);
    assert_eq!(back.masks, g.masks);
    assert_eq!(back.dictionary("ref_genome").unwrap().values().collect::<Vec<_>>(), first_seen);
    (n, g.edges.len())
}

pub fn phred(v: f64) -> Option<Term> {
    Some(Literal::double(v).into())
}
