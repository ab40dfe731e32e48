use indexmap::IndexMap;

use crate::ingest::ann::AnnAnnotation;
use crate::sparql::ResultTable;

use super::{EdgePolicy, EdgeWeight, GraphError, GraphRecipe, DEFAULT_GENE_SOURCE};

fn gene_of(raw: &str, parse_ann: bool) -> Option<String> {
    let name = if parse_ann {
        let first = raw.split(',').next().unwrap_or(raw);
        AnnAnnotation::parse_segment(first, 0).ok()?.gene_name
    } else {
        raw.to_string()
    };
    (!name.is_empty()).then_some(name)
}

fn push_clique(nodes: &[u32], bidirectional: bool, out: &mut Vec<(u32, u32)>) {
    for &u in nodes {
        for &v in nodes {
            if u != v && (bidirectional || u < v) {
                out.push((u, v));
            }
        }
    }
}

/// Edges between nodes (indices into `source_rows`) and their weights.
///
/// `GeneName` links every ordered pair of nodes sharing a gene; `FullyConnected`
/// links every ordered pair. Without `bidirectional` only `u < v` is kept.
pub fn build_edges(
    table: &ResultTable,
    source_rows: &[usize],
    recipe: &GraphRecipe,
) -> Result<(Vec<(u32, u32)>, Vec<f64>), GraphError> {
    let n = source_rows.len();
    let mut edges = Vec::new();
    match recipe.edge_policy {
        EdgePolicy::FullyConnected => {
            if n > recipe.fully_connected_cap {
                return Err(GraphError::FullyConnectedCap {
                    nodes: n,
                    edges: n as u64 * (n as u64 - 1),
                    cap: recipe.fully_connected_cap,
                });
            }
            let all: Vec<u32> = (0..n as u32).collect();
            push_clique(&all, recipe.bidirectional, &mut edges);
        }
        EdgePolicy::GeneName => {
            let (col, parse_ann) = match &recipe.gene_column {
                Some(c) => (c.as_str(), false),
                None => (DEFAULT_GENE_SOURCE, true),
            };
            let ci = table.column_index(col).ok_or_else(|| GraphError::UnknownColumn(col.to_string()))?;
            let mut genes: IndexMap<String, Vec<u32>> = IndexMap::new();
            for (node, &row) in source_rows.iter().enumerate() {
                if let Some(gene) = table.rows[row][ci].as_ref().and_then(|t| gene_of(t.value(), parse_ann)) {
                    genes.entry(gene).or_default().push(node as u32);
                }
            }
            for (gene, nodes) in &genes {
                if nodes.len() > recipe.gene_clique_cap {
                    return Err(GraphError::GeneCliqueCap {
                        gene: gene.clone(),
                        nodes: nodes.len(),
                        cap: recipe.gene_clique_cap,
                    });
                }
            }
            for nodes in genes.values() {
                push_clique(nodes, recipe.bidirectional, &mut edges);
            }
        }
    }
    let weights = match recipe.edge_weight {
        EdgeWeight::Constant => vec![1.0; edges.len()],
        EdgeWeight::UserValue(w) => vec![w; edges.len()],
        EdgeWeight::InDegree => {
            let mut indeg = vec![0usize; n];
            for &(_, v) in &edges {
                indeg[v as usize] += 1;
            }
            edges.iter().map(|&(_, v)| indeg[v as usize] as f64).collect()
        }
    };
    Ok((edges, weights))
}
