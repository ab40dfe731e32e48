//! Independent oracles and generators shared by the integration and
//! acceptance tests.
#![allow(dead_code)]

pub mod checks;
pub mod cohort;
pub mod fixtures;
pub mod graph_oracle;
pub mod naive_gnn;
pub mod naive_sparql;
pub mod random;

use std::collections::HashMap;
use std::hash::Hash;

/// Multiset of items, for order-insensitive comparisons.
pub fn multiset<T: Eq + Hash>(items: impl IntoIterator<Item = T>) -> HashMap<T, usize> {
    let mut m = HashMap::new();
    for it in items {
        *m.entry(it).or_insert(0) += 1;
    }
    m
}

/// Number of directed edges in per-gene cliques.
pub fn clique_edge_count(group_sizes: impl IntoIterator<Item = usize>, bidirectional: bool) -> usize {
    group_sizes
        .into_iter()
        .map(|n| if bidirectional { n * n.saturating_sub(1) } else { n * n.saturating_sub(1) / 2 })
        .sum()
}

/// Split sizes `floor(train% n)`, `floor(val% n)` and the remainder.
pub fn split_sizes(n: usize, train: usize, val: usize) -> (usize, usize, usize) {
    let a = n * train / 100;
    let b = n * val / 100;
    (a, b, n - a - b)
}
