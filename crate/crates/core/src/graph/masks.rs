use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Split;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Masks {
    pub train: Vec<bool>,
    pub val: Vec<bool>,
    pub test: Vec<bool>,
}

impl Masks {
    pub fn train_count(&self) -> usize {
        self.train.iter().filter(|&&b| b).count()
    }

    pub fn val_count(&self) -> usize {
        self.val.iter().filter(|&&b| b).count()
    }

    pub fn test_count(&self) -> usize {
        self.test.iter().filter(|&&b| b).count()
    }

    /// Disjointness and full coverage over `n` nodes.
    pub fn check(&self, n: usize) -> Result<(), String> {
        if self.train.len() != n || self.val.len() != n || self.test.len() != n {
            return Err("mask length differs from node count".into());
        }
        for i in 0..n {
            let k = self.train[i] as u8 + self.val[i] as u8 + self.test[i] as u8;
            if k != 1 {
                return Err(format!("node {i} is in {k} masks"));
            }
        }
        Ok(())
    }
}

/// Shuffles node ids with a seeded ChaCha8 stream and cuts the permutation
/// into `floor(train% n)`, `floor(val% n)` and the remainder.
pub fn assign_masks(num_nodes: usize, split: Split, seed: u64) -> Masks {
    let mut perm: Vec<usize> = (0..num_nodes).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = num_nodes * split.train as usize / 100;
    let n_val = num_nodes * split.val as usize / 100;
    let mut m = Masks { train: vec![false; num_nodes], val: vec![false; num_nodes], test: vec![false; num_nodes] };
    for (k, &node) in perm.iter().enumerate() {
        if k < n_train {
            m.train[node] = true;
        } else if k < n_train + n_val {
            m.val[node] = true;
        } else {
            m.test[node] = true;
        }
    }
    m
}
