use ndarray::Array2;

/// Row-compressed sparse `n x n` operator; row `v` lists the sources feeding `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseOp {
    /// Builds from `(dst, src, value)` triples, summing duplicates.
    fn from_entries(n: usize, mut entries: Vec<(u32, u32, f64)>) -> Self {
        entries.sort_by_key(|&(v, u, _)| (v, u));
        let mut indptr = vec![0; n + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last = None;
        for (v, u, w) in entries {
            if last == Some((v, u)) {
                *values.last_mut().unwrap() += w;
                continue;
            }
            last = Some((v, u));
            indices.push(u);
            values.push(w);
            indptr[v as usize + 1] += 1;
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        SparseOp { n, indptr, indices, values }
    }

    /// `D^-1/2 (A + I) D^-1/2` with `A[v,u] = w(u -> v)` and `D` the row sums of `A + I`.
    pub fn gcn(n: usize, edges: &[(u32, u32)], weights: &[f64]) -> Self {
        let mut entries: Vec<(u32, u32, f64)> = edges.iter().zip(weights).map(|(&(u, v), &w)| (v, u, w)).collect();
        entries.extend((0..n as u32).map(|v| (v, v, 1.0)));
        let mut op = Self::from_entries(n, entries);
        let deg: Vec<f64> = (0..n).map(|v| op.row(v).map(|(_, w)| w).sum()).collect();
        for v in 0..n {
            for k in op.indptr[v]..op.indptr[v + 1] {
                let u = op.indices[k] as usize;
                op.values[k] /= (deg[v] * deg[u]).sqrt();
            }
        }
        op
    }

    /// `M[v] = sum_{u -> v} w(u,v) h_u / |N_in(v)|`; rows without in-edges are zero.
    pub fn mean_in(n: usize, edges: &[(u32, u32)], weights: &[f64]) -> Self {
        let mut count = vec![0usize; n];
        for &(_, v) in edges {
            count[v as usize] += 1;
        }
        let entries = edges.iter().zip(weights).map(|(&(u, v), &w)| (v, u, w / count[v as usize] as f64)).collect();
        Self::from_entries(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[v]..self.indptr[v + 1];
        self.indices[r.clone()].iter().zip(&self.values[r]).map(|(&u, &w)| (u as usize, w))
    }

    /// `Y = S X`.
    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut y = Array2::zeros((self.n, x.ncols()));
        for v in 0..self.n {
            let mut yv = y.row_mut(v);
            for (u, w) in self.row(v) {
                yv.scaled_add(w, &x.row(u));
            }
        }
        y
    }

    /// `X = S^T Y`.
    pub fn apply_transpose(&self, y: &Array2<f64>) -> Array2<f64> {
        let mut x = Array2::zeros((self.n, y.ncols()));
        for v in 0..self.n {
            let yv = y.row(v);
            for (u, w) in self.row(v) {
                x.row_mut(u).scaled_add(w, &yv);
            }
        }
        x
    }
}
