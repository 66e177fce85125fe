//! Fill-reducing symmetric ordering.
//!
//! Minimum degree on the elimination graph of `pattern(M + M^T)`, with the
//! graph held as one bitset per vertex. Eliminating `v` turns its remaining
//! neighbourhood into a clique; degrees are exact (not approximate), ties
//! break on the lower index, so the ordering is deterministic. Memory is
//! `n^2 / 8` bytes, which is why large systems fall back to a static
//! degree sort.

use crate::scalar::Real;
use crate::sparse::SparseMatrix;

/// Above this dimension the exact elimination graph is not formed.
pub const DENSE_GRAPH_LIMIT: usize = 12_000;

struct BitGraph {
    words: usize,
    bits: Vec<u64>,
}

impl BitGraph {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitGraph { words, bits: vec![0; words * n] }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    fn set(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] |= 1u64 << (v % 64);
    }

    fn clear(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] &= !(1u64 << (v % 64));
    }

    fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &w) in self.row(v).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(k * 64 + b);
                w &= w - 1;
            }
        }
        out
    }
}

/// Symmetric permutation `perm` (new position -> original index) for the
/// square matrix `m`.
pub fn minimum_degree<T: Real>(m: &SparseMatrix<T>) -> Vec<usize> {
    let n = m.rows();
    assert_eq!(n, m.cols(), "ordering needs a square matrix");
    if n > DENSE_GRAPH_LIMIT {
        return static_degree(m);
    }
    let mut g = BitGraph::new(n);
    for j in 0..n {
        for &i in m.column(j).0 {
            if i != j {
                g.set(i, j);
                g.set(j, i);
            }
        }
    }
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut perm = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("an uneliminated vertex remains");
        alive[v] = false;
        perm.push(v);
        let nb = g.neighbours(v);
        let row_v: Vec<u64> = g.row(v).to_vec();
        for &u in &nb {
            let base = u * g.words;
            for (k, &w) in row_v.iter().enumerate() {
                g.bits[base + k] |= w;
            }
            g.clear(u, u);
            g.clear(u, v);
        }
        for &u in &nb {
            degree[u] = g.degree(u);
        }
    }
    perm
}

/// Vertices sorted by their degree in `pattern(M + M^T)`.
fn static_degree<T: Real>(m: &SparseMatrix<T>) -> Vec<usize> {
    let n = m.rows();
    let mut deg = vec![0usize; n];
    for j in 0..n {
        for &i in m.column(j).0 {
            if i != j {
                deg[i] += 1;
                deg[j] += 1;
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by_key(|&v| (deg[v], v));
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::creal;

    #[test]
    fn arrow_matrix_defers_hub() {
        // Hub vertex 0 connected to everything: eliminating it first would
        // fill the whole matrix.
        let n = 6;
        let mut t = vec![];
        for i in 0..n {
            t.push((i, i, creal(4.0f64)));
            if i > 0 {
                t.push((0, i, creal(1.0)));
                t.push((i, 0, creal(1.0)));
            }
        }
        let m = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let p = minimum_degree(&m);
        // Once only one leaf is left the hub ties with it.
        assert!(p.iter().position(|&v| v == 0).unwrap() >= n - 2);
        let mut sorted = p.clone();
        sorted.sort();
        assert_eq!(sorted, (0..n).collect::<Vec<_>>());
    }
}
