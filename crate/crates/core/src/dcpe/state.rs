use rayon::prelude::*;

use crate::codebook::Codebook;
use crate::metric::Metric;

/// Live inter-cluster bookkeeping for the incremental algorithm.
///
/// For every pair of live clusters `a < b` the state holds the *sum* of
/// all token-to-token distances between their members, in `f64`, in a
/// packed strict upper triangle. The average-linkage distance is that sum
/// divided by `size(a) · size(b)`. Merging `b` into `a` adds row/column
/// `b` onto row/column `a`, which keeps every sum exact without touching
/// token vectors again.
#[derive(Debug, Clone)]
pub struct DistanceState {
    n: usize,
    sums: Vec<f64>,
    sizes: Vec<usize>,
    active: Vec<bool>,
}

impl DistanceState {
    /// Singleton clusters with pairwise token distances.
    pub fn new(codebook: &Codebook, metric: Metric) -> Self {
        let n = codebook.n_tokens();
        let mut sums = vec![0.0; n * n.saturating_sub(1) / 2];
        let mut rows = Vec::with_capacity(n);
        let mut rest = sums.as_mut_slice();
        for i in 0..n {
            let (row, tail) = rest.split_at_mut(n - 1 - i);
            rows.push(row);
            rest = tail;
        }
        rows.into_par_iter().enumerate().for_each(|(i, row)| {
            let vi = codebook.vector(i);
            for (slot, j) in row.iter_mut().zip(i + 1..n) {
                *slot = metric.distance(vi, codebook.vector(j));
            }
        });
        Self {
            n,
            sums,
            sizes: vec![1; n],
            active: vec![true; n],
        }
    }

    #[inline]
    fn index(&self, a: usize, b: usize) -> usize {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        debug_assert!(i != j && j < self.n);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    pub fn n_slots(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn size(&self, a: usize) -> usize {
        self.sizes[a]
    }

    #[inline]
    pub fn is_active(&self, a: usize) -> bool {
        self.active[a]
    }

    /// Sum of member-pair distances between clusters `a` and `b`.
    #[inline]
    pub fn pair_sum(&self, a: usize, b: usize) -> f64 {
        self.sums[self.index(a, b)]
    }

    /// Mean member-pair distance between clusters `a` and `b`.
    #[inline]
    pub fn average(&self, a: usize, b: usize) -> f64 {
        self.pair_sum(a, b) / (self.sizes[a] as f64 * self.sizes[b] as f64)
    }

    pub fn active_clusters(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&a| self.active[a])
    }

    /// Folds cluster `b` into cluster `a` and retires `b`.
    pub fn merge(&mut self, a: usize, b: usize) {
        assert!(a != b && self.active[a] && self.active[b], "merge of dead cluster");
        for c in 0..self.n {
            if c == a || c == b || !self.active[c] {
                continue;
            }
            let from = self.sums[self.index(b, c)];
            let to = self.index(a, c);
            self.sums[to] += from;
        }
        self.sizes[a] += self.sizes[b];
        self.active[b] = false;
    }

    /// Bytes held by the packed sum matrix.
    pub fn matrix_bytes(&self) -> usize {
        self.sums.len() * std::mem::size_of::<f64>()
    }
}
