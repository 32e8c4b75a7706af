use crate::assignment::ClusterAssignment;
use crate::codebook::Codebook;
use crate::dcpe::{agglomerate, assignment_from_steps, Linkage, MergeTrace, ScanStrategy};
use crate::error::{Error, Result};
use crate::metric::squared_euclidean;

/// Greedy agglomeration scored by the Euclidean distance between cluster
/// means. Same merge loop and tie-break as the average-linkage clustering;
/// only the inter-cluster distance differs.
pub fn agglomerative_centroid(codebook: &Codebook, k: usize) -> Result<(ClusterAssignment, MergeTrace)> {
    agglomerative_centroid_with(codebook, k, ScanStrategy::default())
}

pub fn agglomerative_centroid_with(
    codebook: &Codebook,
    k: usize,
    scan: ScanStrategy,
) -> Result<(ClusterAssignment, MergeTrace)> {
    let n = codebook.n_tokens();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut linkage = CentroidLinkage {
        dim: codebook.dim(),
        sums: codebook.as_slice().to_vec(),
        centroids: codebook.as_slice().to_vec(),
        sizes: vec![1; n],
    };
    let mut live: Vec<usize> = (0..n).collect();
    let steps = agglomerate(&mut linkage, &mut live, k, scan)?;
    Ok((assignment_from_steps(n, &steps), MergeTrace::new(steps)))
}

struct CentroidLinkage {
    dim: usize,
    /// per-cluster coordinate sums
    sums: Vec<f64>,
    centroids: Vec<f64>,
    sizes: Vec<usize>,
}

impl CentroidLinkage {
    fn centroid(&self, a: usize) -> &[f64] {
        &self.centroids[a * self.dim..(a + 1) * self.dim]
    }
}

impl Linkage for CentroidLinkage {
    fn n_slots(&self) -> usize {
        self.sizes.len()
    }

    #[inline]
    fn score(&self, a: usize, b: usize) -> Option<f64> {
        Some(squared_euclidean(self.centroid(a), self.centroid(b)).sqrt())
    }

    fn merge_distance(&self, a: usize, b: usize) -> f64 {
        squared_euclidean(self.centroid(a), self.centroid(b)).sqrt()
    }

    fn merge(&mut self, a: usize, b: usize) {
        let d = self.dim;
        for j in 0..d {
            self.sums[a * d + j] += self.sums[b * d + j];
        }
        self.sizes[a] += self.sizes[b];
        let size = self.sizes[a] as f64;
        for j in 0..d {
            self.centroids[a * d + j] = self.sums[a * d + j] / size;
        }
    }
}
