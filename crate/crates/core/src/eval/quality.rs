use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assignment::ClusterAssignment;
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::metric::Metric;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterQualityReport {
    /// Mean over clusters of the mean member-pair distance (0 for singletons).
    pub mean_intra_pairwise: f64,
    /// cluster size → number of clusters of that size
    pub size_histogram: BTreeMap<usize, usize>,
    /// Population standard deviation of cluster sizes.
    pub size_std: f64,
    pub n_clusters: usize,
    pub n_tokens: usize,
}

pub fn quality_report(codebook: &Codebook, assignment: &ClusterAssignment) -> Result<ClusterQualityReport> {
    if assignment.n_tokens() != codebook.n_tokens() {
        return Err(Error::DimensionMismatch {
            expected: codebook.n_tokens(),
            found: assignment.n_tokens(),
        });
    }
    let k = assignment.n_clusters();
    let intra: f64 = assignment
        .members()
        .iter()
        .map(|m| {
            if m.len() < 2 {
                return 0.0;
            }
            let mut sum = 0.0;
            for (i, &a) in m.iter().enumerate() {
                for &b in &m[i + 1..] {
                    sum += Metric::Euclidean.distance(codebook.vector(a), codebook.vector(b));
                }
            }
            sum / (m.len() * (m.len() - 1) / 2) as f64
        })
        .sum();

    let sizes = assignment.sizes();
    let mut size_histogram = BTreeMap::new();
    for &s in &sizes {
        *size_histogram.entry(s).or_insert(0) += 1;
    }
    let mean = codebook.n_tokens() as f64 / k as f64;
    let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / k as f64;

    Ok(ClusterQualityReport {
        mean_intra_pairwise: intra / k as f64,
        size_histogram,
        size_std: var.sqrt(),
        n_clusters: k,
        n_tokens: codebook.n_tokens(),
    })
}
