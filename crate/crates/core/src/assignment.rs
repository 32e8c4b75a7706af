//! Token → cluster labelings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition of `N` tokens into `k` non-empty clusters.
///
/// Assignments produced by the clustering algorithms are *canonical*:
/// clusters are numbered by ascending smallest member, so the cluster
/// holding token 0 is cluster 0. [`ClusterAssignment::from_labels`]
/// accepts any dense numbering and keeps it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl ClusterAssignment {
    /// Renumbers arbitrary labels canonically. Any label values are allowed;
    /// only equality between them matters.
    pub fn canonical(raw: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let labels: Vec<usize> = raw
            .iter()
            .map(|&l| {
                let next = remap.len();
                *remap.entry(l).or_insert(next)
            })
            .collect();
        Self::build(labels, remap.len())
    }

    /// Wraps labels that already use every cluster index in `0..k`.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |&m| m + 1);
        let mut seen = vec![false; k];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::Assignment(format!(
                "cluster {empty} of {k} has no members"
            )));
        }
        Ok(Self::build(labels, k))
    }

    /// Every token in its own cluster.
    pub fn identity(n: usize) -> Self {
        Self::build((0..n).collect(), n)
    }

    fn build(labels: Vec<usize>, k: usize) -> Self {
        let mut members = vec![Vec::new(); k];
        for (token, &l) in labels.iter().enumerate() {
            members[l].push(token);
        }
        Self { labels, members }
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, token: usize) -> usize {
        self.labels[token]
    }

    pub fn n_clusters(&self) -> usize {
        self.members.len()
    }

    pub fn n_tokens(&self) -> usize {
        self.labels.len()
    }

    /// Sorted member tokens of each cluster.
    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn is_canonical(&self) -> bool {
        self.members.windows(2).all(|w| w[0][0] < w[1][0])
    }

    /// Same partition, canonical numbering.
    pub fn to_canonical(&self) -> Self {
        Self::canonical(&self.labels)
    }

    /// True when both assignments group tokens identically, whatever the
    /// cluster numbering.
    pub fn same_partition(&self, other: &Self) -> bool {
        self.n_tokens() == other.n_tokens()
            && self.to_canonical().labels == other.to_canonical().labels
    }
}
