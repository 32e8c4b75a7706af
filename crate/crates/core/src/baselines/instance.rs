use rayon::prelude::*;

use crate::assignment::ClusterAssignment;
use crate::codebook::Codebook;
use crate::error::Result;
use crate::metric::Metric;

use super::kmeans::{assign_nearest, initial_centroids, repair_empty, KMeansConfig};

/// Whether a token counts itself when averaging distances to the members
/// of its own cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfDistance {
    /// Average over the other members only. A singleton's cost to its own
    /// cluster is 0.
    #[default]
    Exclude,
    /// Include the token's zero distance to itself. This dilutes the cost
    /// of staying, so assignments barely move from the seeding round.
    Include,
}

/// k-means without centroids: after the usual seeding round, each token
/// moves to the cluster whose current members are nearest *on average*
/// (mean Euclidean distance to the members). Stops on a stable assignment
/// or after `max_iters` rounds.
pub fn kmeans_instance_distance(codebook: &Codebook, config: &KMeansConfig) -> Result<ClusterAssignment> {
    kmeans_instance_distance_with(codebook, config, SelfDistance::default())
}

pub fn kmeans_instance_distance_with(
    codebook: &Codebook,
    config: &KMeansConfig,
    self_distance: SelfDistance,
) -> Result<ClusterAssignment> {
    let n = codebook.n_tokens();
    config.validate(n)?;
    let k = config.k;

    let mut centroids = initial_centroids(codebook, config);
    let mut labels = assign_nearest(codebook, &centroids);
    repair_empty(codebook, &mut labels, &mut centroids);

    for _ in 0..config.max_iters {
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        let costs: Vec<(usize, f64)> = (0..n)
            .into_par_iter()
            .map(|t| {
                let v = codebook.vector(t);
                let mut sums = vec![0.0; k];
                for (j, &l) in labels.iter().enumerate() {
                    if j != t {
                        sums[l] += Metric::Euclidean.distance(v, codebook.vector(j));
                    }
                }
                let mut best = (0, f64::INFINITY);
                for (c, (&s, &size)) in sums.iter().zip(&sizes).enumerate() {
                    let others = match self_distance {
                        SelfDistance::Exclude if labels[t] == c => size - 1,
                        _ => size,
                    };
                    let mean = if others == 0 { 0.0 } else { s / others as f64 };
                    if mean < best.1 {
                        best = (c, mean);
                    }
                }
                best
            })
            .collect();

        let mut next: Vec<usize> = costs.iter().map(|&(c, _)| c).collect();
        fill_empty(&mut next, &costs, k);
        if next == labels {
            break;
        }
        labels = next;
    }
    Ok(ClusterAssignment::canonical(&labels))
}

/// Moves the highest-cost token of a multi-member cluster into each
/// cluster left empty.
fn fill_empty(labels: &mut [usize], costs: &[(usize, f64)], k: usize) {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    let mut moved = vec![false; labels.len()];
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let worst = (0..labels.len())
            .filter(|&t| !moved[t] && sizes[labels[t]] > 1)
            .fold(None, |acc: Option<usize>, t| match acc {
                Some(b) if costs[b].1 >= costs[t].1 => acc,
                _ => Some(t),
            })
            .expect("k ≤ N leaves a cluster with spare members");
        sizes[labels[worst]] -= 1;
        labels[worst] = empty;
        sizes[empty] = 1;
        moved[worst] = true;
    }
}
