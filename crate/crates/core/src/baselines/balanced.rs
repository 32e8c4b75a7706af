use crate::assignment::ClusterAssignment;
use crate::codebook::Codebook;
use crate::error::Result;
use crate::metric::squared_euclidean;

use super::kmeans::{cluster_means, initial_centroids, KMeansConfig};

/// k-means with equal cluster sizes.
///
/// Each round assigns tokens greedily: all `(token, centroid)` pairs are
/// visited by ascending distance, and a token goes to the first centroid
/// that still has room. Every cluster holds `⌊N/k⌋` tokens and `N mod k`
/// of them take one extra. A pass of pairwise swaps between clusters then
/// removes any exchange that lowers the squared-distance cost, since the
/// greedy order alone can strand a token on a far centroid. Centroids are
/// recomputed as means and the rounds repeat until the assignment is
/// stable or `max_iters` is reached.
pub fn kmeans_balanced(codebook: &Codebook, config: &KMeansConfig) -> Result<ClusterAssignment> {
    let n = codebook.n_tokens();
    config.validate(n)?;
    let k = config.k;

    let mut centroids = initial_centroids(codebook, config);
    let mut labels: Vec<usize> = Vec::new();
    for _ in 0..config.max_iters {
        let cost: Vec<Vec<f64>> = (0..n)
            .map(|t| centroids.iter().map(|c| squared_euclidean(codebook.vector(t), c)).collect())
            .collect();
        let mut next = capacity_greedy(&cost, k);
        improve_by_swaps(&cost, &mut next);
        if next == labels {
            break;
        }
        labels = next;
        centroids = cluster_means(codebook, &labels, k);
    }
    Ok(ClusterAssignment::canonical(&labels))
}

fn capacity_greedy(cost: &[Vec<f64>], k: usize) -> Vec<usize> {
    let n = cost.len();
    let floor = n / k;
    let mut extra = n % k;

    let mut pairs: Vec<(f64, usize, usize)> = cost
        .iter()
        .enumerate()
        .flat_map(|(t, row)| row.iter().enumerate().map(move |(c, &d)| (d, t, c)))
        .collect();
    pairs.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut labels = vec![usize::MAX; n];
    let mut fill = vec![0usize; k];
    let mut placed = 0;
    for (_, t, c) in pairs {
        if labels[t] != usize::MAX {
            continue;
        }
        let room = if fill[c] < floor {
            true
        } else if fill[c] == floor && extra > 0 {
            extra -= 1;
            true
        } else {
            false
        };
        if room {
            labels[t] = c;
            fill[c] += 1;
            placed += 1;
            if placed == n {
                break;
            }
        }
    }
    labels
}

fn improve_by_swaps(cost: &[Vec<f64>], labels: &mut [usize]) {
    let n = labels.len();
    // each accepted swap strictly lowers a bounded-below objective
    for _ in 0..n.max(16) {
        let mut improved = false;
        for x in 0..n {
            for y in x + 1..n {
                let (cx, cy) = (labels[x], labels[y]);
                if cx == cy {
                    continue;
                }
                let delta = cost[x][cy] + cost[y][cx] - cost[x][cx] - cost[y][cy];
                if delta < -1e-12 * (cost[x][cx] + cost[y][cy]).max(1e-300) {
                    labels.swap(x, y);
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}
