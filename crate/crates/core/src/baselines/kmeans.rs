use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::ClusterAssignment;
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::metric::squared_euclidean;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    /// `k` distinct tokens drawn uniformly.
    #[default]
    RandomTokens,
    /// k-means++: each further seed drawn with probability proportional to
    /// its squared distance from the nearest seed so far.
    PlusPlus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub init: Init,
    /// Stop once no centroid moves by `tol` or more.
    pub tol: f64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            max_iters: 300,
            seed,
            init: Init::RandomTokens,
            tol: 0.0,
        }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::KOutOfRange { k: self.k, n });
        }
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Invalid(format!("tol must be non-negative, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct KMeansOutcome {
    pub assignment: ClusterAssignment,
    /// Final centroids, indexed by canonical cluster label.
    pub centroids: Vec<Vec<f64>>,
    /// Lloyd update rounds performed.
    pub iterations: usize,
    pub converged: bool,
    /// Within-cluster SSE after every assignment and every centroid update,
    /// in order. Non-increasing for Lloyd iterations.
    pub objective: Vec<f64>,
}

pub fn kmeans(codebook: &Codebook, config: &KMeansConfig) -> Result<ClusterAssignment> {
    kmeans_detailed(codebook, config).map(|o| o.assignment)
}

pub fn kmeans_detailed(codebook: &Codebook, config: &KMeansConfig) -> Result<KMeansOutcome> {
    let n = codebook.n_tokens();
    config.validate(n)?;
    let mut centroids = initial_centroids(codebook, config);
    let mut labels = assign_nearest(codebook, &centroids);
    repair_empty(codebook, &mut labels, &mut centroids);
    let mut objective = vec![sse(codebook, &labels, &centroids)];

    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iters {
        iterations += 1;
        let updated = cluster_means(codebook, &labels, config.k);
        let shift = centroids
            .iter()
            .zip(&updated)
            .map(|(a, b)| squared_euclidean(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = updated;
        objective.push(sse(codebook, &labels, &centroids));

        let mut next = assign_nearest(codebook, &centroids);
        repair_empty(codebook, &mut next, &mut centroids);
        objective.push(sse(codebook, &next, &centroids));
        let stable = next == labels;
        labels = next;
        if stable || shift < config.tol {
            converged = true;
            break;
        }
    }

    let assignment = ClusterAssignment::canonical(&labels);
    // reorder centroids to canonical numbering
    let mut ordered = vec![Vec::new(); config.k];
    for (token, &raw) in labels.iter().enumerate() {
        let c = assignment.label(token);
        if ordered[c].is_empty() {
            ordered[c] = centroids[raw].clone();
        }
    }
    Ok(KMeansOutcome {
        assignment,
        centroids: ordered,
        iterations,
        converged,
        objective,
    })
}

pub(crate) fn initial_centroids(codebook: &Codebook, config: &KMeansConfig) -> Vec<Vec<f64>> {
    let mut rng = rng::seeded(config.seed);
    let n = codebook.n_tokens();
    let picks: Vec<usize> = match config.init {
        Init::RandomTokens => index::sample(&mut rng, n, config.k).into_vec(),
        Init::PlusPlus => {
            let mut picks = vec![rng.random_range(0..n)];
            let mut d2: Vec<f64> = (0..n)
                .map(|t| squared_euclidean(codebook.vector(t), codebook.vector(picks[0])))
                .collect();
            while picks.len() < config.k {
                let total: f64 = d2.iter().sum();
                let next = if total > 0.0 {
                    let mut target = rng.random::<f64>() * total;
                    let mut chosen = None;
                    for (t, &w) in d2.iter().enumerate() {
                        if w > 0.0 {
                            chosen = Some(t);
                            if target < w {
                                break;
                            }
                            target -= w;
                        }
                    }
                    chosen.expect("positive total weight")
                } else {
                    // every token coincides with a seed; fall back to unused tokens
                    let unused: Vec<usize> = (0..n).filter(|t| !picks.contains(t)).collect();
                    unused[rng.random_range(0..unused.len())]
                };
                picks.push(next);
                let v = codebook.vector(next);
                for (t, w) in d2.iter_mut().enumerate() {
                    *w = w.min(squared_euclidean(codebook.vector(t), v));
                }
            }
            picks
        }
    };
    picks.iter().map(|&t| codebook.vector(t).to_vec()).collect()
}

/// Nearest centroid per token; ties go to the lowest centroid index.
pub(crate) fn assign_nearest(codebook: &Codebook, centroids: &[Vec<f64>]) -> Vec<usize> {
    (0..codebook.n_tokens())
        .into_par_iter()
        .map(|t| {
            let v = codebook.vector(t);
            let mut best = (0, f64::INFINITY);
            for (c, mu) in centroids.iter().enumerate() {
                let d = squared_euclidean(v, mu);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best.0
        })
        .collect()
}

/// Gives every empty cluster the token currently worst served by its
/// centroid (taken only from clusters with more than one member).
pub(crate) fn repair_empty(codebook: &Codebook, labels: &mut [usize], centroids: &mut [Vec<f64>]) {
    let k = centroids.len();
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let worst = (0..labels.len())
            .filter(|&t| sizes[labels[t]] > 1)
            .map(|t| (t, squared_euclidean(codebook.vector(t), &centroids[labels[t]])))
            .fold(None, |acc: Option<(usize, f64)>, (t, d)| match acc {
                Some((_, best)) if best >= d => acc,
                _ => Some((t, d)),
            })
            .map(|(t, _)| t)
            .expect("k ≤ N leaves a cluster with spare members");
        sizes[labels[worst]] -= 1;
        labels[worst] = empty;
        sizes[empty] = 1;
        centroids[empty] = codebook.vector(worst).to_vec();
    }
}

pub(crate) fn cluster_means(codebook: &Codebook, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; codebook.dim()]; k];
    let mut counts = vec![0usize; k];
    for (t, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(codebook.vector(t)) {
            *s += x;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        let c = c.max(1) as f64;
        s.iter_mut().for_each(|x| *x /= c);
    }
    sums
}

fn sse(codebook: &Codebook, labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(t, &l)| squared_euclidean(codebook.vector(t), &centroids[l]))
        .sum()
}

/// Sum of squared distances from each token to its cluster mean.
pub fn within_cluster_sse(codebook: &Codebook, assignment: &ClusterAssignment) -> f64 {
    let means = cluster_means(codebook, assignment.labels(), assignment.n_clusters());
    sse(codebook, assignment.labels(), &means)
}
