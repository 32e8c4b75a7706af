//! Discriminative codebook clustering: greedy average-linkage
//! agglomeration over codebook tokens.
//!
//! Starting from `N` singleton clusters, `N − k` merges each join the two
//! clusters with the smallest mean token-to-token distance. Ties are broken
//! by the smallest cluster pair `(a, b)`, naming clusters by their smallest
//! member token.
//!
//! [`dcpe_naive`] recomputes every mean from the token vectors at every
//! step. [`dcpe_optimized`] keeps a matrix of pairwise distance *sums*
//! ([`DistanceState`]) that a merge updates by adding one row into another,
//! so after the initial `O(N²d)` fill the work no longer depends on `d`.
//! Without a size cap both return identical assignments and traces.

mod engine;
mod naive;
mod state;
mod trace;

pub use engine::ScanStrategy;
pub use state::DistanceState;
pub use trace::{cut_trace, MergeStep, MergeTrace};

pub(crate) use engine::{agglomerate, Linkage};

use serde::{Deserialize, Serialize};

use crate::assignment::ClusterAssignment;
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::metric::Metric;

/// How the merge criterion picks the next pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArgminRule {
    /// Minimize the mean cross-cluster distance (sum / (|A|·|B|)).
    #[default]
    Average,
    /// Minimize the raw distance sum held in the matrix, without
    /// normalizing by cluster sizes. Kept for comparison only.
    LiteralSum,
}

/// How a size cap constrains merges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapRule {
    /// A merge is allowed only if the merged cluster has at most `cap`
    /// tokens, so no cluster ever exceeds the cap.
    #[default]
    MergedSize,
    /// A cluster stops taking part in merges once it holds more than `cap`
    /// tokens. Clusters can reach `2·cap`, but `k` clusters are always
    /// reachable when `cap ≥ N/k`.
    FreezeOversized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcpeConfig {
    pub k: usize,
    pub max_cluster_size: Option<usize>,
    pub cap_rule: CapRule,
    pub metric: Metric,
    pub argmin: ArgminRule,
    pub scan: ScanStrategy,
}

impl DcpeConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_cluster_size: None,
            cap_rule: CapRule::default(),
            metric: Metric::default(),
            argmin: ArgminRule::default(),
            scan: ScanStrategy::default(),
        }
    }

    pub fn with_cap(mut self, cap: Option<usize>) -> Self {
        self.max_cluster_size = cap;
        self
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(())
}

/// Canonical assignment obtained by replaying `steps` from singletons.
pub(crate) fn assignment_from_steps(n: usize, steps: &[MergeStep]) -> ClusterAssignment {
    let trace = MergeTrace::new(steps.to_vec());
    cut_trace(&trace, n, n - steps.len()).expect("engine traces are well formed")
}

/// Reference implementation: recomputes every average from raw vectors.
pub fn dcpe_naive(codebook: &Codebook, k: usize) -> Result<(ClusterAssignment, MergeTrace)> {
    dcpe_naive_with_metric(codebook, k, Metric::Euclidean)
}

pub fn dcpe_naive_with_metric(
    codebook: &Codebook,
    k: usize,
    metric: Metric,
) -> Result<(ClusterAssignment, MergeTrace)> {
    check_k(codebook.n_tokens(), k)?;
    let steps = naive::run(codebook, metric, k);
    Ok((
        assignment_from_steps(codebook.n_tokens(), &steps),
        MergeTrace::new(steps),
    ))
}

/// Incremental distance-sum matrix version, optionally size-capped.
pub fn dcpe_optimized(
    codebook: &Codebook,
    k: usize,
    max_cluster_size: Option<usize>,
) -> Result<(ClusterAssignment, MergeTrace)> {
    dcpe_with(codebook, &DcpeConfig::new(k).with_cap(max_cluster_size))
}

pub fn dcpe_with(codebook: &Codebook, config: &DcpeConfig) -> Result<(ClusterAssignment, MergeTrace)> {
    let n = codebook.n_tokens();
    check_k(n, config.k)?;
    if let Some(cap) = config.max_cluster_size {
        if cap == 0 || cap.saturating_mul(config.k) < n {
            return Err(Error::InfeasibleCap { cap, k: config.k, n });
        }
    }

    let mut linkage = SumLinkage {
        state: DistanceState::new(codebook, config.metric),
        cap: config.max_cluster_size,
        cap_rule: config.cap_rule,
        argmin: config.argmin,
    };
    let mut live: Vec<usize> = (0..n).collect();
    let steps = agglomerate(&mut linkage, &mut live, config.k, config.scan)?;
    Ok((assignment_from_steps(n, &steps), MergeTrace::new(steps)))
}

struct SumLinkage {
    state: DistanceState,
    cap: Option<usize>,
    cap_rule: CapRule,
    argmin: ArgminRule,
}

impl Linkage for SumLinkage {
    fn n_slots(&self) -> usize {
        self.state.n_slots()
    }

    #[inline]
    fn score(&self, a: usize, b: usize) -> Option<f64> {
        if let Some(cap) = self.cap {
            let (sa, sb) = (self.state.size(a), self.state.size(b));
            let allowed = match self.cap_rule {
                CapRule::MergedSize => sa + sb <= cap,
                CapRule::FreezeOversized => sa <= cap && sb <= cap,
            };
            if !allowed {
                return None;
            }
        }
        Some(match self.argmin {
            ArgminRule::Average => self.state.average(a, b),
            ArgminRule::LiteralSum => self.state.pair_sum(a, b),
        })
    }

    fn merge_distance(&self, a: usize, b: usize) -> f64 {
        self.state.average(a, b)
    }

    fn merge(&mut self, a: usize, b: usize) {
        self.state.merge(a, b);
    }
}
