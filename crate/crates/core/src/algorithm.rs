//! Registry of every clustering algorithm under a stable string id.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assignment::ClusterAssignment;
use crate::baselines::{self, Init, KMeansConfig};
use crate::codebook::Codebook;
use crate::dcpe::{self, ArgminRule, CapRule, DcpeConfig, MergeTrace};
use crate::error::{Error, Result};
use crate::metric::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    Dcpe,
    DcpeNaive,
    KMeans,
    KMeansPlusPlus,
    KMeansBalanced,
    AggCentroid,
    KMeansInstance,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Dcpe,
        Algorithm::DcpeNaive,
        Algorithm::KMeans,
        Algorithm::KMeansPlusPlus,
        Algorithm::KMeansBalanced,
        Algorithm::AggCentroid,
        Algorithm::KMeansInstance,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Dcpe => "dcpe",
            Algorithm::DcpeNaive => "dcpe-naive",
            Algorithm::KMeans => "kmeans",
            Algorithm::KMeansPlusPlus => "kmeanspp",
            Algorithm::KMeansBalanced => "kmeans-balanced",
            Algorithm::AggCentroid => "agg-centroid",
            Algorithm::KMeansInstance => "kmeans-instance",
        }
    }

    /// Agglomerative algorithms emit a merge trace.
    pub fn has_trace(self) -> bool {
        matches!(self, Algorithm::Dcpe | Algorithm::DcpeNaive | Algorithm::AggCentroid)
    }

    pub fn is_seeded(self) -> bool {
        matches!(
            self,
            Algorithm::KMeans | Algorithm::KMeansPlusPlus | Algorithm::KMeansBalanced | Algorithm::KMeansInstance
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

/// Parameters shared by all algorithms; each uses the subset it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub k: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
    pub max_cluster_size: Option<usize>,
    pub cap_rule: CapRule,
    pub metric: Metric,
    pub literal_sum_argmin: bool,
}

impl RunOptions {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            seed: 0,
            max_iters: 300,
            tol: 0.0,
            max_cluster_size: None,
            cap_rule: CapRule::default(),
            metric: Metric::default(),
            literal_sum_argmin: false,
        }
    }

    fn kmeans(&self, init: Init) -> KMeansConfig {
        KMeansConfig {
            k: self.k,
            max_iters: self.max_iters,
            seed: self.seed,
            init,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Clustering {
    pub assignment: ClusterAssignment,
    pub trace: Option<MergeTrace>,
}

pub fn run(algo: Algorithm, codebook: &Codebook, opts: &RunOptions) -> Result<Clustering> {
    let with_trace = |(assignment, trace): (ClusterAssignment, MergeTrace)| Clustering {
        assignment,
        trace: Some(trace),
    };
    let plain = |assignment| Clustering {
        assignment,
        trace: None,
    };
    Ok(match algo {
        Algorithm::Dcpe => {
            let cfg = DcpeConfig {
                max_cluster_size: opts.max_cluster_size,
                cap_rule: opts.cap_rule,
                metric: opts.metric,
                argmin: if opts.literal_sum_argmin {
                    ArgminRule::LiteralSum
                } else {
                    ArgminRule::Average
                },
                ..DcpeConfig::new(opts.k)
            };
            with_trace(dcpe::dcpe_with(codebook, &cfg)?)
        }
        Algorithm::DcpeNaive => with_trace(dcpe::dcpe_naive_with_metric(codebook, opts.k, opts.metric)?),
        Algorithm::KMeans => plain(baselines::kmeans(codebook, &opts.kmeans(Init::RandomTokens))?),
        Algorithm::KMeansPlusPlus => plain(baselines::kmeans(codebook, &opts.kmeans(Init::PlusPlus))?),
        Algorithm::KMeansBalanced => plain(baselines::kmeans_balanced(codebook, &opts.kmeans(Init::RandomTokens))?),
        Algorithm::AggCentroid => with_trace(baselines::agglomerative_centroid(codebook, opts.k)?),
        Algorithm::KMeansInstance => {
            plain(baselines::kmeans_instance_distance(codebook, &opts.kmeans(Init::RandomTokens))?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_roundtrip() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert!(matches!("dbscan".parse::<Algorithm>(), Err(Error::UnknownAlgorithm(_))));
    }

    #[test]
    fn every_algorithm_solves_the_four_point_line() {
        let cb = Codebook::new(vec![0.0, 1.0, 10.0, 11.0], 4, 1).unwrap();
        for a in Algorithm::ALL {
            let out = run(a, &cb, &RunOptions::new(2)).unwrap();
            assert_eq!(out.assignment.labels(), &[0, 0, 1, 1], "{a}");
            assert_eq!(out.trace.is_some(), a.has_trace());
        }
    }
}
