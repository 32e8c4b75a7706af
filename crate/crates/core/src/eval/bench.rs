use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algorithm::{self, Algorithm, RunOptions};
use crate::codebook::Codebook;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub algo: String,
    pub n_tokens: usize,
    pub dim: usize,
    pub k: usize,
    /// Median wall-clock seconds over `timings`.
    pub wall_time: f64,
    /// Every repeat, in run order.
    pub timings: Vec<f64>,
    /// Size of the largest distance/cost matrix the algorithm allocates.
    pub peak_matrix_bytes: u64,
}

/// Times each algorithm `repeats` times on the same codebook, one after the
/// other, and reports the median.
pub fn run_bench(
    codebook: &Codebook,
    algos: &[Algorithm],
    repeats: usize,
    opts: &RunOptions,
) -> Result<Vec<BenchResult>> {
    if repeats == 0 {
        return Err(Error::Invalid("repeats must be at least 1".into()));
    }
    algos
        .iter()
        .map(|&algo| {
            let mut timings = Vec::with_capacity(repeats);
            for _ in 0..repeats {
                let start = Instant::now();
                let out = algorithm::run(algo, codebook, opts)?;
                let elapsed = start.elapsed().as_secs_f64();
                std::hint::black_box(out);
                // sub-resolution timings still count as positive
                timings.push(elapsed.max(1e-9));
            }
            Ok(BenchResult {
                algo: algo.id().to_string(),
                n_tokens: codebook.n_tokens(),
                dim: codebook.dim(),
                k: opts.k,
                wall_time: median(&timings),
                timings,
                peak_matrix_bytes: matrix_bytes(algo, codebook.n_tokens(), codebook.dim(), opts.k),
            })
        })
        .collect()
}

fn matrix_bytes(algo: Algorithm, n: usize, d: usize, k: usize) -> u64 {
    let f = std::mem::size_of::<f64>() as u64;
    let (n, d, k) = (n as u64, d as u64, k as u64);
    match algo {
        Algorithm::Dcpe => n * n.saturating_sub(1) / 2 * f,
        Algorithm::DcpeNaive => 0,
        Algorithm::AggCentroid => 2 * n * d * f,
        Algorithm::KMeans | Algorithm::KMeansPlusPlus | Algorithm::KMeansInstance => k * d * f,
        // token × centroid costs plus the sorted pair list
        Algorithm::KMeansBalanced => n * k * f + n * k * (f + 16),
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}
