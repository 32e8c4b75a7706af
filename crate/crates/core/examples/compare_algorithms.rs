//! Runs every clustering algorithm on the standard non-uniform mixture and
//! prints intra-cluster dissimilarity, size spread and replacement
//! distortion per seed.
//!
//!     cargo run --release --example compare_algorithms -- [seeds] [dim]

use codebook_prior::algorithm::{self, Algorithm, RunOptions};
use codebook_prior::eval::{quality_report, replacement_distortion};
use codebook_prior::{generate_synthetic, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let dim: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(8);

    let algos = [
        Algorithm::Dcpe,
        Algorithm::AggCentroid,
        Algorithm::KMeansInstance,
        Algorithm::KMeans,
        Algorithm::KMeansPlusPlus,
        Algorithm::KMeansBalanced,
    ];
    println!("{:>4} {:>16} {:>12} {:>10} {:>12}", "seed", "algo", "intra", "size_std", "distortion");
    for seed in 0..seeds {
        let codebook = generate_synthetic(&SyntheticSpec::standard(dim, seed))?;
        let queries = generate_synthetic(&SyntheticSpec::standard(dim, seed + 1_000_000))?.into_matrix();
        let opts = RunOptions {
            seed,
            ..RunOptions::new(codebook.n_tokens() / 2)
        };
        for algo in algos {
            let out = algorithm::run(algo, &codebook, &opts)?;
            let report = quality_report(&codebook, &out.assignment)?;
            let distortion = replacement_distortion(&codebook, &out.assignment, &queries, seed, 4)?;
            println!(
                "{seed:>4} {:>16} {:>12.6} {:>10.4} {:>12.6}",
                algo.id(),
                report.mean_intra_pairwise,
                report.size_std,
                distortion
            );
        }
    }
    Ok(())
}
