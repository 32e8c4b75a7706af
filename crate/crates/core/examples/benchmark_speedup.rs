//! Times the from-scratch and the incremental-matrix average-linkage
//! clusterings on a random Gaussian codebook and prints the speedup.
//!
//!     cargo run --release --example benchmark_speedup -- [n] [dim] [repeats] [--skip-naive]

use codebook_prior::algorithm::{Algorithm, RunOptions};
use codebook_prior::eval::run_bench;
use codebook_prior::{generate_synthetic, Component, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let skip_naive = args.iter().any(|a| a == "--skip-naive");
    let mut nums = args.iter().filter(|a| !a.starts_with("--")).map(|s| s.parse::<usize>());
    let n = nums.next().transpose()?.unwrap_or(1024);
    let dim = nums.next().transpose()?.unwrap_or(8);
    let repeats = nums.next().transpose()?.unwrap_or(3);

    let codebook = generate_synthetic(&SyntheticSpec {
        components: vec![Component {
            center: vec![0.0; dim],
            scale: 1.0,
            count: n,
        }],
        seed: 0,
        dim,
    })?;
    let opts = RunOptions::new(n / 2);
    let algos: &[Algorithm] = if skip_naive {
        &[Algorithm::Dcpe]
    } else {
        &[Algorithm::Dcpe, Algorithm::DcpeNaive]
    };
    let results = run_bench(&codebook, algos, repeats, &opts)?;
    for r in &results {
        println!("{}", serde_json::to_string(r)?);
    }
    if let [fast, slow] = results.as_slice() {
        println!("speedup: {:.1}x", slow.wall_time / fast.wall_time);
    }
    Ok(())
}
