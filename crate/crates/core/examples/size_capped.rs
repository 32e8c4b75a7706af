//! Size-capped clustering. The default rule never lets a merge exceed the
//! cap, which can leave the greedy without a legal merge; the freeze rule
//! always reaches `k` but lets clusters grow to twice the cap.
//!
//!     cargo run --release --example size_capped

use codebook_prior::baselines::{kmeans_balanced, KMeansConfig};
use codebook_prior::dcpe::{dcpe_optimized, dcpe_with, CapRule, DcpeConfig};
use codebook_prior::{generate_synthetic, Codebook, SyntheticSpec};

fn spread(sizes: &[usize]) -> String {
    format!(
        "min {} max {} over {} clusters",
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap(),
        sizes.len()
    )
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let codebook = generate_synthetic(&SyntheticSpec::standard(8, 1))?;
    let n = codebook.n_tokens();
    let k = n / 2;

    let (free, _) = dcpe_optimized(&codebook, k, None)?;
    println!("uncapped:         {}", spread(&free.sizes()));
    for cap in [2, 4] {
        let (a, _) = dcpe_optimized(&codebook, k, Some(cap))?;
        println!("cap {cap}:            {}", spread(&a.sizes()));
    }
    let balanced = kmeans_balanced(&codebook, &KMeansConfig::new(k, 0))?;
    println!("balanced k-means: {}", spread(&balanced.sizes()));

    // three well separated pairs, two clusters, cap 3
    let pairs = Codebook::from_rows(&[vec![0.0], vec![0.1], vec![5.0], vec![5.1], vec![10.0], vec![10.1]])?;
    match dcpe_optimized(&pairs, 2, Some(3)) {
        Ok(_) => println!("merged-size rule reached k"),
        Err(e) => println!("merged-size rule: {e}"),
    }
    let cfg = DcpeConfig {
        max_cluster_size: Some(3),
        cap_rule: CapRule::FreezeOversized,
        ..DcpeConfig::new(2)
    };
    let (a, _) = dcpe_with(&pairs, &cfg)?;
    println!("freeze rule: {:?}", a.members());
    Ok(())
}
