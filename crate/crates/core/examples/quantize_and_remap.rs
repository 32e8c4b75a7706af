//! The token pipeline around a clustered codebook: quantize features to
//! tokens, map tokens to clusters for training, sample tokens back from
//! predicted clusters, and pool token logits per cluster.
//!
//!     cargo run --release --example quantize_and_remap

use codebook_prior::dcpe::dcpe_optimized;
use codebook_prior::quantize::quantize;
use codebook_prior::remap::{aggregate_cluster_logits, decode_random_selection, remap_to_clusters, Aggregate};
use codebook_prior::{generate_synthetic, Matrix, SyntheticSpec, TokenSequence};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let codebook = generate_synthetic(&SyntheticSpec::standard(4, 0))?;
    let (assignment, _) = dcpe_optimized(&codebook, codebook.n_tokens() / 4, None)?;

    // stand-in encoder features: noisy copies of a few codebook rows
    let picks = [3usize, 150, 151, 700, 1079, 42];
    let rows: Vec<Vec<f64>> = picks
        .iter()
        .map(|&t| codebook.vector(t).iter().map(|x| x + 0.001).collect())
        .collect();
    let features = Matrix::from_rows(&rows)?;

    let q = quantize(&features, &codebook)?;
    let tokens = TokenSequence(q.indices);
    let clusters = remap_to_clusters(&tokens, &assignment)?;
    println!("tokens   {:?}", tokens.as_slice());
    println!("clusters {:?}", clusters.as_slice());

    for seed in 0..3 {
        let decoded = decode_random_selection(&clusters, &assignment, seed)?;
        assert_eq!(remap_to_clusters(&decoded, &assignment)?, clusters);
        println!("seed {seed}: decoded {:?}", decoded.as_slice());
    }

    let logits: Vec<f64> = (0..codebook.n_tokens()).map(|t| ((t * 37) % 101) as f64 / 10.0).collect();
    let mean = aggregate_cluster_logits(&logits, &assignment, Aggregate::Mean)?;
    let sum = aggregate_cluster_logits(&logits, &assignment, Aggregate::Sum)?;
    let argmax = |v: &[f64]| (0..v.len()).max_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap();
    println!(
        "best cluster by mean logit: {} (size {}); by summed logit: {} (size {})",
        argmax(&mean),
        assignment.members()[argmax(&mean)].len(),
        argmax(&sum),
        assignment.members()[argmax(&sum)].len()
    );
    Ok(())
}
