//! Clusters a small non-uniform codebook with average linkage, stores the
//! merge trace, and derives coarser groupings from it without re-running.
//!
//!     cargo run --release --example cluster_codebook

use codebook_prior::dcpe::{cut_trace, dcpe_optimized, MergeTrace};
use codebook_prior::eval::quality_report;
use codebook_prior::{generate_synthetic, Component, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a tight blob of 60 tokens next to a loose one of 12
    let spec = SyntheticSpec {
        components: vec![
            Component {
                center: vec![0.0, 0.0, 0.0],
                scale: 0.05,
                count: 60,
            },
            Component {
                center: vec![6.0, 0.0, 0.0],
                scale: 1.0,
                count: 12,
            },
        ],
        seed: 7,
        dim: 3,
    };
    let codebook = generate_synthetic(&spec)?;
    let n = codebook.n_tokens();

    let (assignment, trace) = dcpe_optimized(&codebook, 8, None)?;
    println!("{} merges, last at distance {:.3}", trace.len(), trace.steps.last().unwrap().distance);
    for (c, members) in assignment.members().iter().enumerate() {
        let dense = members.iter().filter(|&&t| t < 60).count();
        println!("cluster {c}: {} tokens ({dense} from the tight blob)", members.len());
    }

    // the trace is plain JSONL; any k between 8 and N can be cut from it
    let mut jsonl = Vec::new();
    trace.write_jsonl(&mut jsonl)?;
    let trace = MergeTrace::read_jsonl(jsonl.as_slice())?;
    for k in [8, 16, 36] {
        let a = cut_trace(&trace, n, k)?;
        let r = quality_report(&codebook, &a)?;
        println!(
            "k = {k:>2}: mean intra-cluster distance {:.4}, size std {:.2}",
            r.mean_intra_pairwise, r.size_std
        );
    }
    Ok(())
}
