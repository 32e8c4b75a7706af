use crate::assignment::ClusterAssignment;
use crate::codebook::{Codebook, Matrix};
use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::quantize::quantize;
use crate::remap::{decode_random_selection, remap_to_clusters, TokenSequence};
use crate::rng;

/// Mean embedding distance between each query's quantized token and a
/// random token from the same cluster, over `trials` independent draws.
///
/// Trial `t` decodes with seed `mix(seed, t)`.
pub fn replacement_distortion(
    codebook: &Codebook,
    assignment: &ClusterAssignment,
    queries: &Matrix,
    seed: u64,
    trials: usize,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    if assignment.n_tokens() != codebook.n_tokens() {
        return Err(Error::DimensionMismatch {
            expected: codebook.n_tokens(),
            found: assignment.n_tokens(),
        });
    }
    let tokens = TokenSequence(quantize(queries, codebook)?.indices);
    let clusters = remap_to_clusters(&tokens, assignment)?;

    let mut total = 0.0;
    for trial in 0..trials {
        let replaced = decode_random_selection(&clusters, assignment, rng::mix(seed, trial as u64))?;
        total += tokens
            .as_slice()
            .iter()
            .zip(replaced.as_slice())
            .map(|(&orig, &repl)| Metric::Euclidean.distance(codebook.vector(orig), codebook.vector(repl)))
            .sum::<f64>();
    }
    Ok(total / (trials * tokens.len()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singletons_never_distort() {
        let cb = Codebook::new(vec![0.0, 1.0, 5.0], 3, 1).unwrap();
        let q = Matrix::new(vec![0.2, 4.0, 9.0, -3.0], 4, 1).unwrap();
        let d = replacement_distortion(&cb, &ClusterAssignment::identity(3), &q, 1, 5).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn duplicate_members_never_distort() {
        let cb = Codebook::new(vec![2.0, 2.0], 2, 1).unwrap();
        let q = Matrix::new(vec![1.0, 3.0], 2, 1).unwrap();
        let one = ClusterAssignment::canonical(&[0, 0]);
        assert_eq!(replacement_distortion(&cb, &one, &q, 0, 10).unwrap(), 0.0);
    }

    #[test]
    fn two_member_cluster_expectation() {
        // query 0.0 maps to token 0; the replacement is token 1 half the time
        let cb = Codebook::new(vec![0.0, 1.0], 2, 1).unwrap();
        let q = Matrix::new(vec![0.0], 1, 1).unwrap();
        let one = ClusterAssignment::canonical(&[0, 0]);
        let trials = 20_000;
        let d = replacement_distortion(&cb, &one, &q, 5, trials).unwrap();
        let sigma = (0.25 / trials as f64).sqrt();
        assert!((d - 0.5).abs() <= 3.0 * sigma, "{d}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let cb = Codebook::new(vec![0.0, 1.0], 2, 1).unwrap();
        let q = Matrix::new(vec![0.0, 0.0], 1, 2).unwrap();
        let id = ClusterAssignment::identity(2);
        assert!(replacement_distortion(&cb, &id, &q, 0, 1).is_err());
        let q = Matrix::new(vec![0.0], 1, 1).unwrap();
        assert!(replacement_distortion(&cb, &id, &q, 0, 0).is_err());
    }
}
