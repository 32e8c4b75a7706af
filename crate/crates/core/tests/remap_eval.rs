mod common;

use codebook_prior::eval::{quality_report, replacement_distortion};
use codebook_prior::quantize::quantize;
use codebook_prior::remap::{aggregate_cluster_logits, decode_random_selection, remap_to_clusters, Aggregate};
use codebook_prior::{ClusterAssignment, Codebook, Matrix, SyntheticSpec, TokenSequence};
use common::*;
use proptest::prelude::*;

/// Random assignment of `n` tokens to `k ≤ n` non-empty clusters.
fn assignment() -> impl Strategy<Value = ClusterAssignment> {
    (1usize..40).prop_flat_map(|n| {
        (Just(n), 1..=n).prop_flat_map(|(n, k)| {
            prop::collection::vec(0..k, n).prop_map(move |mut raw| {
                // first k tokens pin every cluster
                for (c, slot) in raw.iter_mut().take(k).enumerate() {
                    *slot = c;
                }
                ClusterAssignment::from_labels(raw).unwrap()
            })
        })
    })
}

fn assignment_and_clusters() -> impl Strategy<Value = (ClusterAssignment, Vec<usize>)> {
    assignment().prop_flat_map(|a| {
        let k = a.n_clusters();
        (Just(a), prop::collection::vec(0..k, 0..64))
    })
}

proptest! {
    #[test]
    fn decode_then_remap_is_identity((a, seq) in assignment_and_clusters(), seed in any::<u64>()) {
        let s = TokenSequence(seq);
        let tokens = decode_random_selection(&s, &a, seed).unwrap();
        prop_assert_eq!(tokens.len(), s.len());
        prop_assert_eq!(remap_to_clusters(&tokens, &a).unwrap(), s.clone());
        prop_assert_eq!(decode_random_selection(&s, &a, seed).unwrap(), tokens);
    }

    #[test]
    fn decoding_a_prefix_gives_a_prefix((a, seq) in assignment_and_clusters(), seed in any::<u64>(), cut in any::<prop::sample::Index>()) {
        let full = decode_random_selection(&TokenSequence(seq.clone()), &a, seed).unwrap();
        let m = if seq.is_empty() { 0 } else { cut.index(seq.len()) };
        let part = decode_random_selection(&TokenSequence(seq[..m].to_vec()), &a, seed).unwrap();
        prop_assert_eq!(part.as_slice(), &full.as_slice()[..m]);
    }

    #[test]
    fn mean_is_sum_over_size(a in assignment(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let logits: Vec<f64> = (0..a.n_tokens()).map(|_| rng.random_range(-50.0..50.0)).collect();
        let mean = aggregate_cluster_logits(&logits, &a, Aggregate::Mean).unwrap();
        let sum = aggregate_cluster_logits(&logits, &a, Aggregate::Sum).unwrap();
        for ((m, s), size) in mean.iter().zip(&sum).zip(a.sizes()) {
            prop_assert_eq!(*m, s / size as f64);
        }
    }

    #[test]
    fn quality_is_relabeling_invariant(a in assignment(), seed in any::<u64>()) {
        let cb = gaussian_codebook(a.n_tokens(), 3, seed);
        let k = a.n_clusters();
        // reverse the cluster numbering
        let flipped = ClusterAssignment::from_labels(a.labels().iter().map(|&l| k - 1 - l).collect()).unwrap();
        let r1 = quality_report(&cb, &a).unwrap();
        let r2 = quality_report(&cb, &flipped).unwrap();
        prop_assert!(rel_close(r1.mean_intra_pairwise, r2.mean_intra_pairwise, 1e-12) || r1.mean_intra_pairwise == 0.0);
        prop_assert_eq!(&r1.size_histogram, &r2.size_histogram);
        prop_assert!(rel_close(r1.size_std, r2.size_std, 1e-12) || r1.size_std == 0.0);
        prop_assert_eq!(r1.size_histogram.values().sum::<usize>(), k);
        prop_assert_eq!(r1.size_histogram.iter().map(|(s, c)| s * c).sum::<usize>(), a.n_tokens());
        let brute = a.members().iter().map(|m| mean_pairwise(&cb, m)).sum::<f64>() / k as f64;
        prop_assert!(rel_close(r1.mean_intra_pairwise, brute, 1e-9) || brute == 0.0);
    }

    #[test]
    fn quantize_matches_brute_force(n in 1usize..50, m in 1usize..30, d in 1usize..6, seed in any::<u64>()) {
        let cb = gaussian_codebook(n, d, seed);
        let q = gaussian_matrix(m, d, seed ^ 0x5555);
        let got = quantize(&q, &cb).unwrap();
        for (i, row) in q.iter_rows().enumerate() {
            prop_assert_eq!(got.indices[i], brute_nearest(row, &cb));
            prop_assert!(rel_close(got.distances[i], euclid(row, cb.vector(got.indices[i])), 1e-12) || got.distances[i] < 1e-300);
        }
    }
}

#[test]
fn equal_sizes_share_the_argmax() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for trial in 0..500 {
        let (k, size) = (rng.random_range(1..10), rng.random_range(1..6));
        let raw: Vec<usize> = (0..k * size).map(|t| t % k).collect();
        let a = ClusterAssignment::from_labels(raw).unwrap();
        let logits: Vec<f64> = (0..k * size).map(|_| rng.random_range(-3.0..3.0)).collect();
        let argmax = |v: Vec<f64>| (0..v.len()).max_by(|&i, &j| v[i].total_cmp(&v[j]).then(j.cmp(&i))).unwrap();
        assert_eq!(
            argmax(aggregate_cluster_logits(&logits, &a, Aggregate::Mean).unwrap()),
            argmax(aggregate_cluster_logits(&logits, &a, Aggregate::Sum).unwrap()),
            "trial {trial}"
        );
    }
}

#[test]
fn two_member_draws_are_fair() {
    let a = ClusterAssignment::from_labels(vec![0, 0]).unwrap();
    let n = 100_000;
    let out = decode_random_selection(&TokenSequence(vec![0; n]), &a, 42).unwrap();
    let ones = out.as_slice().iter().filter(|&&t| t == 1).count() as f64;
    let sigma = (n as f64 * 0.25).sqrt();
    assert!((ones - n as f64 / 2.0).abs() <= 3.0 * sigma, "{ones} of {n}");
}

#[test]
fn singletons_decode_to_themselves() {
    let a = ClusterAssignment::identity(6);
    let s = TokenSequence(vec![5, 0, 3, 3]);
    for seed in [0, 1, u64::MAX] {
        assert_eq!(decode_random_selection(&s, &a, seed).unwrap(), s);
    }
}

#[test]
fn remap_rejects_foreign_tokens() {
    let a = ClusterAssignment::identity(3);
    assert!(remap_to_clusters(&TokenSequence(vec![0, 3]), &a).is_err());
    assert!(decode_random_selection(&TokenSequence(vec![3]), &a, 0).is_err());
    assert!(aggregate_cluster_logits(&[1.0, 2.0], &a, Aggregate::Mean).is_err());
}

#[test]
fn distortion_of_a_two_token_cluster() {
    let cb = Codebook::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
    let a = ClusterAssignment::from_labels(vec![0, 0]).unwrap();
    let q = Matrix::from_rows(&[vec![0.0]]).unwrap();
    let trials = 20_000;
    let d = replacement_distortion(&cb, &a, &q, 3, trials).unwrap();
    let sigma = 0.5 / (trials as f64).sqrt();
    assert!((d - 0.5).abs() <= 3.0 * sigma, "{d}");
    let id = ClusterAssignment::identity(2);
    assert_eq!(replacement_distortion(&cb, &id, &q, 3, 5).unwrap(), 0.0);
}

#[test]
fn distortion_is_zero_for_duplicate_members() {
    let cb = Codebook::from_rows(&[vec![2.0, 1.0], vec![2.0, 1.0], vec![9.0, 0.0]]).unwrap();
    let a = ClusterAssignment::from_labels(vec![0, 0, 1]).unwrap();
    let q = gaussian_matrix(30, 2, 5);
    assert_eq!(replacement_distortion(&cb, &a, &q, 0, 10).unwrap(), 0.0);
}

#[test]
fn quality_fixtures() {
    let cb = line(&[0.0, 1.0, 10.0]);
    let r = quality_report(&cb, &ClusterAssignment::from_labels(vec![0, 0, 1]).unwrap()).unwrap();
    assert_eq!(r.mean_intra_pairwise, 0.5);
    assert_eq!(r.size_std, 0.5);
    let r = quality_report(&line(&[0.0, 1.0, 2.0]), &ClusterAssignment::from_labels(vec![0; 3]).unwrap()).unwrap();
    assert!((r.mean_intra_pairwise - 4.0 / 3.0).abs() < 1e-15);
}

#[test]
fn synthetic_components_are_contiguous() {
    let spec = SyntheticSpec::standard(4, 9);
    let cb = codebook_prior::generate_synthetic(&spec).unwrap();
    let quant = quantize(cb.matrix(), &cb).unwrap();
    assert_eq!(quant.indices, (0..cb.n_tokens()).collect::<Vec<_>>());
    for (c, range) in spec.components.iter().zip(spec.row_ranges()) {
        for t in range {
            let v = cb.vector(t);
            let dev = euclid(v, &c.center);
            assert!(dev < 8.0 * c.scale * (v.len() as f64).sqrt(), "token {t} is {dev} from its center");
        }
    }
}
