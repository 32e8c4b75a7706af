//! End-to-end acceptance suite. Criteria run one after another inside a
//! single test so that the timing criterion has the machine to itself.
//!
//!     cargo test --release -p codebook-prior --test acceptance -- --nocapture

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use codebook_prior::algorithm::{self, Algorithm, RunOptions};
use codebook_prior::baselines::{kmeans_balanced, KMeansConfig};
use codebook_prior::dcpe::{dcpe_naive, dcpe_optimized, MergeTrace};
use codebook_prior::eval::{quality_report, replacement_distortion, run_bench};
use codebook_prior::quantize::quantize;
use codebook_prior::remap::{aggregate_cluster_logits, decode_random_selection, remap_to_clusters, Aggregate};
use codebook_prior::{generate_synthetic, ClusterAssignment, Codebook, Matrix, SyntheticSpec, TokenSequence};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn same_trace(a: &MergeTrace, b: &[Step]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(s, t)| (s.survivor, s.absorbed) == (t.0, t.1) && rel_close(s.distance, t.2, 1e-9))
}

fn as_steps(t: &MergeTrace) -> Vec<Step> {
    t.iter().map(|s| (s.survivor, s.absorbed, s.distance)).collect()
}

fn optimized_matches_naive() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for i in 0..50u64 {
        let n = [64, 256, 512][i as usize % 3];
        let d = [2, 8, 32][i as usize / 3 % 3];
        let cb = gaussian_codebook(n, d, 1000 + i);
        for k in [n / 8, n / 4, n / 2] {
            let (la, ta) = dcpe_naive(&cb, k).unwrap();
            let (lb, tb) = dcpe_optimized(&cb, k, None).unwrap();
            check(la == lb, || format!("labels differ: codebook {i}, N={n}, d={d}, k={k}"))?;
            check(same_trace(&tb, &as_steps(&ta)), || {
                format!("traces differ: codebook {i}, N={n}, d={d}, k={k}")
            })?;
            cases += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 120.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{cases} cases identical in {secs:.1} s"))
}

fn matches_upgma() -> Outcome {
    let start = Instant::now();
    for i in 0..20u64 {
        let n = [16, 48, 100, 200, 256][i as usize % 5];
        let d = 1 + i as usize % 6;
        let k = 1 + (i as usize * 37) % n;
        let cb = gaussian_codebook(n, d, 2000 + i);
        let (want_labels, want_steps) = upgma(&cb, k);
        let (la, ta) = dcpe_naive(&cb, k).unwrap();
        let (lb, tb) = dcpe_optimized(&cb, k, None).unwrap();
        for (name, l, t) in [("naive", la, ta), ("optimized", lb, tb)] {
            check(labels(&l) == want_labels && same_trace(&t, &want_steps), || {
                format!("{name} disagrees with the oracle: codebook {i}, N={n}, k={k}")
            })?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("20 codebooks in {secs:.1} s"))
}

fn hand_fixtures() -> Outcome {
    let cb = line(&[0.0, 1.0, 10.0, 11.0]);
    let want: [(usize, Vec<usize>, Vec<Step>); 3] = [
        (3, vec![0, 0, 1, 2], vec![(0, 1, 1.0)]),
        (2, vec![0, 0, 1, 1], vec![(0, 1, 1.0), (2, 3, 1.0)]),
        (1, vec![0, 0, 0, 0], vec![(0, 1, 1.0), (2, 3, 1.0), (0, 2, 10.0)]),
    ];
    for (k, l, t) in want {
        for (name, (a, tr)) in [("naive", dcpe_naive(&cb, k).unwrap()), ("optimized", dcpe_optimized(&cb, k, None).unwrap())] {
            check(labels(&a) == l && as_steps(&tr) == t, || {
                format!("{name} k={k}: got {:?} {:?}", a.labels(), as_steps(&tr))
            })?;
        }
    }
    let cb = line(&[0.0, 0.1, 0.2, 10.0]);
    let (a, t) = dcpe_optimized(&cb, 2, Some(2)).unwrap();
    let want = vec![(0, 1, 0.1), (2, 3, (10.0f64 - 0.2).abs())];
    check(labels(&a) == [0, 0, 1, 1] && as_steps(&t) == want, || {
        format!("cap fixture: got {:?} {:?}", a.labels(), as_steps(&t))
    })?;
    Ok("4-point line at k = 1, 2, 3 and the cap fixture".into())
}

fn speedup() -> Outcome {
    let cb = gaussian_codebook(4096, 8, 4);
    let opts = RunOptions::new(2048);
    let r = run_bench(&cb, &[Algorithm::Dcpe, Algorithm::DcpeNaive], 3, &opts).unwrap();
    let ratio = r[1].wall_time / r[0].wall_time;
    check(ratio >= 50.0, || {
        format!("speedup {ratio:.1}x (optimized {:.3} s, naive {:.1} s)", r[0].wall_time, r[1].wall_time)
    })?;
    let big = gaussian_codebook(16384, 8, 5);
    let r2 = run_bench(&big, &[Algorithm::Dcpe], 1, &RunOptions::new(8192)).unwrap();
    check(r2[0].wall_time <= 600.0, || format!("N=16384 took {:.1} s", r2[0].wall_time))?;
    Ok(format!(
        "N=4096: {ratio:.0}x (optimized {:.3} s, naive {:.1} s); N=16384: {:.1} s",
        r[0].wall_time, r[1].wall_time, r2[0].wall_time
    ))
}

struct SeedScores {
    intra: f64,
    size_std: f64,
    distortion: f64,
}

fn scores(algo: Algorithm, cb: &Codebook, queries: &Matrix, seed: u64) -> SeedScores {
    let opts = RunOptions {
        seed,
        ..RunOptions::new(cb.n_tokens() / 2)
    };
    let a = algorithm::run(algo, cb, &opts).unwrap().assignment;
    let r = quality_report(cb, &a).unwrap();
    SeedScores {
        intra: r.mean_intra_pairwise,
        size_std: r.size_std,
        distortion: replacement_distortion(cb, &a, queries, seed, 4).unwrap(),
    }
}

fn standard_suite(seed: u64) -> (Codebook, Matrix) {
    let cb = generate_synthetic(&SyntheticSpec::standard(8, seed)).unwrap();
    let queries = generate_synthetic(&SyntheticSpec::standard(8, seed + 1_000_000)).unwrap().into_matrix();
    (cb, queries)
}

fn rate(wins: usize) -> f64 {
    wins as f64 / 20.0
}

fn discriminativeness() -> Outcome {
    let (mut intra, mut std, mut dist) = (0, 0, 0);
    for seed in 0..20 {
        let (cb, q) = standard_suite(seed);
        let d = scores(Algorithm::Dcpe, &cb, &q, seed);
        let k = scores(Algorithm::KMeans, &cb, &q, seed);
        intra += usize::from(d.intra < k.intra);
        dist += usize::from(d.distortion <= k.distortion);
        std += usize::from(d.size_std > k.size_std);
    }
    let msg = format!(
        "DCPE vs k-means wins: intra {:.0}%, distortion {:.0}%, size_std {:.0}%",
        100.0 * rate(intra),
        100.0 * rate(dist),
        100.0 * rate(std)
    );
    check(rate(intra) >= 0.8 && rate(dist) >= 0.8 && rate(std) >= 0.8, || msg.clone())?;
    Ok(msg)
}

fn ablation_order() -> Outcome {
    let (mut vs_centroid, mut chain, mut all) = (0, 0, 0);
    for seed in 0..20 {
        let (cb, q) = standard_suite(seed);
        let intra = |algo| scores(algo, &cb, &q, seed).intra;
        let dcpe = intra(Algorithm::Dcpe);
        let centroid = intra(Algorithm::AggCentroid);
        let instance = intra(Algorithm::KMeansInstance);
        let kmeans = intra(Algorithm::KMeans);
        let a = dcpe <= centroid;
        let b = dcpe <= instance && instance <= kmeans;
        vs_centroid += usize::from(a);
        chain += usize::from(b);
        all += usize::from(a && b);
    }
    let msg = format!(
        "DCPE <= centroid in {:.0}%, DCPE <= instance <= k-means in {:.0}%, both in {:.0}% of seeds",
        100.0 * rate(vs_centroid),
        100.0 * rate(chain),
        100.0 * rate(all)
    );
    check(rate(all) >= 0.7, || msg.clone())?;
    Ok(msg)
}

fn caps() -> Outcome {
    let mut runs = 0;
    for i in 0..20u64 {
        let n = [64, 100, 128, 256][i as usize % 4];
        let cb = gaussian_codebook(n, 1 + i as usize % 8, 7000 + i);
        // every cap at or above ⌈N/k⌉ reaches k here: while more than N/2
        // clusters remain, at least two are singletons
        let k = n / 2;
        let base = n.div_ceil(k);
        for m in [base, 2 * base] {
            let (a, _) = dcpe_optimized(&cb, k, Some(m)).map_err(|e| format!("codebook {i}, cap {m}: {e}"))?;
            check(a.n_clusters() == k && a.sizes().iter().all(|&s| s <= m), || {
                format!("codebook {i}, cap {m}: sizes {:?}", a.sizes())
            })?;
            runs += 1;
        }
        for k in [2, n / 8, n / 3, n / 2, n - 1] {
            let a = kmeans_balanced(&cb, &KMeansConfig::new(k, i)).unwrap();
            let s = a.sizes();
            check(s.len() == k && s.iter().max().unwrap() - s.iter().min().unwrap() <= 1, || {
                format!("balanced codebook {i}, k={k}: sizes {s:?}")
            })?;
        }
    }
    Ok(format!("{runs} capped runs within cap at k = N/2, balanced spread <= 1"))
}

fn quantizer() -> Outcome {
    for i in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        let (n, m, d) = (rng.random_range(1..200), rng.random_range(1..200), rng.random_range(1..16));
        let cb = gaussian_codebook(n, d, 8000 + i);
        let q = gaussian_matrix(m, d, 9000 + i);
        let got = quantize(&q, &cb).unwrap();
        for (j, row) in q.iter_rows().enumerate() {
            check(got.indices[j] == brute_nearest(row, &cb), || format!("query set {i}, query {j}"))?;
        }
    }
    // exact ties: duplicated rows and a query midway between two tokens
    let cb = Codebook::from_rows(&[vec![4.0, 0.0], vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap();
    let q = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0], vec![-1.0, 0.0]]).unwrap();
    let got = quantize(&q, &cb).unwrap().indices;
    check(got == [1, 1, 0, 1], || format!("ties resolved to {got:?}"))?;
    Ok("100 query sets match brute force; ties go to the lowest index".into())
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..1000 {
        let n = rng.random_range(1..300);
        let k = rng.random_range(1..=n);
        let raw: Vec<usize> = (0..n).map(|t| if t < k { t } else { rng.random_range(0..k) }).collect();
        let a = ClusterAssignment::from_labels(raw).unwrap();
        let seq = TokenSequence((0..rng.random_range(0..200)).map(|_| rng.random_range(0..k)).collect());
        for seed in 0..10 {
            let tokens = decode_random_selection(&seq, &a, seed).unwrap();
            check(remap_to_clusters(&tokens, &a).unwrap() == seq, || format!("sequence {i}, seed {seed}"))?;
        }
        let logits: Vec<f64> = (0..n).map(|_| rng.random_range(-20.0..20.0)).collect();
        let mean = aggregate_cluster_logits(&logits, &a, Aggregate::Mean).unwrap();
        let sum = aggregate_cluster_logits(&logits, &a, Aggregate::Sum).unwrap();
        check(mean.iter().zip(&sum).zip(a.sizes()).all(|((m, s), z)| *m == s / z as f64), || {
            format!("mean != sum / size for sequence {i}")
        })?;
    }
    Ok("1000 sequences x 10 seeds; mean == sum / size exactly".into())
}

fn run_twice(dir: &Path, args: &[&str], outputs: &[&str]) -> Result<Vec<Vec<u8>>, String> {
    let mut seen: Vec<Vec<Vec<u8>>> = Vec::new();
    for _ in 0..2 {
        let (code, err) = cli(dir, args);
        check(code == 0, || format!("{args:?} exited {code}: {err}"))?;
        let mut files = Vec::new();
        for o in outputs {
            files.push(fs::read(dir.join(o)).map_err(|e| format!("{o}: {e}"))?);
            files.push(fs::read(dir.join(format!("{o}.manifest.json"))).map_err(|e| format!("{o} manifest: {e}"))?);
        }
        seen.push(files);
    }
    check(seen[0] == seen[1], || format!("{args:?} is not reproducible"))?;
    Ok(seen.pop().unwrap())
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = tmp.path();
    run_twice(d, &["synth", "--preset", "standard", "--dim", "4", "--seed", "1", "--out", "cb.npy"], &["cb.npy"])?;
    run_twice(d, &["synth", "--preset", "standard", "--dim", "4", "--seed", "2", "--out", "q.npy"], &["q.npy"])?;
    run_twice(d, &["quantize", "--queries", "q.npy", "--codebook", "cb.npy", "--out", "tok.npy", "--distances-out", "dist.npy"], &["tok.npy", "dist.npy"])?;
    for algo in ["dcpe", "dcpe-naive", "kmeans", "kmeanspp", "kmeans-balanced", "agg-centroid", "kmeans-instance"] {
        let out = format!("l-{algo}.npy");
        run_twice(d, &["cluster", "--input", "cb.npy", "--algo", algo, "--k", "540", "--seed", "5", "--labels-out", &out], &[&out])?;
    }
    run_twice(d, &["cluster", "--input", "cb.npy", "--k", "540", "--max-cluster-size", "4", "--labels-out", "cap.npy", "--trace-out", "t.jsonl"], &["cap.npy", "t.jsonl"])?;
    run_twice(d, &["cut", "--trace", "t.jsonl", "--n-tokens", "1080", "--k", "700", "--labels-out", "cut.npy"], &["cut.npy"])?;
    run_twice(d, &["remap", "--input", "tok.npy", "--labels", "l-dcpe.npy", "--out", "clu.npy"], &["clu.npy"])?;
    run_twice(d, &["decode", "--input", "clu.npy", "--labels", "l-dcpe.npy", "--seed", "3", "--out", "dec.npy"], &["dec.npy"])?;
    run_twice(d, &["eval", "--input", "cb.npy", "--labels", "l-dcpe.npy", "--queries", "q.npy", "--seed", "3", "--out", "r.json", "--histogram-csv", "h.csv"], &["r.json", "h.csv"])?;

    // wall-clock fields differ between runs by nature; everything else must not
    let bench = ["bench", "--input", "q.npy", "--algos", "dcpe,kmeans", "--k", "200", "--repeats", "1", "--out", "b.jsonl"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let (code, err) = cli(d, &bench);
        check(code == 0, || format!("bench exited {code}: {err}"))?;
        let text = fs::read_to_string(d.join("b.jsonl")).map_err(|e| e.to_string())?;
        let stripped: Vec<serde_json::Value> = text
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                let o = v.as_object_mut().unwrap();
                o.remove("wall_time");
                o.remove("timings");
                v
            })
            .collect();
        runs.push((stripped, fs::read(d.join("b.jsonl.manifest.json")).map_err(|e| e.to_string())?));
    }
    check(runs[0] == runs[1], || "bench output differs outside timing fields".into())?;
    Ok("all subcommands byte-identical across reruns (bench: all but timings)".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("optimized == naive", optimized_matches_naive),
        ("UPGMA oracle", matches_upgma),
        ("hand-traced fixtures", hand_fixtures),
        ("speedup and 16k run", speedup),
        ("DCPE vs k-means", discriminativeness),
        ("ablation ordering", ablation_order),
        ("size caps", caps),
        ("quantizer", quantizer),
        ("remap/decode round trip", round_trip),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
