//! Reference implementations shared by the integration tests. Written
//! independently of the library: no shared code beyond the data types.
#![allow(dead_code)]

use codebook_prior::{ClusterAssignment, Codebook, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn gaussian_codebook(n: usize, dim: usize, seed: u64) -> Codebook {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Codebook::new(data, n, dim).unwrap()
}

pub fn gaussian_matrix(n: usize, dim: usize, seed: u64) -> Matrix {
    gaussian_codebook(n, dim, seed).into_matrix()
}

pub fn line(xs: &[f64]) -> Codebook {
    Codebook::new(xs.to_vec(), xs.len(), 1).unwrap()
}

pub fn euclid(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// One merge as `(survivor, absorbed, distance)`.
pub type Step = (usize, usize, f64);

/// Average linkage over a full square matrix of cluster distances, updated
/// with the Lance-Williams weighted form
/// `d(a∪b, c) = (|a|·d(a,c) + |b|·d(b,c)) / (|a| + |b|)`.
///
/// Clusters are named by their smallest token; ties go to the smallest
/// `(distance, a, b)`.
pub fn upgma(codebook: &Codebook, k: usize) -> (Vec<usize>, Vec<Step>) {
    let n = codebook.n_tokens();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = euclid(codebook.vector(i), codebook.vector(j));
        }
    }
    let mut size = vec![1usize; n];
    let mut alive = vec![true; n];
    let mut owner: Vec<usize> = (0..n).collect();
    let mut steps = Vec::new();
    for _ in 0..n - k {
        let mut best: Option<Step> = None;
        for a in (0..n).filter(|&a| alive[a]) {
            for b in (a + 1..n).filter(|&b| alive[b]) {
                let better = match best {
                    None => true,
                    Some((_, _, bd)) => d[a][b] < bd,
                };
                if better {
                    best = Some((a, b, d[a][b]));
                }
            }
        }
        let (a, b, dist) = best.unwrap();
        for c in 0..n {
            if alive[c] && c != a && c != b {
                let v = (size[a] as f64 * d[a][c] + size[b] as f64 * d[b][c]) / (size[a] + size[b]) as f64;
                d[a][c] = v;
                d[c][a] = v;
            }
        }
        size[a] += size[b];
        alive[b] = false;
        for o in owner.iter_mut() {
            if *o == b {
                *o = a;
            }
        }
        steps.push((a, b, dist));
    }
    (canonical(&owner), steps)
}

/// Relabels so that clusters are numbered by first appearance.
pub fn canonical(raw: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    raw.iter()
        .map(|&r| {
            let next = map.len();
            *map.entry(r).or_insert(next)
        })
        .collect()
}

/// Index of the nearest row by a plain scan, lowest index on ties.
pub fn brute_nearest(query: &[f64], codebook: &Codebook) -> usize {
    let mut best = (0, f64::INFINITY);
    for t in 0..codebook.n_tokens() {
        let d: f64 = query
            .iter()
            .zip(codebook.vector(t))
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if d < best.1 {
            best = (t, d);
        }
    }
    best.0
}

/// Sum of distances between all member pairs of `members`, divided by the
/// number of pairs; 0 for singletons.
pub fn mean_pairwise(codebook: &Codebook, members: &[usize]) -> f64 {
    if members.len() < 2 {
        return 0.0;
    }
    let mut s = 0.0;
    let mut pairs = 0;
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            s += euclid(codebook.vector(a), codebook.vector(b));
            pairs += 1;
        }
    }
    s / pairs as f64
}

/// Every way to split `0..n` into exactly `k` non-empty blocks, as
/// canonical label vectors.
pub fn partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, k: usize, used: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            if used == k {
                out.push(cur.clone());
            }
            return;
        }
        // not enough tokens left to open the remaining blocks
        if k - used.min(k) > n - i {
            return;
        }
        for l in 0..=used.min(k - 1) {
            cur.push(l);
            go(i + 1, n, k, used.max(l + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, 0, &mut Vec::new(), &mut out);
    out
}

pub fn labels(a: &ClusterAssignment) -> Vec<usize> {
    a.labels().to_vec()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Runs the command-line binary in `dir`, returning (exit code, stderr).
pub fn cli(dir: &std::path::Path, args: &[&str]) -> (i32, String) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_codebook-prior"))
        .args(args)
        .current_dir(dir)
        .env_remove("CODEBOOK_PRIOR_THREADS")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}
