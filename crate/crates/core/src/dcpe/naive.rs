use crate::codebook::Codebook;
use crate::metric::Metric;

use super::trace::MergeStep;

/// Token vectors regrouped so that each cluster's members are contiguous.
struct Blocks {
    data: Vec<f64>,
    /// cluster c occupies rows offsets[c]..offsets[c + 1]
    offsets: Vec<usize>,
    dim: usize,
}

impl Blocks {
    fn gather(codebook: &Codebook, clusters: &[Vec<usize>]) -> Self {
        let dim = codebook.dim();
        let mut data = Vec::with_capacity(codebook.n_tokens() * dim);
        let mut offsets = Vec::with_capacity(clusters.len() + 1);
        offsets.push(0);
        for members in clusters {
            for &t in members {
                data.extend_from_slice(codebook.vector(t));
            }
            offsets.push(offsets.last().unwrap() + members.len());
        }
        Self { data, offsets, dim }
    }

    fn rows(&self, from: usize, to: usize) -> &[f64] {
        &self.data[from * self.dim..to * self.dim]
    }
}

/// Adds the distance from `x` to each row of `ys` onto `sums[owner[row]]`.
/// `buf` is scratch space at least as long as `owner`.
fn accumulate(
    metric: Metric,
    x: &[f64],
    ys: &[f64],
    owner: &[usize],
    sums: &mut [f64],
    buf: &mut [f64],
) {
    let dim = x.len();
    let buf = &mut buf[..owner.len()];
    match metric {
        Metric::Euclidean => {
            for (y, o) in ys.chunks_exact(dim).zip(buf.iter_mut()) {
                let mut s = 0.0;
                for (a, b) in x.iter().zip(y) {
                    let t = a - b;
                    s += t * t;
                }
                *o = s;
            }
            for o in buf.iter_mut() {
                *o = o.sqrt();
            }
        }
        Metric::Cosine => {
            for (y, o) in ys.chunks_exact(dim).zip(buf.iter_mut()) {
                *o = Metric::Cosine.distance(x, y);
            }
        }
    }
    for (&c, &d) in owner.iter().zip(buf.iter()) {
        sums[c] += d;
    }
}

/// Greedy merging with every inter-cluster distance recomputed from the
/// token vectors at every step. `O(N³d)` overall.
pub(crate) fn run(codebook: &Codebook, metric: Metric, k: usize) -> Vec<MergeStep> {
    // sorted member lists; list order is ascending smallest member
    let mut clusters: Vec<Vec<usize>> = (0..codebook.n_tokens()).map(|t| vec![t]).collect();
    let mut steps = Vec::with_capacity(clusters.len().saturating_sub(k));
    let n = codebook.n_tokens();
    let mut sums = vec![0.0; n];
    let mut buf = vec![0.0; n];

    while clusters.len() > k {
        let blocks = Blocks::gather(codebook, &clusters);
        let m = clusters.len();
        let owner: Vec<usize> = (0..m)
            .flat_map(|c| std::iter::repeat_n(c, clusters[c].len()))
            .collect();
        let mut best: Option<(usize, usize, f64)> = None;
        for p in 0..m - 1 {
            let (lo, hi) = (blocks.offsets[p], blocks.offsets[p + 1]);
            sums[p + 1..m].fill(0.0);
            for i in lo..hi {
                let x = blocks.rows(i, i + 1);
                accumulate(metric, x, blocks.rows(hi, n), &owner[hi..], &mut sums, &mut buf);
            }
            let np = (hi - lo) as f64;
            for q in p + 1..m {
                let d = sums[q] / (np * clusters[q].len() as f64);
                if best.is_none_or(|(_, _, cur)| d < cur) {
                    best = Some((p, q, d));
                }
            }
        }
        let (p, q, distance) = best.expect("at least two clusters");

        let absorbed = clusters.remove(q);
        steps.push(MergeStep {
            survivor: clusters[p][0],
            absorbed: absorbed[0],
            distance,
        });
        clusters[p].extend(absorbed);
        clusters[p].sort_unstable();
    }
    steps
}
