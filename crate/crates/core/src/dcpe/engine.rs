//! Greedy merge loop shared by every matrix-based agglomerative variant.
//!
//! A [`Linkage`] exposes a score for each live cluster pair `(a, b)`,
//! `a < b`, where a cluster is identified by its smallest member token.
//! The driver repeatedly merges the pair with the smallest
//! `(score, a, b)` in lexicographic order, so ties go to the smallest `a`
//! and then the smallest `b`.
//!
//! Two exhaustive scans are provided. [`ScanStrategy::FullScan`] visits
//! every live pair at every step. [`ScanStrategy::RowMinima`] keeps, for
//! each row `a`, the best `(score, b)` over `b > a`, and after a merge of
//! `b` into `a` only re-derives what the merge can have changed: row `a`,
//! rows whose cached best was `a` or `b`, and the single entry `(c, a)` of
//! every row `c < a`. This relies on a merge changing no score other than
//! those involving `a` or `b`, and on pair feasibility depending only on
//! the two clusters involved. Both strategies return the same merges.

use crate::error::{Error, Result};

use super::trace::MergeStep;

pub(crate) trait Linkage {
    fn n_slots(&self) -> usize;
    /// Selection key for merging `b` into `a` (`a < b`, both live), or
    /// `None` when the pair may not merge.
    fn score(&self, a: usize, b: usize) -> Option<f64>;
    /// Distance recorded in the trace for a selected pair.
    fn merge_distance(&self, a: usize, b: usize) -> f64;
    fn merge(&mut self, a: usize, b: usize);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanStrategy {
    /// Cached per-row minima; exact, and the default.
    #[default]
    RowMinima,
    /// Re-scan the whole upper triangle every step.
    FullScan,
}

#[derive(Debug, Clone, Copy)]
struct Best {
    score: f64,
    b: usize,
}

#[inline]
fn better(score: f64, b: usize, than: Option<Best>) -> bool {
    match than {
        None => true,
        Some(t) => score < t.score || (score == t.score && b < t.b),
    }
}

/// Runs merges until `k` clusters remain. `live` lists the live slots in
/// ascending order and is updated in place.
pub(crate) fn agglomerate<L: Linkage>(
    linkage: &mut L,
    live: &mut Vec<usize>,
    k: usize,
    strategy: ScanStrategy,
) -> Result<Vec<MergeStep>> {
    match strategy {
        ScanStrategy::FullScan => full_scan(linkage, live, k),
        ScanStrategy::RowMinima => row_minima(linkage, live, k),
    }
}

fn stalled(live: usize, k: usize) -> Error {
    Error::Invalid(format!(
        "no feasible merge left at {live} clusters (target {k}); the size cap blocks every remaining pair"
    ))
}

fn full_scan<L: Linkage>(linkage: &mut L, live: &mut Vec<usize>, k: usize) -> Result<Vec<MergeStep>> {
    let mut steps = Vec::with_capacity(live.len().saturating_sub(k));
    while live.len() > k {
        let mut best: Option<(usize, Best)> = None;
        for (i, &a) in live.iter().enumerate() {
            let mut row: Option<Best> = None;
            for &b in &live[i + 1..] {
                if let Some(s) = linkage.score(a, b) {
                    if better(s, b, row) {
                        row = Some(Best { score: s, b });
                    }
                }
            }
            if let Some(r) = row {
                if best.is_none_or(|(_, cur)| r.score < cur.score) {
                    best = Some((a, r));
                }
            }
        }
        let (a, Best { b, .. }) = best.ok_or_else(|| stalled(live.len(), k))?;
        steps.push(commit(linkage, live, a, b));
    }
    Ok(steps)
}

fn commit<L: Linkage>(linkage: &mut L, live: &mut Vec<usize>, a: usize, b: usize) -> MergeStep {
    let distance = linkage.merge_distance(a, b);
    linkage.merge(a, b);
    let pos = live.binary_search(&b).expect("absorbed cluster is live");
    live.remove(pos);
    MergeStep {
        survivor: a,
        absorbed: b,
        distance,
    }
}

fn scan_row<L: Linkage>(linkage: &L, live: &[usize], a: usize) -> Option<Best> {
    let start = live.partition_point(|&x| x <= a);
    let mut row = None;
    for &b in &live[start..] {
        if let Some(s) = linkage.score(a, b) {
            if better(s, b, row) {
                row = Some(Best { score: s, b });
            }
        }
    }
    row
}

fn row_minima<L: Linkage>(linkage: &mut L, live: &mut Vec<usize>, k: usize) -> Result<Vec<MergeStep>> {
    let mut rows: Vec<Option<Best>> = vec![None; linkage.n_slots()];
    for &a in live.iter() {
        rows[a] = scan_row(linkage, live, a);
    }

    let mut steps = Vec::with_capacity(live.len().saturating_sub(k));
    while live.len() > k {
        let mut pick: Option<(usize, Best)> = None;
        for &a in live.iter() {
            if let Some(r) = rows[a] {
                // strict: among equal scores the smallest a wins
                if pick.is_none_or(|(_, cur)| r.score < cur.score) {
                    pick = Some((a, r));
                }
            }
        }
        let (a, Best { b, .. }) = pick.ok_or_else(|| stalled(live.len(), k))?;
        steps.push(commit(linkage, live, a, b));
        rows[b] = None;

        for &c in live.iter() {
            if c >= b {
                break;
            }
            if c == a {
                rows[a] = scan_row(linkage, live, a);
                continue;
            }
            match rows[c] {
                Some(r) if r.b == a || r.b == b => rows[c] = scan_row(linkage, live, c),
                cached if c < a => {
                    if let Some(s) = linkage.score(c, a) {
                        if better(s, a, cached) {
                            rows[c] = Some(Best { score: s, b: a });
                        }
                    }
                }
                _ => {}
            }
        }
    }
    Ok(steps)
}
