use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::assignment::ClusterAssignment;
use crate::error::{Error, Result};

/// One merge: cluster `absorbed` joins cluster `survivor`. Clusters are
/// named by their smallest member token.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    #[serde(rename = "a")]
    pub survivor: usize,
    #[serde(rename = "b")]
    pub absorbed: usize,
    #[serde(rename = "dist")]
    pub distance: f64,
}

/// Ordered merges from singletons; a prefix of the dendrogram.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MergeTrace {
    pub steps: Vec<MergeStep>,
}

impl MergeTrace {
    pub fn new(steps: Vec<MergeStep>) -> Self {
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MergeStep> {
        self.steps.iter()
    }

    /// One `{"a": .., "b": .., "dist": ..}` object per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for step in &self.steps {
            serde_json::to_writer(&mut w, step)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut steps = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Trace(format!("line {}: {e}", lineno + 1)))?;
            if line.trim().is_empty() {
                continue;
            }
            let step = serde_json::from_str(&line)
                .map_err(|e| Error::Trace(format!("line {}: {e}", lineno + 1)))?;
            steps.push(step);
        }
        Ok(Self { steps })
    }
}

impl<'a> IntoIterator for &'a MergeTrace {
    type Item = &'a MergeStep;
    type IntoIter = std::slice::Iter<'a, MergeStep>;

    fn into_iter(self) -> Self::IntoIter {
        self.steps.iter()
    }
}

/// Replays the first `n_tokens - k` merges of `trace` from singletons.
///
/// Any `k` between the trace's final cluster count and `n_tokens` can be
/// recovered without re-clustering.
pub fn cut_trace(trace: &MergeTrace, n_tokens: usize, k: usize) -> Result<ClusterAssignment> {
    let floor = n_tokens.saturating_sub(trace.len());
    if k == 0 || k > n_tokens || k < floor {
        return Err(Error::Trace(format!(
            "k = {k} is not reachable: trace of {} merges over {n_tokens} tokens covers k in [{}, {n_tokens}]",
            trace.len(),
            floor.max(1)
        )));
    }

    let mut parent: Vec<usize> = (0..n_tokens).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for (i, step) in trace.steps[..n_tokens - k].iter().enumerate() {
        let (a, b) = (step.survivor, step.absorbed);
        if a >= n_tokens || b >= n_tokens {
            return Err(Error::Trace(format!(
                "step {i}: token {} out of range for {n_tokens} tokens",
                a.max(b)
            )));
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return Err(Error::Trace(format!(
                "step {i}: clusters {a} and {b} are already merged"
            )));
        }
        parent[rb] = ra;
    }
    let roots: Vec<usize> = (0..n_tokens).map(|t| find(&mut parent, t)).collect();
    Ok(ClusterAssignment::canonical(&roots))
}
