//! Converting between token sequences and cluster sequences.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::ClusterAssignment;
use crate::error::{Error, Result};
use crate::rng;

/// A flat sequence of token (or cluster) indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSequence(pub Vec<usize>);

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for TokenSequence {
    fn from(v: Vec<usize>) -> Self {
        TokenSequence(v)
    }
}

/// Replaces every token index with its cluster index.
pub fn remap_to_clusters(seq: &TokenSequence, assignment: &ClusterAssignment) -> Result<TokenSequence> {
    let n = assignment.n_tokens();
    seq.0
        .iter()
        .map(|&t| {
            if t < n {
                Ok(assignment.label(t))
            } else {
                Err(Error::IndexOutOfRange { index: t, bound: n })
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(TokenSequence)
}

/// Replaces every cluster index with a member token drawn uniformly.
///
/// Position `i` draws from its own stream `(seed, i)`, so a position's
/// token does not depend on the rest of the sequence.
pub fn decode_random_selection(
    cluster_seq: &TokenSequence,
    assignment: &ClusterAssignment,
    seed: u64,
) -> Result<TokenSequence> {
    let members = assignment.members();
    cluster_seq
        .0
        .iter()
        .enumerate()
        .map(|(pos, &c)| {
            let m = members.get(c).ok_or(Error::IndexOutOfRange {
                index: c,
                bound: members.len(),
            })?;
            Ok(if m.len() == 1 {
                m[0]
            } else {
                m[rng::stream(seed, pos as u64).random_range(0..m.len())]
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(TokenSequence)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    /// Mean of member logits; comparable across clusters of any size.
    #[default]
    Mean,
    /// Sum of member logits; only comparable when sizes are equal.
    Sum,
}

/// Per-cluster logit from per-token logits.
pub fn aggregate_cluster_logits(
    token_logits: &[f64],
    assignment: &ClusterAssignment,
    mode: Aggregate,
) -> Result<Vec<f64>> {
    if token_logits.len() != assignment.n_tokens() {
        return Err(Error::DimensionMismatch {
            expected: assignment.n_tokens(),
            found: token_logits.len(),
        });
    }
    if let Some(i) = token_logits.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { row: i, col: 0 });
    }
    Ok(assignment
        .members()
        .iter()
        .map(|m| {
            let sum: f64 = m.iter().map(|&t| token_logits[t]).sum();
            match mode {
                Aggregate::Sum => sum,
                Aggregate::Mean => sum / m.len() as f64,
            }
        })
        .collect())
}
