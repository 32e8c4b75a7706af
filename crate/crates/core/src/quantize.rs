//! Nearest-token vector quantization.

use rayon::prelude::*;

use crate::codebook::{Codebook, Matrix};
use crate::error::{Error, Result};
use crate::metric::squared_euclidean;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizeResult {
    /// Nearest token per query.
    pub indices: Vec<usize>,
    /// Euclidean distance from each query to its token.
    pub distances: Vec<f64>,
}

/// Exact nearest-token lookup. Ties resolve to the lowest token index.
pub fn quantize(queries: &Matrix, codebook: &Codebook) -> Result<QuantizeResult> {
    if queries.dim() != codebook.dim() {
        return Err(Error::DimensionMismatch {
            expected: codebook.dim(),
            found: queries.dim(),
        });
    }
    let (indices, distances) = queries
        .as_slice()
        .par_chunks_exact(queries.dim())
        .map(|q| nearest(q, codebook))
        .map(|(i, d2)| (i, d2.sqrt()))
        .unzip();
    Ok(QuantizeResult { indices, distances })
}

/// `(token, squared distance)` of the nearest token.
pub fn nearest(query: &[f64], codebook: &Codebook) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (token, v) in codebook.iter_rows().enumerate() {
        let d2 = squared_euclidean(query, v);
        if d2 < best.1 {
            best = (token, d2);
        }
    }
    best
}
