//! Dense row-major matrices and the codebook type built on them.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Row-major `rows × dim` matrix of finite `f64` values.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    dim: usize,
}

impl Matrix {
    /// Wraps a flat row-major buffer. Rejects empty shapes and non-finite
    /// entries.
    pub fn new(data: Vec<f64>, rows: usize, dim: usize) -> Result<Self> {
        if rows == 0 || dim == 0 {
            return Err(Error::Shape(format!(
                "need at least one row and one column, got {rows}×{dim}"
            )));
        }
        if data.len() != rows * dim {
            return Err(Error::Shape(format!(
                "{} values do not fill a {rows}×{dim} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { data, rows, dim })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::Shape(format!(
                "row {i} has {} columns, expected {dim}",
                r.len()
            )));
        }
        let data = rows.iter().flatten().copied().collect();
        Self::new(data, rows.len(), dim)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// New matrix holding the selected rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    bound: self.rows,
                });
            }
            data.extend_from_slice(self.row(i));
        }
        Self::new(data, indices.len(), self.dim)
    }
}

/// A VQ codebook: `N` token embedding vectors of dimension `d`.
///
/// Row `i` is the vector of token `i`; that ordering is the token-index
/// order used by every other module.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook(Matrix);

impl Codebook {
    pub fn new(vectors: Vec<f64>, n_tokens: usize, dim: usize) -> Result<Self> {
        Matrix::new(vectors, n_tokens, dim).map(Codebook)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Matrix::from_rows(rows).map(Codebook)
    }

    #[inline]
    pub fn n_tokens(&self) -> usize {
        self.0.rows()
    }

    #[inline]
    pub fn vector(&self, token: usize) -> &[f64] {
        self.0.row(token)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Codebook with rows reordered so that new row `i` is old row `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_tokens() {
            return Err(Error::Shape(format!(
                "permutation of length {} for {} tokens",
                order.len(),
                self.n_tokens()
            )));
        }
        self.0.select_rows(order).map(Codebook)
    }
}

impl From<Matrix> for Codebook {
    fn from(m: Matrix) -> Self {
        Codebook(m)
    }
}

impl Deref for Codebook {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}
