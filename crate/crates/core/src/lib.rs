//! Codebook-prior extraction for vector-quantized image tokenizers.
//!
//! The crate clusters the token embeddings of a VQ codebook with a greedy
//! average-linkage agglomerative algorithm ([`dcpe`]), and ships the k-means
//! family of baselines and ablations ([`baselines`]) it is compared against.
//! Around that sit the pieces needed to use a clustering downstream:
//! nearest-token quantization ([`quantize`]), token/cluster sequence
//! conversion ([`remap`]), quality metrics and a timing harness ([`eval`]).
//!
//! ```
//! use codebook_prior::{dcpe, Codebook};
//!
//! let codebook = Codebook::from_rows(&[vec![0.0], vec![1.0], vec![10.0], vec![11.0]]).unwrap();
//! let (assignment, trace) = dcpe::dcpe_optimized(&codebook, 2, None).unwrap();
//! assert_eq!(assignment.labels(), &[0, 0, 1, 1]);
//! assert_eq!(trace.len(), 2);
//! ```

pub mod algorithm;
pub mod assignment;
pub mod baselines;
pub mod cli;
pub mod codebook;
pub mod dcpe;
pub mod error;
pub mod eval;
pub mod io;
pub mod metric;
pub mod npy;
pub mod quantize;
pub mod remap;
pub mod rng;
pub mod synthetic;

pub use algorithm::{Algorithm, RunOptions};
pub use assignment::ClusterAssignment;
pub use codebook::{Codebook, Matrix};
pub use dcpe::{MergeStep, MergeTrace};
pub use error::{Error, Result};
pub use metric::Metric;
pub use remap::TokenSequence;
pub use synthetic::{generate_synthetic, Component, SyntheticSpec};
